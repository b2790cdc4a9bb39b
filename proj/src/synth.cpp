#include "gazemetrics/synth.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <set>

#include "gazemetrics/error.hpp"
#include "gazemetrics/text.hpp"

namespace gazemetrics {

namespace {

using Json = nlohmann::ordered_json;

// Distribution helpers written out by hand: the standard distributions are
// implementation-defined, and generated files must match across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi) {  // inclusive
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<int>(engine_() % span);
  }
  double normal() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double round_to(double v, double scale) { return std::round(v * scale) / scale; }

double distance_to_segment(Point p, Point a, Point b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

double edge_distance(const AoiPolygon& poly, Point p) {
  double best = std::numeric_limits<double>::infinity();
  const auto& v = poly.vertices;
  for (std::size_t i = 0; i < v.size(); ++i) best = std::min(best, distance_to_segment(p, v[i], v[(i + 1) % v.size()]));
  return best;
}

// A dwell target well inside the polygon, so jittered samples stay in it.
Point dwell_target(const AoiPolygon& poly, double margin, Rng& rng) {
  double min_x = poly.vertices[0].x, max_x = min_x, min_y = poly.vertices[0].y, max_y = min_y;
  for (const auto& v : poly.vertices) {
    min_x = std::min(min_x, v.x);
    max_x = std::max(max_x, v.x);
    min_y = std::min(min_y, v.y);
    max_y = std::max(max_y, v.y);
  }
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const Point p{rng.uniform(min_x, max_x), rng.uniform(min_y, max_y)};
    if (polygon_contains(poly.vertices, p) && edge_distance(poly, p) >= margin) return p;
  }
  return polygon_centroid(poly.vertices);
}

const AoiPolygon& polygon_for(const std::vector<AoiPolygon>& polys, AoiName name) {
  for (const auto& p : polys) {
    if (p.aoi_name == name) return p;
  }
  throw SpecError("layout has no polygon for " + std::string(to_string(name)));
}

std::vector<Point> rect(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }

struct Dwell {
  AoiName aoi;
  std::size_t begin;
  std::size_t end;
  std::optional<double> hf_override;
};

std::vector<Dwell> plan_dwells(const SynthSpec& spec, std::size_t n_samples, Rng& rng) {
  std::vector<Dwell> out;
  const double ms_to_samples = spec.sample_rate_hz / 1000.0;
  double elapsed_ms = 0.0;
  std::size_t cursor = 0;
  std::size_t step = 0;
  std::optional<AoiName> previous;
  while (cursor < n_samples) {
    AoiName aoi;
    double dwell_ms;
    std::optional<double> hf;
    if (spec.scanpath.empty()) {
      do {
        aoi = all_aoi_names()[static_cast<std::size_t>(rng.uniform_int(0, kAoiCount - 1))];
      } while (previous && aoi == *previous);
      dwell_ms = rng.uniform(spec.random_dwell_min_ms, spec.random_dwell_max_ms);
    } else {
      const auto& d = spec.scanpath[step % spec.scanpath.size()];
      aoi = d.aoi;
      dwell_ms = d.dwell_ms;
      hf = d.hf_amplitude_mm;
    }
    elapsed_ms += dwell_ms;
    const auto end = std::min<std::size_t>(n_samples, static_cast<std::size_t>(std::llround(elapsed_ms * ms_to_samples)));
    if (end > cursor) {
      out.push_back({aoi, cursor, end, hf});
      cursor = end;
    }
    previous = aoi;
    ++step;
  }
  return out;
}

std::vector<AoiVisit> label_runs(const std::vector<std::optional<AoiName>>& labels, double dt_us) {
  std::vector<AoiVisit> out;
  const auto time_at = [&](std::size_t k) { return static_cast<std::int64_t>(std::llround(static_cast<double>(k) * dt_us)); };
  std::size_t i = 0;
  while (i < labels.size()) {
    std::size_t j = i + 1;
    while (j < labels.size() && labels[j] == labels[i]) ++j;
    if (labels[i]) out.push_back({*labels[i], time_at(i), time_at(j), i, j});
    i = j;
  }
  return out;
}

template <typename T>
T get(const Json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("field '") + key + "': " + e.what());
  }
}

}  // namespace

int SynthSpec::experts() const {
  if (n_experts) return *n_experts;
  return static_cast<int>(std::lround(n_participants * 44.0 / 73.0));
}

void SynthSpec::validate() const {
  const auto require = [](bool ok, const std::string& what) {
    if (!ok) throw SpecError(what);
  };
  require(n_participants >= 1, "n_participants must be at least 1");
  require(n_trials >= 1, "n_trials must be at least 1");
  require(!n_experts || (*n_experts >= 0 && *n_experts <= n_participants), "n_experts must lie in [0, n_participants]");
  require(sample_rate_hz > 0, "sample_rate_hz must be positive");
  require(trial_duration_ms > 0.0, "trial_duration_ms must be positive");
  require(lf_hz >= 0.0 && hf_hz >= 0.0, "frequencies must be non-negative");
  require(lf_amplitude_mm >= 0.0 && hf_amplitude_mm >= 0.0, "amplitudes must be non-negative");
  require(!hf_amplitude_max_mm || *hf_amplitude_max_mm >= 0.0, "hf_amplitude_max_mm must be non-negative");
  require(noise_sd_mm >= 0.0, "noise_sd_mm must be non-negative");
  require(gaze_jitter_px >= 0.0, "gaze_jitter_px must be non-negative");
  require(random_dwell_min_ms > 0.0 && random_dwell_max_ms >= random_dwell_min_ms,
          "random dwell range must be positive and ordered");
  for (const auto& g : gaps) require(g.start_ms >= 0.0 && g.duration_ms >= 0.0, "gaps must be non-negative");
  double hf_peak = std::max(hf_amplitude_mm, hf_amplitude_max_mm.value_or(0.0));
  for (const auto& d : scanpath) {
    require(d.dwell_ms > 0.0, "scanpath dwells must be positive");
    require(!d.hf_amplitude_mm || *d.hf_amplitude_mm >= 0.0, "dwell amplitudes must be non-negative");
    hf_peak = std::max(hf_peak, d.hf_amplitude_mm.value_or(0.0));
  }
  require(baseline_mm - lf_amplitude_mm - hf_peak > kPupilMinMm,
          "baseline minus the amplitudes must stay above " + format_double(kPupilMinMm) + " mm");
  require(baseline_mm + lf_amplitude_mm + hf_peak < kPupilMaxMm,
          "baseline plus the amplitudes must stay below " + format_double(kPupilMaxMm) + " mm");
}

SynthSpec parse_synth_spec(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SpecError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SpecError("synth spec must be a JSON object");
  static const std::set<std::string> known{
      "seed",          "n_participants",  "n_experts",       "n_trials",         "sample_rate_hz",
      "trial_duration_ms", "baseline_mm", "lf_hz",           "lf_amplitude_mm",  "hf_hz",
      "hf_amplitude_mm", "hf_amplitude_max_mm", "noise_sd_mm", "gaps",           "scanpath",
      "random_dwell_min_ms", "random_dwell_max_ms", "gaze_jitter_px"};
  for (const auto& [key, _] : j.items()) {
    if (!known.contains(key)) throw SpecError("unknown field '" + key + "'");
  }

  SynthSpec s;
  s.seed = get<std::uint64_t>(j, "seed", s.seed);
  s.n_participants = get<int>(j, "n_participants", s.n_participants);
  if (j.contains("n_experts")) s.n_experts = get<int>(j, "n_experts", 0);
  s.n_trials = get<int>(j, "n_trials", s.n_trials);
  s.sample_rate_hz = get<int>(j, "sample_rate_hz", s.sample_rate_hz);
  s.trial_duration_ms = get<double>(j, "trial_duration_ms", s.trial_duration_ms);
  s.baseline_mm = get<double>(j, "baseline_mm", s.baseline_mm);
  s.lf_hz = get<double>(j, "lf_hz", s.lf_hz);
  s.lf_amplitude_mm = get<double>(j, "lf_amplitude_mm", s.lf_amplitude_mm);
  s.hf_hz = get<double>(j, "hf_hz", s.hf_hz);
  s.hf_amplitude_mm = get<double>(j, "hf_amplitude_mm", s.hf_amplitude_mm);
  if (j.contains("hf_amplitude_max_mm")) s.hf_amplitude_max_mm = get<double>(j, "hf_amplitude_max_mm", 0.0);
  s.noise_sd_mm = get<double>(j, "noise_sd_mm", s.noise_sd_mm);
  s.random_dwell_min_ms = get<double>(j, "random_dwell_min_ms", s.random_dwell_min_ms);
  s.random_dwell_max_ms = get<double>(j, "random_dwell_max_ms", s.random_dwell_max_ms);
  s.gaze_jitter_px = get<double>(j, "gaze_jitter_px", s.gaze_jitter_px);

  if (j.contains("gaps")) {
    if (!j["gaps"].is_array()) throw SpecError("gaps must be an array");
    for (const auto& g : j["gaps"]) {
      if (!g.is_array() || g.size() != 2 || !g[0].is_number() || !g[1].is_number()) {
        throw SpecError("each gap must be [start_ms, duration_ms]");
      }
      s.gaps.push_back({g[0].get<double>(), g[1].get<double>()});
    }
  }
  if (j.contains("scanpath")) {
    if (!j["scanpath"].is_array()) throw SpecError("scanpath must be an array");
    for (const auto& d : j["scanpath"]) {
      if (!d.is_object() || !d.contains("aoi") || !d.contains("dwell_ms") || !d["aoi"].is_string() ||
          !d["dwell_ms"].is_number()) {
        throw SpecError("each scanpath entry needs a string 'aoi' and a numeric 'dwell_ms'");
      }
      const auto name = d["aoi"].get<std::string>();
      const auto aoi = parse_aoi_name(name);
      if (!aoi) throw SpecError("unknown AOI '" + name + "' in scanpath");
      DwellSpec dwell{*aoi, d["dwell_ms"].get<double>(), std::nullopt};
      if (d.contains("hf_amplitude_mm")) {
        if (!d["hf_amplitude_mm"].is_number()) throw SpecError("hf_amplitude_mm must be a number");
        dwell.hf_amplitude_mm = d["hf_amplitude_mm"].get<double>();
      }
      s.scanpath.push_back(dwell);
    }
  }
  s.validate();
  return s;
}

std::string stimulus_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "S%02d", index + 1);
  return buf;
}

std::string participant_name(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "P%03d", index + 1);
  return buf;
}

AoiLayout face_layout(const std::vector<std::string>& stimulus_ids) {
  AoiLayout layout;
  for (std::size_t s = 0; s < stimulus_ids.size(); ++s) {
    const double ox = 660.0 + static_cast<double>(static_cast<int>(s % 5) - 2) * 6.0;
    const double oy = 140.0 + static_cast<double>(static_cast<int>((s / 5) % 3) - 1) * 5.0;
    const auto at = [&](std::vector<Point> pts) {
      for (auto& p : pts) p = {p.x + ox, p.y + oy};
      return pts;
    };
    const std::pair<AoiName, std::vector<Point>> shapes[] = {
        {AoiName::RightEye, rect(120, 250, 265, 320)},
        {AoiName::LeftEye, rect(335, 250, 480, 320)},
        {AoiName::RegionBetweenEyebrows, rect(275, 200, 325, 300)},
        {AoiName::Forehead, rect(120, 60, 480, 190)},
        {AoiName::Mouth, rect(240, 540, 360, 620)},
        {AoiName::RightNasolabialGroove, rect(190, 490, 232, 640)},
        {AoiName::LeftNasolabialGroove, rect(368, 490, 410, 640)},
        {AoiName::Chin, rect(220, 650, 380, 760)},
        {AoiName::RightEyebrow, rect(110, 200, 265, 240)},
        {AoiName::LeftEyebrow, rect(335, 200, 490, 240)},
        {AoiName::Nose, {{275, 310}, {325, 310}, {360, 470}, {240, 470}}},
        {AoiName::RightCheek, rect(80, 340, 220, 480)},
        {AoiName::LeftCheek, rect(380, 340, 520, 480)},
    };
    auto& polys = layout[stimulus_ids[s]];
    for (const auto& [name, pts] : shapes) polys.push_back({stimulus_ids[s], name, at(pts)});
  }
  return layout;
}

SynthSession generate(const SynthSpec& spec) {
  spec.validate();
  SynthSession out;
  std::vector<std::string> stimuli;
  for (int j = 0; j < spec.n_trials; ++j) stimuli.push_back(stimulus_name(j));
  out.aois = face_layout(stimuli);

  const double dt_us = 1e6 / spec.sample_rate_hz;
  const auto n_samples =
      static_cast<std::size_t>(std::llround(spec.trial_duration_ms * spec.sample_rate_hz / 1000.0));
  const int total = spec.total_trials();
  const double margin = 3.0 + 6.0 * spec.gaze_jitter_px;

  for (int p = 0; p < spec.n_participants; ++p) {
    // Ratings are a per-participant stream so they do not shift with the trial layout.
    Rng rating_rng(mix(spec.seed ^ mix(0xabcdefULL + static_cast<std::uint64_t>(p))));
    for (int j = 0; j < spec.n_trials; ++j) {
      const int k = p * spec.n_trials + j;
      Rng rng(mix(spec.seed + mix(static_cast<std::uint64_t>(k))));

      TrialRecord trial;
      trial.participant_id = participant_name(p);
      trial.group = p < spec.experts() ? Group::Expert : Group::NonExpert;
      trial.stimulus_id = stimuli[static_cast<std::size_t>(j)];
      trial.pain_label = j % 2 == 0 ? PainLabel::Rest : PainLabel::Pain;
      trial.rating = rating_rng.uniform_int(0, 10);

      double amplitude = spec.hf_amplitude_mm;
      if (spec.hf_amplitude_max_mm && total > 1) {
        amplitude += (*spec.hf_amplitude_max_mm - spec.hf_amplitude_mm) * k / (total - 1);
      }

      const auto& polys = out.aois.at(trial.stimulus_id);
      const auto dwells = plan_dwells(spec, n_samples, rng);
      const double lf_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double hf_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

      std::vector<std::optional<AoiName>> intended(n_samples);
      trial.samples.resize(n_samples);
      for (const auto& d : dwells) {
        const auto& poly = polygon_for(polys, d.aoi);
        const Point target = dwell_target(poly, margin, rng);
        const double a_hf = d.hf_override.value_or(amplitude);
        for (std::size_t i = d.begin; i < d.end; ++i) {
          auto& s = trial.samples[i];
          s.t_us = static_cast<std::int64_t>(std::llround(static_cast<double>(i) * dt_us));
          const double t = static_cast<double>(i) * dt_us * 1e-6;

          Point g = target;
          for (int attempt = 0; attempt < 8; ++attempt) {
            const Point c{round_to(target.x + spec.gaze_jitter_px * rng.normal(), 100.0),
                          round_to(target.y + spec.gaze_jitter_px * rng.normal(), 100.0)};
            if (point_in_aoi(c.x, c.y, polys) == d.aoi) {
              g = c;
              break;
            }
          }
          s.gaze_x_px = g.x;
          s.gaze_y_px = g.y;

          const double base = spec.baseline_mm + spec.lf_amplitude_mm * std::sin(2 * std::numbers::pi * spec.lf_hz * t + lf_phase) +
                              a_hf * std::sin(2 * std::numbers::pi * spec.hf_hz * t + hf_phase);
          s.pupil_left_mm = round_to(base + spec.noise_sd_mm * rng.normal(), 1e6);
          s.pupil_right_mm = round_to(base + spec.noise_sd_mm * rng.normal(), 1e6);
          s.valid_left = true;
          s.valid_right = true;
          intended[i] = d.aoi;
        }
      }

      for (const auto& gap : spec.gaps) {
        const auto first = static_cast<std::size_t>(std::llround(gap.start_ms * spec.sample_rate_hz / 1000.0));
        const auto last = static_cast<std::size_t>(
            std::llround((gap.start_ms + gap.duration_ms) * spec.sample_rate_hz / 1000.0));
        for (std::size_t i = first; i < std::min(last, n_samples); ++i) {
          auto& s = trial.samples[i];
          s.gaze_x_px.reset();
          s.gaze_y_px.reset();
          s.pupil_left_mm.reset();
          s.pupil_right_mm.reset();
          s.valid_left = false;
          s.valid_right = false;
          intended[i].reset();
        }
      }

      out.truth.push_back({trial.participant_id, trial.stimulus_id, amplitude, label_runs(intended, dt_us)});
      out.trials.push_back(std::move(trial));
    }
  }
  return out;
}

std::string ground_truth_json(const SynthSpec& spec, const SynthSession& session) {
  Json trials = Json::array();
  for (const auto& t : session.truth) {
    Json visits = Json::array();
    for (const auto& v : t.visits) {
      visits.push_back(Json{{"aoi_name", to_string(v.aoi_name)},
                            {"start_us", v.start_us},
                            {"end_us", v.end_us},
                            {"begin", v.begin},
                            {"end", v.end}});
    }
    trials.push_back(Json{{"participant_id", t.participant_id},
                          {"stimulus_id", t.stimulus_id},
                          {"hf_amplitude_mm", t.hf_amplitude_mm},
                          {"visits", std::move(visits)}});
  }
  Json doc{{"seed", spec.seed},
           {"sample_rate_hz", spec.sample_rate_hz},
           {"trial_duration_ms", spec.trial_duration_ms},
           {"hf_hz", spec.hf_hz},
           {"lf_hz", spec.lf_hz},
           {"trials", std::move(trials)}};
  return doc.dump(2) + "\n";
}

}  // namespace gazemetrics
