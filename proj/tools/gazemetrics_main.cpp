// gazemetrics command-line front end: validate, synth, run, regress.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "gazemetrics/config.hpp"
#include "gazemetrics/data_model.hpp"
#include "gazemetrics/error.hpp"
#include "gazemetrics/pipeline.hpp"
#include "gazemetrics/report.hpp"
#include "gazemetrics/stats.hpp"
#include "gazemetrics/synth.hpp"

namespace fs = std::filesystem;
namespace gm = gazemetrics;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitIo = 2;

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("gazemetrics");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("GAZEMETRICS_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only honour names it really knows.
    if (level != spdlog::level::off || std::string_view(env) == "off") spdlog::set_level(level);
  }
}

void write_text(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gm::IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw gm::IoError("error writing '" + path.string() + "'");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::optional<gm::PainLabel> pain_filter(const std::string& label) {
  if (label == "all") return std::nullopt;
  if (label == "rest") return gm::PainLabel::Rest;
  return gm::PainLabel::Pain;
}

std::vector<gm::MetricRow> filter_rows(std::vector<gm::MetricRow> rows, const std::string& label) {
  const auto want = pain_filter(label);
  if (!want) return rows;
  std::erase_if(rows, [&](const gm::MetricRow& r) { return r.pain_label != *want; });
  return rows;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

gm::Metric metric_or_throw(const std::string& name) {
  const auto m = gm::parse_metric(name);
  if (!m) throw gm::ConfigError("unknown metric '" + name + "'");
  return *m;
}

struct RunArgs {
  std::string config, session, aois, out;
  int jobs = 1;
  std::string pain_label = "all";
  std::string metric = "lhipa";
  bool debug = false;
};

int cmd_run(const RunArgs& a) {
  const auto config = gm::load_config(a.config);
  const auto dependent = metric_or_throw(a.metric);
  const auto session_text = gm::read_file(a.session);
  const auto aoi_text = gm::read_file(a.aois);
  const auto trials = gm::load_session(a.session, config);
  const auto aois = gm::load_aois(a.aois);
  gm::check_aoi_coverage(trials, aois);
  spdlog::info("{} trials, {} stimuli with AOIs", trials.size(), aois.size());

  const auto results = gm::process_session(trials, aois, config, a.jobs);
  std::vector<gm::TrialMetrics> per_trial;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i].status != gm::TrialStatus::Ok) {
      spdlog::warn("trial {}/{}: {} ({})", trials[i].participant_id, trials[i].stimulus_id,
                   gm::to_string(results[i].status), results[i].message);
      continue;
    }
    per_trial.push_back(results[i].metrics);
  }
  const auto rows = filter_rows(gm::build_table(per_trial), a.pain_label);

  fs::create_directories(a.out);
  const fs::path out(a.out);
  {
    std::ostringstream csv;
    gm::write_metrics_csv(csv, rows);
    write_text(out / "metrics.csv", csv.str());
  }

  // Maps are drawn on the face layout of the first stimulus in the session.
  const auto& canvas = trials.empty() ? std::vector<gm::AoiPolygon>{} : aois.at(trials.front().stimulus_id);
  const auto maps = gm::normalize_maps(rows);
  for (auto group : {gm::Group::Expert, gm::Group::NonExpert}) {
    std::map<gm::AoiName, double> lhipa_star, gaze, fixations;
    if (const auto it = maps.values.find(group); it != maps.values.end()) {
      for (const auto& [aoi, v] : it->second) {
        lhipa_star[aoi] = v.lhipa_star;
        gaze[aoi] = v.gaze_duration;
        fixations[aoi] = v.fixation_count;
      }
    }
    const auto g = lower(gm::to_string(group));
    const std::string label(gm::to_string(group));
    write_text(out / ("maps_" + g + "_lhipa_star.svg"), gm::render_map(canvas, lhipa_star, label + ": LHIPA*"));
    write_text(out / ("maps_" + g + "_gaze_duration.svg"), gm::render_map(canvas, gaze, label + ": gaze duration"));
    write_text(out / ("maps_" + g + "_fixation_count.svg"),
               gm::render_map(canvas, fixations, label + ": fixation count"));
  }

  if (a.debug) {
    const auto dir = out / "debug";
    fs::create_directories(dir);
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto stem = trials[i].participant_id + "_" + trials[i].stimulus_id;
      std::ostringstream series, fix, visits;
      gm::write_series_csv(series, results[i].window_series);
      gm::write_fixations_csv(fix, results[i].fixations);
      gm::write_visits_csv(visits, results[i].visits);
      write_text(dir / (stem + "_series.csv"), series.str());
      write_text(dir / (stem + "_fixations.csv"), fix.str());
      write_text(dir / (stem + "_visits.csv"), visits.str());
    }
  }

  const std::vector<gm::InputDigest> inputs{{"config", a.config, gm::sha256_hex(gm::read_file(a.config))},
                                            {"session", a.session, gm::sha256_hex(session_text)},
                                            {"aois", a.aois, gm::sha256_hex(aoi_text)}};
  write_text(out / "manifest.json",
             gm::manifest_json(config, inputs, trials, results, a.pain_label, utc_timestamp()));

  // The regression goes last so a rank problem still leaves the other outputs.
  try {
    const auto reg = gm::ols_fit(rows, dependent);
    write_text(out / "regression.json", gm::regression_json(reg, a.pain_label));
  } catch (const gm::Error& e) {
    write_text(out / "regression.json", nlohmann::ordered_json{{"error", e.what()}}.dump(2) + "\n");
    throw;
  }
  spdlog::info("wrote {} rows to {}", rows.size(), (out / "metrics.csv").string());
  return kExitOk;
}

int cmd_validate(const std::string& session, const std::string& aoi_path, const std::string& config_path) {
  const auto config = config_path.empty() ? gm::RunConfig{} : gm::load_config(config_path);
  const auto trials = gm::load_session(session, config);
  const auto aois = gm::load_aois(aoi_path);
  gm::check_aoi_coverage(trials, aois);
  std::size_t samples = 0;
  for (const auto& t : trials) samples += t.samples.size();
  std::cout << "ok: " << trials.size() << " trials, " << samples << " samples, " << aois.size()
            << " stimuli with AOIs\n";
  return kExitOk;
}

struct SynthArgs {
  std::string out;
  std::string spec;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<int> participants;
  std::optional<double> hf_amplitude;
  std::optional<double> hf_amplitude_max;
};

int cmd_synth(const SynthArgs& a) {
  auto spec = a.spec.empty() ? gm::SynthSpec{} : gm::parse_synth_spec(gm::read_file(a.spec));
  if (a.seed) spec.seed = *a.seed;
  if (a.trials) spec.n_trials = *a.trials;
  if (a.participants) spec.n_participants = *a.participants;
  if (a.hf_amplitude) spec.hf_amplitude_mm = *a.hf_amplitude;
  if (a.hf_amplitude_max) spec.hf_amplitude_max_mm = *a.hf_amplitude_max;
  spec.validate();

  const auto session = gm::generate(spec);
  const fs::path out(a.out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ostringstream tsv;
  gm::write_session(tsv, session.trials);
  write_text(out, tsv.str());
  const auto dir = out.has_parent_path() ? out.parent_path() : fs::path(".");
  write_text(dir / "ground_truth.json", gm::ground_truth_json(spec, session));
  write_text(dir / "aois.json", gm::aois_to_json(session.aois));
  std::cout << "wrote " << session.trials.size() << " trials to " << out.string() << "\n";
  return kExitOk;
}

int cmd_regress(const std::string& metrics, const std::string& out, const std::string& metric,
                const std::string& pain_label) {
  const auto dependent = metric_or_throw(metric);
  std::istringstream in(gm::read_file(metrics));
  const auto rows = filter_rows(gm::read_metrics_csv(in), pain_label);
  const auto reg = gm::ols_fit(rows, dependent);
  const fs::path path(out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  write_text(path, gm::regression_json(reg, pain_label));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Gaze and pupil metrics per area of interest"};
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "Check a session and AOI file");
  std::string v_session, v_aois, v_config;
  validate->add_option("--session", v_session, "Session TSV")->required();
  validate->add_option("--aois", v_aois, "AOI JSON")->required();
  validate->add_option("--config", v_config, "Run config (for the sample-rate check)");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic session");
  SynthArgs s;
  synth->add_option("--out", s.out, "Output TSV; ground_truth.json and aois.json go next to it")->required();
  synth->add_option("--spec", s.spec, "JSON spec; flags below override it");
  synth->add_option("--seed", s.seed, "RNG seed");
  synth->add_option("--trials", s.trials, "Trials per participant")->check(CLI::PositiveNumber);
  synth->add_option("--participants", s.participants, "Participants")->check(CLI::PositiveNumber);
  synth->add_option("--hf-amplitude", s.hf_amplitude, "HF amplitude in mm (start of the sweep)");
  synth->add_option("--hf-amplitude-max", s.hf_amplitude_max, "Sweep the HF amplitude up to this value");

  auto* run = app.add_subcommand("run", "Run the pipeline and write tables, regression and maps");
  RunArgs r;
  run->add_option("--config", r.config, "Run config")->required();
  run->add_option("--session", r.session, "Session TSV")->required();
  run->add_option("--aois", r.aois, "AOI JSON")->required();
  run->add_option("--out", r.out, "Output directory")->required();
  run->add_option("--jobs", r.jobs, "Worker threads")->check(CLI::PositiveNumber);
  run->add_option("--pain-label", r.pain_label, "Row filter")->check(CLI::IsMember({"rest", "pain", "all"}));
  run->add_option("--metric", r.metric, "Regression dependent variable");
  run->add_flag("--debug", r.debug, "Dump per-trial series, fixations and visits");

  auto* regress = app.add_subcommand("regress", "Re-fit the regression from a metrics table");
  std::string g_metrics, g_out, g_metric = "lhipa", g_pain = "all";
  regress->add_option("--metrics", g_metrics, "metrics.csv")->required();
  regress->add_option("--out", g_out, "Output JSON")->required();
  regress->add_option("--metric", g_metric, "Dependent variable");
  regress->add_option("--pain-label", g_pain, "Row filter")->check(CLI::IsMember({"rest", "pain", "all"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*validate) return cmd_validate(v_session, v_aois, v_config);
    if (*synth) return cmd_synth(s);
    if (*run) return cmd_run(r);
    if (*regress) return cmd_regress(g_metrics, g_out, g_metric, g_pain);
  } catch (const gm::IoError& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitInvalid;
  }
  return kExitInvalid;
}
