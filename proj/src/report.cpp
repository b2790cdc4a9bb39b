#include "gazemetrics/report.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>

#include "gazemetrics/error.hpp"

namespace gazemetrics {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kMetricsHeader =
    "participant_id,group,stimulus_id,pain_label,aoi_name,lhipa,ipa,fixation_count,gaze_duration_ms,visit_count";

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <typename T>
T parse_number(std::string_view field, std::size_t line, std::string_view column) {
  T value{};
  const auto* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  if (res.ec != std::errc{} || res.ptr != end) {
    throw ParseError(line, "column " + std::string(column) + ": cannot parse '" + std::string(field) + "'");
  }
  return value;
}

// sRGB <-> CIELAB (D65), used so the ramp steps evenly in lightness.
struct Lab {
  double l, a, b;
};

double to_linear(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }
double to_gamma(double c) { return c <= 0.0031308 ? 12.92 * c : 1.055 * std::pow(c, 1.0 / 2.4) - 0.055; }

constexpr double kWhiteX = 0.95047, kWhiteY = 1.0, kWhiteZ = 1.08883;

double lab_f(double t) { return t > 216.0 / 24389.0 ? std::cbrt(t) : (24389.0 / 27.0 * t + 16.0) / 116.0; }
double lab_f_inv(double f) {
  const double t = f * f * f;
  return t > 216.0 / 24389.0 ? t : (116.0 * f - 16.0) / (24389.0 / 27.0);
}

Lab hex_to_lab(std::string_view hex) {
  std::array<double, 3> rgb{};
  for (int i = 0; i < 3; ++i) {
    int v = 0;
    std::from_chars(hex.data() + 1 + 2 * i, hex.data() + 3 + 2 * i, v, 16);
    rgb[static_cast<std::size_t>(i)] = to_linear(v / 255.0);
  }
  const double x = 0.4124564 * rgb[0] + 0.3575761 * rgb[1] + 0.1804375 * rgb[2];
  const double y = 0.2126729 * rgb[0] + 0.7151522 * rgb[1] + 0.0721750 * rgb[2];
  const double z = 0.0193339 * rgb[0] + 0.1191920 * rgb[1] + 0.9503041 * rgb[2];
  const double fx = lab_f(x / kWhiteX), fy = lab_f(y / kWhiteY), fz = lab_f(z / kWhiteZ);
  return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

std::string lab_to_hex(const Lab& c) {
  const double fy = (c.l + 16.0) / 116.0;
  const double fx = fy + c.a / 500.0;
  const double fz = fy - c.b / 200.0;
  const double x = kWhiteX * lab_f_inv(fx), y = kWhiteY * lab_f_inv(fy), z = kWhiteZ * lab_f_inv(fz);
  const std::array<double, 3> linear{3.2404542 * x - 1.5371385 * y - 0.4985314 * z,
                                     -0.9692660 * x + 1.8760108 * y + 0.0415560 * z,
                                     0.0556434 * x - 0.2040259 * y + 1.0572252 * z};
  std::string out = "#";
  constexpr char kDigits[] = "0123456789abcdef";
  for (double ch : linear) {
    const auto v = static_cast<int>(std::lround(std::clamp(to_gamma(std::clamp(ch, 0.0, 1.0)), 0.0, 1.0) * 255.0));
    out += kDigits[v / 16];
    out += kDigits[v % 16];
  }
  return out;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string coord(double v) { return format_fixed(v, 2); }

}  // namespace

void write_metrics_csv(std::ostream& out, std::span<const MetricRow> rows) {
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    out << r.participant_id << ',' << to_string(r.group) << ',' << r.stimulus_id << ',' << to_string(r.pain_label)
        << ',' << to_string(r.aoi_name) << ',' << format_double(r.lhipa) << ',' << format_double(r.ipa) << ','
        << r.fixation_count << ',' << format_double(r.gaze_duration_ms) << ',' << r.visit_count << '\n';
  }
}

std::vector<MetricRow> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("metrics table is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kMetricsHeader) throw SchemaError("metrics header must be: " + std::string(kMetricsHeader));

  std::vector<MetricRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 10) throw ParseError(line_no, "expected 10 fields, got " + std::to_string(f.size()));
    MetricRow r;
    r.participant_id = std::string(f[0]);
    const auto group = parse_group(f[1]);
    if (!group) throw ParseError(line_no, "unknown group '" + std::string(f[1]) + "'");
    r.group = *group;
    r.stimulus_id = std::string(f[2]);
    const auto pain = parse_pain_label(f[3]);
    if (!pain) throw ParseError(line_no, "unknown pain label '" + std::string(f[3]) + "'");
    r.pain_label = *pain;
    const auto aoi = parse_aoi_name(f[4]);
    if (!aoi) throw UnknownAoiName("line " + std::to_string(line_no) + ": unknown AOI '" + std::string(f[4]) + "'");
    r.aoi_name = *aoi;
    r.lhipa = parse_number<double>(f[5], line_no, "lhipa");
    r.ipa = parse_number<double>(f[6], line_no, "ipa");
    r.fixation_count = parse_number<int>(f[7], line_no, "fixation_count");
    r.gaze_duration_ms = parse_number<double>(f[8], line_no, "gaze_duration_ms");
    r.visit_count = parse_number<int>(f[9], line_no, "visit_count");
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string regression_json(const GroupAoiRegression& regression, std::string_view pain_label_filter) {
  const auto& fit = regression.fit;
  Json terms = Json::array();
  for (std::size_t i = 0; i < fit.terms.size(); ++i) {
    terms.push_back(Json{{"term", fit.terms[i]},
                         {"estimate", number_or_null(fit.coefficients[i])},
                         {"se", number_or_null(fit.std_errors[i])},
                         {"t", number_or_null(fit.t_stats[i])},
                         {"p", number_or_null(fit.p_values[i])}});
  }
  Json doc{{"tool_version", kToolVersion},
           {"dependent", to_string(regression.dependent)},
           {"model", "y ~ 1 + group + aoi + group:aoi (treatment coding)"},
           {"reference_levels", {{"group", regression.reference_group}, {"aoi", regression.reference_aoi}}},
           {"observation_unit", kObservationUnit},
           {"pain_label_filter", pain_label_filter},
           {"n", fit.n},
           {"dof", fit.dof},
           {"r_squared", number_or_null(fit.r_squared)},
           {"rss", number_or_null(fit.rss)},
           {"terms", std::move(terms)}};
  return doc.dump(2) + "\n";
}

std::string ramp_color(double v) {
  if (!(v > 0.0)) return std::string(kRampLight);
  if (v >= 1.0) return std::string(kRampDark);
  static const Lab light = hex_to_lab(kRampLight);
  static const Lab dark = hex_to_lab(kRampDark);
  return lab_to_hex({light.l + (dark.l - light.l) * v, light.a + (dark.a - light.a) * v,
                     light.b + (dark.b - light.b) * v});
}

std::string render_map(std::span<const AoiPolygon> polygons, const std::map<AoiName, double>& values,
                       std::string_view title) {
  double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
  double max_x = -min_x, max_y = -min_x;
  for (const auto& p : polygons) {
    for (const auto& v : p.vertices) {
      min_x = std::min(min_x, v.x);
      min_y = std::min(min_y, v.y);
      max_x = std::max(max_x, v.x);
      max_y = std::max(max_y, v.y);
    }
  }
  if (polygons.empty()) min_x = min_y = max_x = max_y = 0.0;

  constexpr double kMargin = 40.0;
  constexpr double kTitleBand = 50.0;
  constexpr double kLegendWidth = 110.0;
  const double map_w = max_x - min_x;
  const double map_h = max_y - min_y;
  const double width = map_w + 2 * kMargin + kLegendWidth;
  const double height = std::max(map_h, 200.0) + 2 * kMargin + kTitleBand;
  const double ox = kMargin - min_x;
  const double oy = kMargin + kTitleBand - min_y;

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << coord(width) << "\" height=\"" << coord(height)
    << "\" viewBox=\"0 0 " << coord(width) << ' ' << coord(height) << "\">\n";
  s << "  <title>" << xml_escape(title) << "</title>\n";
  s << "  <rect x=\"0\" y=\"0\" width=\"" << coord(width) << "\" height=\"" << coord(height)
    << "\" fill=\"#ffffff\"/>\n";
  s << "  <text x=\"" << coord(width / 2) << "\" y=\"" << coord(kMargin)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"20\">" << xml_escape(title)
    << "</text>\n";

  s << "  <g id=\"aois\" stroke=\"#333333\" stroke-width=\"1.5\">\n";
  for (const auto& p : polygons) {
    std::string points;
    for (const auto& v : p.vertices) {
      if (!points.empty()) points += ' ';
      points += coord(v.x + ox) + ',' + coord(v.y + oy);
    }
    const auto it = values.find(p.aoi_name);
    s << "    <polygon data-aoi=\"" << xml_escape(to_string(p.aoi_name)) << "\" ";
    if (it != values.end()) {
      s << "data-value=\"" << format_double(it->second) << "\" fill=\"" << ramp_color(it->second) << "\"";
    } else {
      s << "class=\"nodata\" data-value=\"nodata\" fill=\"#d9d9d9\"";
    }
    s << " points=\"" << points << "\"/>\n";
  }
  s << "  </g>\n";

  s << "  <g id=\"labels\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\">\n";
  for (const auto& p : polygons) {
    const auto c = polygon_centroid(p.vertices);
    const auto it = values.find(p.aoi_name);
    const bool dark = it != values.end() && it->second > 0.55;
    s << "    <text x=\"" << coord(c.x + ox) << "\" y=\"" << coord(c.y + oy) << "\" fill=\""
      << (dark ? "#ffffff" : "#000000") << "\">" << xml_escape(to_string(p.aoi_name)) << "</text>\n";
  }
  s << "  </g>\n";

  // Colour bar: 0 at the bottom, 1 at the top.
  const double bar_x = width - kLegendWidth + 20.0;
  const double bar_y = kMargin + kTitleBand;
  const double bar_h = std::max(map_h, 200.0);
  s << "  <defs>\n    <linearGradient id=\"ramp\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">\n";
  for (int k = 0; k <= 10; ++k) {
    const double v = k / 10.0;
    s << "      <stop offset=\"" << format_fixed(v, 1) << "\" stop-color=\"" << ramp_color(v) << "\"/>\n";
  }
  s << "    </linearGradient>\n  </defs>\n";
  s << "  <g id=\"legend\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "    <rect x=\"" << coord(bar_x) << "\" y=\"" << coord(bar_y) << "\" width=\"20\" height=\"" << coord(bar_h)
    << "\" fill=\"url(#ramp)\" stroke=\"#333333\"/>\n";
  s << "    <text x=\"" << coord(bar_x + 26) << "\" y=\"" << coord(bar_y + 10) << "\">1</text>\n";
  s << "    <text x=\"" << coord(bar_x + 26) << "\" y=\"" << coord(bar_y + bar_h) << "\">0</text>\n";
  s << "  </g>\n";
  s << "</svg>\n";
  return s.str();
}

std::string sha256_hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
    throw Error("SHA-256 computation failed");
  }
  constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += kDigits[digest[i] >> 4];
    out += kDigits[digest[i] & 0xf];
  }
  return out;
}

void write_series_csv(std::ostream& out, const PupilSeries& series) {
  out << "t_us,diameter_mm,provenance\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out << format_fixed(series.time_us(i), 1) << ',' << format_double(series.d[i]) << ','
        << to_string(series.provenance[i]) << '\n';
  }
}

void write_fixations_csv(std::ostream& out, std::span<const FixationEvent> events) {
  out << "start_us,end_us,centroid_x,centroid_y,duration_ms\n";
  for (const auto& e : events) {
    out << e.start_us << ',' << e.end_us << ',' << format_double(e.centroid_x_px) << ','
        << format_double(e.centroid_y_px) << ',' << format_double(e.duration_ms()) << '\n';
  }
}

void write_visits_csv(std::ostream& out, std::span<const AoiVisit> visits) {
  out << "aoi,start_us,end_us,n_samples\n";
  for (const auto& v : visits) {
    out << to_string(v.aoi_name) << ',' << v.start_us << ',' << v.end_us << ',' << v.n_samples() << '\n';
  }
}

std::string manifest_json(const RunConfig& config, std::span<const InputDigest> inputs,
                          const std::vector<TrialRecord>& trials, const std::vector<TrialResult>& results,
                          std::string_view pain_label_filter, std::string_view generated_at) {
  Json cfg = Json::object();
  for (const auto& [k, v] : config.to_key_values()) cfg[k] = v;

  Json in = Json::array();
  for (const auto& d : inputs) in.push_back(Json{{"role", d.role}, {"path", d.path}, {"sha256", d.sha256}});

  std::map<TrialStatus, int> status_counts{
      {TrialStatus::Ok, 0}, {TrialStatus::AllMissing, 0}, {TrialStatus::WindowOutOfRange, 0}};
  std::map<SkipReason, int> skipped{{SkipReason::BelowMinSegment, 0}, {SkipReason::TooShort, 0}};
  Json per_trial = Json::array();
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& r = results.at(i);
    ++status_counts[r.status];
    Json skips = Json::object();
    for (auto reason : {SkipReason::BelowMinSegment, SkipReason::TooShort}) {
      const auto it = r.metrics.pupil.skipped.find(reason);
      const int count = it == r.metrics.pupil.skipped.end() ? 0 : it->second;
      skips[std::string(to_string(reason))] = count;
      skipped[reason] += count;
    }
    Json entry{{"participant_id", trials[i].participant_id},
               {"stimulus_id", trials[i].stimulus_id},
               {"status", to_string(r.status)}};
    if (!r.message.empty()) entry["message"] = r.message;
    entry["skipped_visits"] = std::move(skips);
    per_trial.push_back(std::move(entry));
  }

  Json status_json = Json::object();
  for (const auto& [s, n] : status_counts) status_json[std::string(to_string(s))] = n;
  Json skipped_json = Json::object();
  for (const auto& [reason, n] : skipped) skipped_json[std::string(to_string(reason))] = n;

  Json doc{{"tool_version", kToolVersion},
           {"generated_at", generated_at},
           {"observation_unit", kObservationUnit},
           {"pain_label_filter", pain_label_filter},
           {"config", std::move(cfg)},
           {"inputs", std::move(in)},
           {"trial_count", trials.size()},
           {"status_counts", std::move(status_json)},
           {"skipped_visits", std::move(skipped_json)},
           {"trials", std::move(per_trial)}};
  return doc.dump(2) + "\n";
}

}  // namespace gazemetrics
