#include "gazemetrics/config.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>

#include "gazemetrics/data_model.hpp"
#include "gazemetrics/error.hpp"
#include "gazemetrics/wavelet.hpp"

namespace gazemetrics {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

int parse_int(std::string_view key, std::string_view value) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw ConfigError("config key '" + std::string(key) + "': expected an integer, got '" +
                      std::string(value) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw ConfigError("config key '" + std::string(key) + "': expected a number, got '" +
                      std::string(value) + "'");
  }
  return out;
}

std::string real_text(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void RunConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(sample_rate_hz > 0, "sample_rate_hz must be positive");
  require(analysis_start_ms >= 0, "analysis_start_ms must be non-negative");
  require(analysis_start_ms < analysis_end_ms, "analysis_start_ms must be below analysis_end_ms");
  require(max_gap_fill_ms > 0, "max_gap_fill_ms must be positive");
  require(ivt_velocity_threshold_deg_s > 0, "ivt_velocity_threshold_deg_s must be positive");
  require(ivt_window_ms > 0, "ivt_window_ms must be positive");
  require(ivt_merge_max_angle_deg > 0, "ivt_merge_max_angle_deg must be positive");
  require(min_fixation_ms > 0, "min_fixation_ms must be positive");
  require(visit_excursion_tolerance_ms >= 0, "visit_excursion_tolerance_ms must be non-negative");
  require(min_segment_ms > 0, "min_segment_ms must be positive");
  require(wavelet_order >= 1 && wavelet_order <= kMaxDaubechiesOrder,
          "wavelet_order must lie in [1, " + std::to_string(kMaxDaubechiesOrder) + "]");
  if (screen) {
    require(screen->width_px > 0 && screen->height_px > 0 && screen->width_mm > 0 && screen->height_mm > 0 &&
                screen->viewing_distance_mm > 0,
            "screen geometry values must be positive");
  }
}

std::map<std::string, std::string> RunConfig::to_key_values() const {
  std::map<std::string, std::string> kv;
  kv["sample_rate_hz"] = std::to_string(sample_rate_hz);
  kv["analysis_start_ms"] = std::to_string(analysis_start_ms);
  kv["analysis_end_ms"] = std::to_string(analysis_end_ms);
  kv["max_gap_fill_ms"] = real_text(max_gap_fill_ms);
  kv["ivt_velocity_threshold_deg_s"] = real_text(ivt_velocity_threshold_deg_s);
  kv["ivt_window_ms"] = real_text(ivt_window_ms);
  kv["ivt_merge_max_angle_deg"] = real_text(ivt_merge_max_angle_deg);
  kv["min_fixation_ms"] = real_text(min_fixation_ms);
  kv["visit_excursion_tolerance_ms"] = real_text(visit_excursion_tolerance_ms);
  kv["wavelet_order"] = std::to_string(wavelet_order);
  kv["min_segment_ms"] = real_text(min_segment_ms);
  if (screen) {
    kv["screen_width_px"] = real_text(screen->width_px);
    kv["screen_height_px"] = real_text(screen->height_px);
    kv["screen_width_mm"] = real_text(screen->width_mm);
    kv["screen_height_mm"] = real_text(screen->height_mm);
    kv["viewing_distance_mm"] = real_text(screen->viewing_distance_mm);
  }
  return kv;
}

RunConfig parse_config(std::string_view text) {
  RunConfig cfg;
  ScreenGeometry screen;
  int screen_keys = 0;

  using Setter = std::function<void(std::string_view, std::string_view)>;
  const std::map<std::string, Setter, std::less<>> setters = {
      {"sample_rate_hz", [&](auto k, auto v) { cfg.sample_rate_hz = parse_int(k, v); }},
      {"analysis_start_ms", [&](auto k, auto v) { cfg.analysis_start_ms = parse_int(k, v); }},
      {"analysis_end_ms", [&](auto k, auto v) { cfg.analysis_end_ms = parse_int(k, v); }},
      {"max_gap_fill_ms", [&](auto k, auto v) { cfg.max_gap_fill_ms = parse_real(k, v); }},
      {"ivt_velocity_threshold_deg_s", [&](auto k, auto v) { cfg.ivt_velocity_threshold_deg_s = parse_real(k, v); }},
      {"ivt_window_ms", [&](auto k, auto v) { cfg.ivt_window_ms = parse_real(k, v); }},
      {"ivt_merge_max_angle_deg", [&](auto k, auto v) { cfg.ivt_merge_max_angle_deg = parse_real(k, v); }},
      {"min_fixation_ms", [&](auto k, auto v) { cfg.min_fixation_ms = parse_real(k, v); }},
      {"visit_excursion_tolerance_ms", [&](auto k, auto v) { cfg.visit_excursion_tolerance_ms = parse_real(k, v); }},
      {"wavelet_order", [&](auto k, auto v) { cfg.wavelet_order = parse_int(k, v); }},
      {"min_segment_ms", [&](auto k, auto v) { cfg.min_segment_ms = parse_real(k, v); }},
      {"screen_width_px", [&](auto k, auto v) { screen.width_px = parse_real(k, v); ++screen_keys; }},
      {"screen_height_px", [&](auto k, auto v) { screen.height_px = parse_real(k, v); ++screen_keys; }},
      {"screen_width_mm", [&](auto k, auto v) { screen.width_mm = parse_real(k, v); ++screen_keys; }},
      {"screen_height_mm", [&](auto k, auto v) { screen.height_mm = parse_real(k, v); ++screen_keys; }},
      {"viewing_distance_mm", [&](auto k, auto v) { screen.viewing_distance_mm = parse_real(k, v); ++screen_keys; }},
  };

  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const auto raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    const auto line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
    }
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + std::string(key) + "'");
    }
    it->second(key, value);
  }

  if (screen_keys == 5) {
    cfg.screen = screen;
  } else if (screen_keys != 0) {
    throw ConfigError("screen geometry needs all of screen_width_px, screen_height_px, screen_width_mm, "
                      "screen_height_mm and viewing_distance_mm");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

}  // namespace gazemetrics
