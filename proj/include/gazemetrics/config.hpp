#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace gazemetrics {

struct ScreenGeometry {
  double width_px = 0.0;
  double height_px = 0.0;
  double width_mm = 0.0;
  double height_mm = 0.0;
  double viewing_distance_mm = 0.0;

  double mm_per_px_x() const { return width_mm / width_px; }
  double mm_per_px_y() const { return height_mm / height_px; }
};

struct RunConfig {
  int sample_rate_hz = 300;
  int analysis_start_ms = 300;
  int analysis_end_ms = 2000;
  double max_gap_fill_ms = 75.0;
  double ivt_velocity_threshold_deg_s = 30.0;
  double ivt_window_ms = 20.0;
  double ivt_merge_max_angle_deg = 0.5;
  double min_fixation_ms = 60.0;
  double visit_excursion_tolerance_ms = 75.0;
  int wavelet_order = 21;
  double min_segment_ms = 126.0;
  // Absent until configured; velocity computation refuses to guess it.
  std::optional<ScreenGeometry> screen;

  double sample_period_us() const { return 1e6 / sample_rate_hz; }
  std::size_t wavelet_filter_length() const { return 2 * static_cast<std::size_t>(wavelet_order); }

  // Throws ConfigError when an invariant is violated.
  void validate() const;

  // Flat key/value view, in a fixed key order, for manifests.
  std::map<std::string, std::string> to_key_values() const;
};

// Parses `key = value` lines. Blank lines and lines starting with '#' are
// ignored. Unknown keys, duplicates and malformed values are ConfigErrors.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace gazemetrics
