#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gazemetrics/config.hpp"
#include "gazemetrics/types.hpp"

namespace gazemetrics {

// Pupil diameters outside this open interval are kept but marked invalid.
inline constexpr double kPupilMinMm = 0.5;
inline constexpr double kPupilMaxMm = 12.0;

// Column order of the session TSV. The header must match it exactly.
inline constexpr std::string_view kSessionColumns[] = {
    "participant_id", "group",     "stimulus_id",   "pain_label",     "rating",     "t_us",
    "gaze_x_px",      "gaze_y_px", "pupil_left_mm", "pupil_right_mm", "valid_left", "valid_right",
};

// One TrialRecord per contiguous (participant, stimulus) block, in file order.
std::vector<TrialRecord> parse_session(std::istream& in);
std::vector<TrialRecord> load_session(const std::filesystem::path& path, const RunConfig& config);

// Writes values with round-trip precision; reloading yields identical records.
void write_session(std::ostream& out, const std::vector<TrialRecord>& trials);

using AoiLayout = std::map<std::string, std::vector<AoiPolygon>>;

// Polygons keep their declaration order within each stimulus; that order is
// the overlap tie-break used by point_in_aoi.
AoiLayout parse_aois(std::string_view json_text);
AoiLayout load_aois(const std::filesystem::path& path);
std::string aois_to_json(const AoiLayout& layout);

std::string read_file(const std::filesystem::path& path);

}  // namespace gazemetrics
