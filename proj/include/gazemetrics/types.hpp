#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gazemetrics {

enum class Group { Expert, NonExpert };
enum class PainLabel { Rest, Pain };

std::string_view to_string(Group g);
std::string_view to_string(PainLabel p);
std::optional<Group> parse_group(std::string_view s);
std::optional<PainLabel> parse_pain_label(std::string_view s);

// The thirteen facial regions. The set is closed; configuration cannot extend it.
enum class AoiName {
  RightEye,
  LeftEye,
  RegionBetweenEyebrows,
  Forehead,
  Mouth,
  RightNasolabialGroove,
  LeftNasolabialGroove,
  Chin,
  RightEyebrow,
  LeftEyebrow,
  Nose,
  RightCheek,
  LeftCheek,
};

inline constexpr std::size_t kAoiCount = 13;

// Declaration order above; use aoi_names_alphabetical() for sorted output.
const std::array<AoiName, kAoiCount>& all_aoi_names();
const std::array<AoiName, kAoiCount>& aoi_names_alphabetical();
std::string_view to_string(AoiName a);
std::optional<AoiName> parse_aoi_name(std::string_view s);

// Orders AOIs by display name, which is the order used in every output.
struct AoiAlphabetical {
  bool operator()(AoiName a, AoiName b) const { return to_string(a) < to_string(b); }
};

struct GazeSample {
  std::int64_t t_us = 0;
  std::optional<double> gaze_x_px;
  std::optional<double> gaze_y_px;
  std::optional<double> pupil_left_mm;
  std::optional<double> pupil_right_mm;
  bool valid_left = false;
  bool valid_right = false;

  bool has_gaze() const { return gaze_x_px.has_value() && gaze_y_px.has_value(); }
  bool operator==(const GazeSample&) const = default;
};

struct TrialRecord {
  std::string participant_id;
  Group group = Group::Expert;
  std::string stimulus_id;
  PainLabel pain_label = PainLabel::Rest;
  int rating = 0;
  std::vector<GazeSample> samples;

  bool operator==(const TrialRecord&) const = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

struct AoiPolygon {
  std::string stimulus_id;
  AoiName aoi_name = AoiName::Nose;
  std::vector<Point> vertices;
};

}  // namespace gazemetrics
