#include "gazemetrics/types.hpp"

#include <algorithm>

namespace gazemetrics {

namespace {

constexpr std::array<std::string_view, kAoiCount> kAoiDisplayNames = {
    "Right Eye",
    "Left Eye",
    "Region between Eyebrows",
    "Forehead",
    "Mouth",
    "Right Nasolabial Groove",
    "Left Nasolabial Groove",
    "Chin",
    "Right Eyebrow",
    "Left Eyebrow",
    "Nose",
    "Right Cheek",
    "Left Cheek",
};

}  // namespace

std::string_view to_string(Group g) { return g == Group::Expert ? "Expert" : "NonExpert"; }

std::string_view to_string(PainLabel p) { return p == PainLabel::Rest ? "Rest" : "Pain"; }

std::optional<Group> parse_group(std::string_view s) {
  if (s == "Expert") return Group::Expert;
  if (s == "NonExpert") return Group::NonExpert;
  return std::nullopt;
}

std::optional<PainLabel> parse_pain_label(std::string_view s) {
  if (s == "Rest") return PainLabel::Rest;
  if (s == "Pain") return PainLabel::Pain;
  return std::nullopt;
}

const std::array<AoiName, kAoiCount>& all_aoi_names() {
  static const std::array<AoiName, kAoiCount> names = [] {
    std::array<AoiName, kAoiCount> out{};
    for (std::size_t i = 0; i < kAoiCount; ++i) out[i] = static_cast<AoiName>(i);
    return out;
  }();
  return names;
}

const std::array<AoiName, kAoiCount>& aoi_names_alphabetical() {
  static const std::array<AoiName, kAoiCount> names = [] {
    auto out = all_aoi_names();
    std::sort(out.begin(), out.end(), AoiAlphabetical{});
    return out;
  }();
  return names;
}

std::string_view to_string(AoiName a) { return kAoiDisplayNames[static_cast<std::size_t>(a)]; }

std::optional<AoiName> parse_aoi_name(std::string_view s) {
  for (std::size_t i = 0; i < kAoiCount; ++i) {
    if (kAoiDisplayNames[i] == s) return static_cast<AoiName>(i);
  }
  return std::nullopt;
}

}  // namespace gazemetrics
