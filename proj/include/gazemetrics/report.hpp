#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gazemetrics/aoi.hpp"
#include "gazemetrics/config.hpp"
#include "gazemetrics/ivt.hpp"
#include "gazemetrics/pipeline.hpp"
#include "gazemetrics/preprocess.hpp"
#include "gazemetrics/stats.hpp"
#include "gazemetrics/text.hpp"

namespace gazemetrics {

inline constexpr std::string_view kToolVersion = "0.1.0";
inline constexpr std::string_view kObservationUnit =
    "one observation per (participant, stimulus, AOI) with at least one usable visit";

void write_metrics_csv(std::ostream& out, std::span<const MetricRow> rows);
std::vector<MetricRow> read_metrics_csv(std::istream& in);

std::string regression_json(const GroupAoiRegression& regression, std::string_view pain_label_filter);

// Colour of the two-colour ramp at value v in [0, 1], as "#rrggbb".
std::string ramp_color(double v);
inline constexpr std::string_view kRampLight = "#f7fbff";
inline constexpr std::string_view kRampDark = "#08306b";

// AOIs without a value are drawn grey and tagged `nodata`.
std::string render_map(std::span<const AoiPolygon> polygons, const std::map<AoiName, double>& values,
                       std::string_view title);

std::string sha256_hex(std::string_view data);

// Debug dumps.
void write_series_csv(std::ostream& out, const PupilSeries& series);
void write_fixations_csv(std::ostream& out, std::span<const FixationEvent> events);
void write_visits_csv(std::ostream& out, std::span<const AoiVisit> visits);

struct InputDigest {
  std::string role;
  std::string path;
  std::string sha256;
};

// Everything but `generated_at` is a pure function of the inputs.
std::string manifest_json(const RunConfig& config, std::span<const InputDigest> inputs,
                          const std::vector<TrialRecord>& trials, const std::vector<TrialResult>& results,
                          std::string_view pain_label_filter, std::string_view generated_at);

}  // namespace gazemetrics
