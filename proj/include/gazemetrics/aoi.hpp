#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "gazemetrics/config.hpp"
#include "gazemetrics/ivt.hpp"
#include "gazemetrics/types.hpp"

namespace gazemetrics {

struct AoiVisit {
  AoiName aoi_name = AoiName::Nose;
  std::int64_t start_us = 0;
  std::int64_t end_us = 0;  // exclusive
  std::size_t begin = 0;    // sample index range [begin, end) into the scanned span
  std::size_t end = 0;

  std::size_t n_samples() const { return end - begin; }
  bool operator==(const AoiVisit&) const = default;
};

struct AoiMetrics {
  AoiName aoi_name = AoiName::Nose;
  int fixation_count = 0;
  double gaze_duration_ms = 0.0;
  int visit_count = 0;
};

// Even-odd containment with boundary points counted inside. Overlaps resolve
// to the first polygon in declaration order.
bool polygon_contains(std::span<const Point> vertices, Point p);
std::optional<AoiName> point_in_aoi(double x_px, double y_px, std::span<const AoiPolygon> polygons);

// Area centroid; falls back to the vertex mean for zero-area input.
Point polygon_centroid(std::span<const Point> vertices);

using AoiLabel = std::optional<AoiName>;

std::vector<AoiLabel> map_samples(std::span<const GazeSample> samples, std::span<const AoiPolygon> polygons);

// Visits over a per-sample label stream on a uniform grid starting at t0_us.
// An interruption (other AOI or none) shorter than the tolerance between two
// runs of the same AOI is absorbed into the enclosing visit.
std::vector<AoiVisit> build_visits_from_labels(std::span<const AoiLabel> labels, std::int64_t t0_us,
                                               double dt_us, double tolerance_ms);

std::vector<AoiVisit> build_visits(std::span<const GazeSample> samples, std::span<const AoiPolygon> polygons,
                                   const RunConfig& config);

// Per-AOI fixation count and gaze duration by fixation centroid. Every AOI of
// the stimulus is present in the result, zero when nothing lands in it.
// visit_count is left at zero for the caller to fill.
std::map<AoiName, AoiMetrics> traditional_metrics(std::span<const FixationEvent> fixations,
                                                  std::span<const AoiPolygon> polygons);

}  // namespace gazemetrics
