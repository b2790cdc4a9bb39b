#include "gazemetrics/aoi.hpp"

#include <algorithm>
#include <cmath>

namespace gazemetrics {

namespace {

bool on_edge(Point p, Point a, Point b) {
  const double cross = (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
  const double scale = std::max({std::abs(b.x - a.x), std::abs(b.y - a.y), 1.0});
  if (std::abs(cross) > 1e-9 * scale * scale) return false;
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

}  // namespace

bool polygon_contains(std::span<const Point> v, Point p) {
  const std::size_t n = v.size();
  if (n < 3) return false;
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if (on_edge(p, v[j], v[i])) return true;
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      const double x_cross = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

std::optional<AoiName> point_in_aoi(double x_px, double y_px, std::span<const AoiPolygon> polygons) {
  for (const auto& poly : polygons) {
    if (polygon_contains(poly.vertices, {x_px, y_px})) return poly.aoi_name;
  }
  return std::nullopt;
}

Point polygon_centroid(std::span<const Point> v) {
  double a2 = 0.0, cx = 0.0, cy = 0.0;
  for (std::size_t i = 0, n = v.size(); i < n; ++i) {
    const Point p = v[i];
    const Point q = v[(i + 1) % n];
    const double w = p.x * q.y - q.x * p.y;
    a2 += w;
    cx += (p.x + q.x) * w;
    cy += (p.y + q.y) * w;
  }
  if (a2 == 0.0) {
    Point mean;
    for (const auto& p : v) {
      mean.x += p.x / static_cast<double>(v.size());
      mean.y += p.y / static_cast<double>(v.size());
    }
    return mean;
  }
  return {cx / (3.0 * a2), cy / (3.0 * a2)};
}

std::vector<AoiLabel> map_samples(std::span<const GazeSample> samples, std::span<const AoiPolygon> polygons) {
  std::vector<AoiLabel> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].has_gaze()) out[i] = point_in_aoi(*samples[i].gaze_x_px, *samples[i].gaze_y_px, polygons);
  }
  return out;
}

std::vector<AoiVisit> build_visits_from_labels(std::span<const AoiLabel> labels, std::int64_t t0_us, double dt_us,
                                               double tolerance_ms) {
  struct Run {
    AoiLabel label;
    std::size_t begin;
    std::size_t end;
  };
  std::vector<Run> runs;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (runs.empty() || runs.back().label != labels[i]) {
      runs.push_back({labels[i], i, i + 1});
    } else {
      runs.back().end = i + 1;
    }
  }

  const double tolerance_us = tolerance_ms * 1000.0;
  const auto time_at = [&](std::size_t k) {
    return t0_us + static_cast<std::int64_t>(std::llround(static_cast<double>(k) * dt_us));
  };

  std::vector<AoiVisit> visits;
  std::size_t i = 0;
  while (i < runs.size()) {
    if (!runs[i].label) {
      ++i;
      continue;
    }
    const AoiName aoi = *runs[i].label;
    std::size_t last = i;
    for (std::size_t k = i + 1; k < runs.size(); ++k) {
      const double gap_us = static_cast<double>(runs[k].begin - runs[last].end) * dt_us;
      if (gap_us >= tolerance_us) break;
      if (runs[k].label == aoi) last = k;
    }
    visits.push_back({aoi, time_at(runs[i].begin), time_at(runs[last].end), runs[i].begin, runs[last].end});
    i = last + 1;
  }
  return visits;
}

std::vector<AoiVisit> build_visits(std::span<const GazeSample> samples, std::span<const AoiPolygon> polygons,
                                   const RunConfig& config) {
  if (samples.empty()) return {};
  const auto labels = map_samples(samples, polygons);
  return build_visits_from_labels(labels, samples.front().t_us, config.sample_period_us(),
                                  config.visit_excursion_tolerance_ms);
}

std::map<AoiName, AoiMetrics> traditional_metrics(std::span<const FixationEvent> fixations,
                                                  std::span<const AoiPolygon> polygons) {
  std::map<AoiName, AoiMetrics> out;
  for (const auto& p : polygons) out[p.aoi_name].aoi_name = p.aoi_name;
  for (const auto& f : fixations) {
    const auto aoi = point_in_aoi(f.centroid_x_px, f.centroid_y_px, polygons);
    if (!aoi) continue;
    auto& m = out[*aoi];
    ++m.fixation_count;
    m.gaze_duration_ms += f.duration_ms();
  }
  return out;
}

}  // namespace gazemetrics
