#include "gazemetrics/ivt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gazemetrics/error.hpp"
#include "gazemetrics/preprocess.hpp"

namespace gazemetrics {

namespace {

struct Candidate {
  std::size_t first = 0;
  std::size_t last = 0;
  double sum_x = 0.0;
  double sum_y = 0.0;
  std::size_t count = 0;

  double cx() const { return sum_x / static_cast<double>(count); }
  double cy() const { return sum_y / static_cast<double>(count); }
};

}  // namespace

double visual_angle_deg(double dx_px, double dy_px, const ScreenGeometry& screen) {
  const double s_mm = std::hypot(dx_px * screen.mm_per_px_x(), dy_px * screen.mm_per_px_y());
  return 2.0 * std::atan(s_mm / (2.0 * screen.viewing_distance_mm)) * 180.0 / std::numbers::pi;
}

std::int64_t grid_end_time_us(std::span<const GazeSample> grid, std::size_t index, double dt_us) {
  return grid.front().t_us + static_cast<std::int64_t>(std::llround(static_cast<double>(index + 1) * dt_us));
}

std::vector<std::optional<double>> angular_velocity(std::span<const GazeSample> samples, const RunConfig& config) {
  if (!config.screen) throw MissingGeometry("velocity needs screen size in px and mm and the viewing distance");
  const auto& screen = *config.screen;
  const std::size_t n = samples.size();
  const auto half = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(config.ivt_window_ms * 0.5 * config.sample_rate_hz / 1000.0)));

  std::vector<std::optional<double>> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!samples[i].has_gaze()) continue;
    std::size_t lo = i >= half ? i - half : 0;
    std::size_t hi = std::min(n - 1, i + half);
    while (lo < i && !samples[lo].has_gaze()) ++lo;
    while (hi > i && !samples[hi].has_gaze()) --hi;
    if (lo == hi) continue;
    const double angle = visual_angle_deg(*samples[hi].gaze_x_px - *samples[lo].gaze_x_px,
                                          *samples[hi].gaze_y_px - *samples[lo].gaze_y_px, screen);
    const double dt_s = static_cast<double>(samples[hi].t_us - samples[lo].t_us) * 1e-6;
    v[i] = angle / dt_s;
  }
  return v;
}

Classification classify(std::span<const GazeSample> samples, std::span<const std::optional<double>> velocities,
                        const RunConfig& config) {
  if (!config.screen) throw MissingGeometry("fixation merging needs screen geometry");
  const std::size_t n = samples.size();
  const double dt = config.sample_period_us();
  Classification out;
  out.labels.assign(n, SampleLabel{});
  if (n == 0) return out;

  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& vel = velocities[i];
    if (!vel) continue;
    if (*vel >= config.ivt_velocity_threshold_deg_s) {
      out.labels[i].kind = SampleClass::Saccade;
      continue;
    }
    if (candidates.empty() || candidates.back().last + 1 != i) candidates.push_back({i, i, 0.0, 0.0, 0});
    auto& c = candidates.back();
    c.last = i;
    c.sum_x += *samples[i].gaze_x_px;
    c.sum_y += *samples[i].gaze_y_px;
    ++c.count;
  }

  std::vector<Candidate> merged;
  for (const auto& c : candidates) {
    if (!merged.empty()) {
      auto& prev = merged.back();
      const auto between_us = samples[c.first].t_us - grid_end_time_us(samples, prev.last, dt);
      const double angle = visual_angle_deg(c.cx() - prev.cx(), c.cy() - prev.cy(), *config.screen);
      if (static_cast<double>(between_us) < config.max_gap_fill_ms * 1000.0 && angle < config.ivt_merge_max_angle_deg) {
        prev.last = c.last;
        prev.sum_x += c.sum_x;
        prev.sum_y += c.sum_y;
        prev.count += c.count;
        continue;
      }
    }
    merged.push_back(c);
  }

  // Below-threshold samples that do not end up in a fixation count as saccade.
  for (const auto& c : candidates) {
    for (std::size_t i = c.first; i <= c.last; ++i) out.labels[i].kind = SampleClass::Saccade;
  }

  for (const auto& c : merged) {
    FixationEvent e;
    e.first_sample = c.first;
    e.last_sample = c.last;
    e.start_us = samples[c.first].t_us;
    e.end_us = grid_end_time_us(samples, c.last, dt);
    e.centroid_x_px = c.cx();
    e.centroid_y_px = c.cy();
    if (static_cast<double>(e.end_us - e.start_us) < config.min_fixation_ms * 1000.0) continue;
    const int id = static_cast<int>(out.fixations.size());
    // A bridged hole keeps its Gap label while the fixation spans across it.
    for (std::size_t i = c.first; i <= c.last; ++i) {
      if (velocities[i]) out.labels[i] = {SampleClass::Fixation, id};
    }
    out.fixations.push_back(e);
  }
  return out;
}

std::vector<FixationEvent> window_fixations(std::span<const FixationEvent> fixations, std::span<const GazeSample> grid,
                                            const RunConfig& config) {
  const auto w = window_bounds(config);
  std::vector<FixationEvent> out;
  for (auto f : fixations) {
    if (f.first_sample < w.begin || f.first_sample >= w.end) continue;
    if (f.last_sample >= w.end) {
      // The centroid stays that of the whole fixation.
      f.last_sample = w.end - 1;
      f.end_us = grid_end_time_us(grid, f.last_sample, config.sample_period_us());
    }
    out.push_back(f);
  }
  return out;
}

}  // namespace gazemetrics
