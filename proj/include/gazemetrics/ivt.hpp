#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gazemetrics/config.hpp"
#include "gazemetrics/types.hpp"

namespace gazemetrics {

struct FixationEvent {
  std::int64_t start_us = 0;
  std::int64_t end_us = 0;  // exclusive: last sample time plus one period
  double centroid_x_px = 0.0;
  double centroid_y_px = 0.0;
  std::size_t first_sample = 0;
  std::size_t last_sample = 0;  // inclusive

  double duration_ms() const { return static_cast<double>(end_us - start_us) / 1000.0; }
  bool operator==(const FixationEvent&) const = default;
};

enum class SampleClass : std::uint8_t { Fixation, Saccade, Gap };

struct SampleLabel {
  SampleClass kind = SampleClass::Gap;
  int fixation_id = -1;  // index into Classification::fixations when kind == Fixation
  bool operator==(const SampleLabel&) const = default;
};

struct Classification {
  std::vector<FixationEvent> fixations;
  std::vector<SampleLabel> labels;
};

// Visual angle in degrees subtended by an on-screen displacement, planar model.
double visual_angle_deg(double dx_px, double dy_px, const ScreenGeometry& screen);

// Velocity in deg/s, or nullopt where the sample has no gaze or the window
// holds no second gaze sample. Samples must lie on a uniform grid. Throws
// MissingGeometry when the config has no screen geometry.
std::vector<std::optional<double>> angular_velocity(std::span<const GazeSample> samples,
                                                    const RunConfig& config);

Classification classify(std::span<const GazeSample> samples,
                        std::span<const std::optional<double>> velocities, const RunConfig& config);

// Drops fixations whose first sample precedes the analysis window or lies at
// or after its end, and clips the rest at the window end. `grid` is the
// sample stream the fixations were classified on.
std::vector<FixationEvent> window_fixations(std::span<const FixationEvent> fixations,
                                            std::span<const GazeSample> grid, const RunConfig& config);

// Exclusive end time of grid sample `index`: the nominal time of the next slot.
std::int64_t grid_end_time_us(std::span<const GazeSample> grid, std::size_t index, double dt_us);

}  // namespace gazemetrics
