#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "gazemetrics/config.hpp"
#include "gazemetrics/types.hpp"

namespace gazemetrics {

enum class Provenance : std::uint8_t {
  Measured,
  GapFilled,     // short interior gap, bridged before the long-gap pass
  Interpolated,  // remaining interior gap
  Extrapolated,  // leading or trailing gap, nearest-value extension
  Missing,
};

std::string_view to_string(Provenance p);

// Diameter sequence on a uniform grid. Missing samples hold NaN and carry
// Provenance::Missing.
struct SparseSeries {
  std::int64_t t0_us = 0;
  double dt_us = 0.0;
  std::vector<double> d;
  std::vector<Provenance> provenance;

  std::size_t size() const { return d.size(); }
  bool is_missing(std::size_t i) const { return provenance[i] == Provenance::Missing; }
};

// Dense, finite diameter signal for one trial or one window of it.
struct PupilSeries {
  std::int64_t t0_us = 0;
  double dt_us = 0.0;
  std::vector<double> d;
  std::vector<Provenance> provenance;

  std::size_t size() const { return d.size(); }
  double duration_s() const { return static_cast<double>(d.size()) * dt_us * 1e-6; }
  double sample_rate_hz() const { return 1e6 / dt_us; }
  double time_us(std::size_t i) const { return static_cast<double>(t0_us) + static_cast<double>(i) * dt_us; }

  PupilSeries slice(std::size_t begin, std::size_t end) const;
};

// Places samples on the nominal grid t0 + k * dt. Slots without a sample
// become fully missing samples; a second sample landing on a slot is dropped.
std::vector<GazeSample> align_to_grid(std::span<const GazeSample> samples, int sample_rate_hz);

// Mean of both valid eyes, the single valid eye otherwise, missing when neither.
// Expects samples already on the uniform grid.
SparseSeries combine_eyes(std::span<const GazeSample> grid, int sample_rate_hz);
SparseSeries combine_eyes(const TrialRecord& trial, int sample_rate_hz);

SparseSeries fill_gaps(const SparseSeries& series, double max_gap_fill_ms);

// Throws AllMissing when no sample is present.
PupilSeries interpolate_remaining(const SparseSeries& series);

SparseSeries to_sparse(const PupilSeries& series);

// Half-open sample index range [begin, end) of the analysis window, measured
// from the first grid sample (stimulus onset).
struct WindowBounds {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

WindowBounds window_bounds(const RunConfig& config);

// Throws WindowOutOfRange when the series ends before the window does.
PupilSeries extract_window(const PupilSeries& series, const RunConfig& config);

// Whole chain for one trial: grid, combine, fill, interpolate, window.
// Throws AllMissing when the window holds no measured pupil sample.
PupilSeries preprocess_trial(std::span<const GazeSample> grid, const RunConfig& config);

}  // namespace gazemetrics
