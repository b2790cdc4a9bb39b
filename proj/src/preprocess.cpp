#include "gazemetrics/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gazemetrics/error.hpp"

namespace gazemetrics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::int64_t nominal_time(std::int64_t t0, std::size_t k, double dt_us) {
  return t0 + static_cast<std::int64_t>(std::llround(static_cast<double>(k) * dt_us));
}

// Calls fn(first, last) for each maximal run of missing samples, inclusive.
template <typename Fn>
void for_each_missing_run(const SparseSeries& s, Fn&& fn) {
  const std::size_t n = s.size();
  std::size_t i = 0;
  while (i < n) {
    if (!s.is_missing(i)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && s.is_missing(j + 1)) ++j;
    fn(i, j);
    i = j + 1;
  }
}

void bridge(SparseSeries& s, std::size_t first, std::size_t last, Provenance flag) {
  const std::size_t left = first - 1;
  const std::size_t right = last + 1;
  const double a = s.d[left];
  const double b = s.d[right];
  const double span = static_cast<double>(right - left);
  for (std::size_t i = first; i <= last; ++i) {
    s.d[i] = a + (b - a) * (static_cast<double>(i - left) / span);
    s.provenance[i] = flag;
  }
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Measured: return "measured";
    case Provenance::GapFilled: return "gap_filled";
    case Provenance::Interpolated: return "interpolated";
    case Provenance::Extrapolated: return "extrapolated";
    case Provenance::Missing: return "missing";
  }
  return "missing";
}

PupilSeries PupilSeries::slice(std::size_t begin, std::size_t end) const {
  PupilSeries out;
  out.t0_us = nominal_time(t0_us, begin, dt_us);
  out.dt_us = dt_us;
  out.d.assign(d.begin() + static_cast<std::ptrdiff_t>(begin), d.begin() + static_cast<std::ptrdiff_t>(end));
  out.provenance.assign(provenance.begin() + static_cast<std::ptrdiff_t>(begin),
                        provenance.begin() + static_cast<std::ptrdiff_t>(end));
  return out;
}

std::vector<GazeSample> align_to_grid(std::span<const GazeSample> samples, int sample_rate_hz) {
  if (samples.empty()) return {};
  const double dt = 1e6 / sample_rate_hz;
  const std::int64_t t0 = samples.front().t_us;
  const auto slot_of = [&](std::int64_t t) {
    return static_cast<std::size_t>(std::llround(static_cast<double>(t - t0) / dt));
  };
  const std::size_t n = slot_of(samples.back().t_us) + 1;

  std::vector<GazeSample> grid(n);
  std::vector<bool> taken(n, false);
  for (std::size_t k = 0; k < n; ++k) grid[k].t_us = nominal_time(t0, k, dt);
  for (const auto& s : samples) {
    const std::size_t k = slot_of(s.t_us);
    if (taken[k]) continue;
    taken[k] = true;
    const auto t = grid[k].t_us;
    grid[k] = s;
    grid[k].t_us = t;
  }
  return grid;
}

SparseSeries combine_eyes(std::span<const GazeSample> grid, int sample_rate_hz) {
  SparseSeries out;
  out.dt_us = 1e6 / sample_rate_hz;
  out.t0_us = grid.empty() ? 0 : grid.front().t_us;
  out.d.resize(grid.size(), kNaN);
  out.provenance.resize(grid.size(), Provenance::Missing);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto& s = grid[i];
    const bool left = s.valid_left && s.pupil_left_mm;
    const bool right = s.valid_right && s.pupil_right_mm;
    if (left && right) {
      out.d[i] = 0.5 * (*s.pupil_left_mm + *s.pupil_right_mm);
    } else if (left) {
      out.d[i] = *s.pupil_left_mm;
    } else if (right) {
      out.d[i] = *s.pupil_right_mm;
    } else {
      continue;
    }
    out.provenance[i] = Provenance::Measured;
  }
  return out;
}

SparseSeries combine_eyes(const TrialRecord& trial, int sample_rate_hz) {
  const auto grid = align_to_grid(trial.samples, sample_rate_hz);
  return combine_eyes(grid, sample_rate_hz);
}

SparseSeries fill_gaps(const SparseSeries& series, double max_gap_fill_ms) {
  SparseSeries out = series;
  const double limit_us = max_gap_fill_ms * 1000.0;
  for_each_missing_run(series, [&](std::size_t first, std::size_t last) {
    if (first == 0 || last + 1 == series.size()) return;
    const double duration_us = static_cast<double>(last - first + 1) * series.dt_us;
    if (duration_us <= limit_us * (1.0 + 1e-12)) bridge(out, first, last, Provenance::GapFilled);
  });
  return out;
}

PupilSeries interpolate_remaining(const SparseSeries& series) {
  const std::size_t n = series.size();
  std::size_t first_present = n;
  std::size_t last_present = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!series.is_missing(i)) {
      if (first_present == n) first_present = i;
      last_present = i;
    }
  }
  if (first_present == n) throw AllMissing("no valid pupil sample to interpolate from");

  SparseSeries work = series;
  for_each_missing_run(series, [&](std::size_t first, std::size_t last) {
    if (first == 0 || last + 1 == n) {
      const double fill = first == 0 ? series.d[first_present] : series.d[last_present];
      for (std::size_t i = first; i <= last; ++i) {
        work.d[i] = fill;
        work.provenance[i] = Provenance::Extrapolated;
      }
    } else {
      bridge(work, first, last, Provenance::Interpolated);
    }
  });

  PupilSeries out;
  out.t0_us = work.t0_us;
  out.dt_us = work.dt_us;
  out.d = std::move(work.d);
  out.provenance = std::move(work.provenance);
  return out;
}

SparseSeries to_sparse(const PupilSeries& series) {
  SparseSeries out;
  out.t0_us = series.t0_us;
  out.dt_us = series.dt_us;
  out.d = series.d;
  out.provenance = series.provenance;
  return out;
}

WindowBounds window_bounds(const RunConfig& config) {
  const auto first_index_at_or_after = [&](int ms) {
    const long long scaled = static_cast<long long>(ms) * config.sample_rate_hz;
    return static_cast<std::size_t>((scaled + 999) / 1000);
  };
  return {first_index_at_or_after(config.analysis_start_ms), first_index_at_or_after(config.analysis_end_ms)};
}

PupilSeries extract_window(const PupilSeries& series, const RunConfig& config) {
  const auto w = window_bounds(config);
  if (series.size() < w.end) {
    throw WindowOutOfRange("series has " + std::to_string(series.size()) + " samples, the analysis window ends at " +
                           std::to_string(w.end));
  }
  return series.slice(w.begin, w.end);
}

PupilSeries preprocess_trial(std::span<const GazeSample> grid, const RunConfig& config) {
  const auto w = window_bounds(config);
  if (grid.size() < w.end) {
    throw WindowOutOfRange("trial lasts " + std::to_string(grid.size()) + " samples, the analysis window ends at " +
                           std::to_string(w.end));
  }
  const auto filled = fill_gaps(combine_eyes(grid, config.sample_rate_hz), config.max_gap_fill_ms);
  const auto measured_in_window =
      std::any_of(filled.provenance.begin() + static_cast<std::ptrdiff_t>(w.begin),
                  filled.provenance.begin() + static_cast<std::ptrdiff_t>(w.end),
                  [](Provenance p) { return p == Provenance::Measured; });
  if (!measured_in_window) throw AllMissing("no valid pupil sample inside the analysis window");
  return extract_window(interpolate_remaining(filled), config);
}

}  // namespace gazemetrics
