#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gazemetrics/error.hpp"
#include "gazemetrics/preprocess.hpp"

using namespace gazemetrics;

namespace {

constexpr double kGap = std::numeric_limits<double>::quiet_NaN();

SparseSeries sparse(const std::vector<double>& d, double rate = 300.0) {
  SparseSeries s;
  s.dt_us = 1e6 / rate;
  s.d = d;
  for (double v : d) s.provenance.push_back(std::isnan(v) ? Provenance::Missing : Provenance::Measured);
  return s;
}

bool same(const SparseSeries& a, const SparseSeries& b) {
  if (a.size() != b.size() || a.provenance != b.provenance) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::isnan(a.d[i]) != std::isnan(b.d[i])) return false;
    if (!std::isnan(a.d[i]) && a.d[i] != b.d[i]) return false;
  }
  return true;
}

SparseSeries random_sparse(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> value(2.0, 6.0);
  std::uniform_int_distribution<int> run(1, 60);
  std::bernoulli_distribution lost(0.3);
  std::vector<double> d;
  while (d.size() < n) {
    const bool gap = lost(rng);
    const int len = run(rng);
    for (int k = 0; k < len && d.size() < n; ++k) d.push_back(gap ? kGap : value(rng));
  }
  return sparse(d);
}

std::vector<GazeSample> grid_samples(std::size_t n, double pupil) {
  std::vector<GazeSample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].t_us = static_cast<std::int64_t>(std::llround(static_cast<double>(i) * 1e6 / 300.0));
    out[i].gaze_x_px = 100.0;
    out[i].gaze_y_px = 100.0;
    out[i].pupil_left_mm = out[i].pupil_right_mm = pupil;
    out[i].valid_left = out[i].valid_right = true;
  }
  return out;
}

}  // namespace

TEST(CombineEyes, MeanWithFallback) {
  std::vector<GazeSample> g = grid_samples(3, 3.0);
  g[0].pupil_right_mm = 3.4;
  g[1].valid_right = false;
  g[2].valid_left = g[2].valid_right = false;
  const auto s = combine_eyes(g, 300);
  EXPECT_DOUBLE_EQ(s.d[0], 3.2);
  EXPECT_DOUBLE_EQ(s.d[1], 3.0);
  EXPECT_TRUE(s.is_missing(2));
  EXPECT_EQ(s.provenance[0], Provenance::Measured);
}

TEST(AlignToGrid, DropsDuplicatesAndOpensEmptySlots) {
  auto g = grid_samples(6, 3.0);
  std::vector<GazeSample> raw = {g[0], g[1], g[3], g[4], g[5]};
  raw[2].t_us += 400;  // jitter stays in the same slot
  const auto aligned = align_to_grid(raw, 300);
  ASSERT_EQ(aligned.size(), 6U);
  EXPECT_FALSE(aligned[2].has_gaze());
  EXPECT_FALSE(aligned[2].valid_left);
  EXPECT_TRUE(aligned[3].has_gaze());
}

TEST(FillGaps, ShortGapIsLinear) {
  const auto out = fill_gaps(sparse({2.0, kGap, kGap, kGap, 2.4}), 75.0);
  const std::vector<double> want = {2.0, 2.1, 2.2, 2.3, 2.4};
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(out.d[i], want[i], 1e-12);
  EXPECT_EQ(out.provenance[0], Provenance::Measured);
  EXPECT_EQ(out.provenance[2], Provenance::GapFilled);
  EXPECT_EQ(out.provenance[4], Provenance::Measured);
}

TEST(FillGaps, LongGapIsLeftAlone) {
  std::vector<double> d = {3.0};
  d.insert(d.end(), 30, kGap);  // 100 ms at 300 Hz
  d.push_back(3.6);
  const auto in = sparse(d);
  EXPECT_TRUE(same(fill_gaps(in, 75.0), in));
}

TEST(FillGaps, EdgeGapsAreLeftAlone) {
  const auto in = sparse({kGap, 3.0, 3.1, kGap});
  EXPECT_TRUE(same(fill_gaps(in, 75.0), in));
}

TEST(FillGaps, GaplessSeriesIsUnchanged) {
  const auto in = sparse({3.0, 3.1, 3.2, 3.3});
  EXPECT_TRUE(same(fill_gaps(in, 75.0), in));
}

TEST(InterpolateRemaining, LeadingGapExtendsNearestValue) {
  const auto out = interpolate_remaining(sparse({kGap, kGap, 3.0, 3.2}));
  EXPECT_EQ(out.d, (std::vector<double>{3.0, 3.0, 3.0, 3.2}));
  EXPECT_EQ(out.provenance[0], Provenance::Extrapolated);
  EXPECT_EQ(out.provenance[2], Provenance::Measured);
}

TEST(InterpolateRemaining, LongInteriorGapIsEvenRamp) {
  std::vector<double> d = {3.0};
  d.insert(d.end(), 59, kGap);  // 200 ms span from 3.0 to 3.6
  d.push_back(3.6);
  const auto out = interpolate_remaining(fill_gaps(sparse(d), 75.0));
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(out.d[i], 3.0 + 0.01 * static_cast<double>(i), 1e-12);
  EXPECT_EQ(out.provenance[30], Provenance::Interpolated);
}

TEST(InterpolateRemaining, FullyMissingThrows) {
  EXPECT_THROW(interpolate_remaining(sparse({kGap, kGap, kGap})), AllMissing);
}

TEST(Preprocess, IdempotentOnRandomSeries) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_sparse(rng, 400);
    const auto once = fill_gaps(in, 75.0);
    EXPECT_TRUE(same(fill_gaps(once, 75.0), once));
    if (std::all_of(in.provenance.begin(), in.provenance.end(), [](auto p) { return p == Provenance::Missing; }))
      continue;
    const auto dense = interpolate_remaining(once);
    const auto again = interpolate_remaining(to_sparse(dense));
    EXPECT_EQ(again.d, dense.d);
    EXPECT_EQ(again.provenance, dense.provenance);
  }
}

TEST(Preprocess, MeasuredSamplesAreNeverModified) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_sparse(rng, 400);
    if (std::all_of(in.provenance.begin(), in.provenance.end(), [](auto p) { return p == Provenance::Missing; }))
      continue;
    const auto out = interpolate_remaining(fill_gaps(in, 75.0));
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (in.provenance[i] != Provenance::Measured) {
        EXPECT_NE(out.provenance[i], Provenance::Measured);
        continue;
      }
      EXPECT_EQ(out.provenance[i], Provenance::Measured);
      EXPECT_EQ(out.d[i], in.d[i]);
    }
  }
}

TEST(Preprocess, ImputedValuesStayInsideBoundingEnvelope) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 200; ++trial) {
    const auto in = random_sparse(rng, 400);
    if (std::all_of(in.provenance.begin(), in.provenance.end(), [](auto p) { return p == Provenance::Missing; }))
      continue;
    const auto out = interpolate_remaining(fill_gaps(in, 75.0));
    for (std::size_t i = 0; i < in.size(); ++i) {
      if (!in.is_missing(i)) continue;
      std::size_t lo = i;
      while (lo > 0 && in.is_missing(lo)) --lo;
      std::size_t hi = i;
      while (hi + 1 < in.size() && in.is_missing(hi)) ++hi;
      const double a = in.is_missing(lo) ? in.d[hi] : in.d[lo];
      const double b = in.is_missing(hi) ? in.d[lo] : in.d[hi];
      EXPECT_GE(out.d[i], std::min(a, b) - 1e-12);
      EXPECT_LE(out.d[i], std::max(a, b) + 1e-12);
    }
  }
}

TEST(ExtractWindow, LengthsFollowTheWindow) {
  const auto grid = grid_samples(2100, 3.5);  // 7 s
  RunConfig config;
  EXPECT_EQ(preprocess_trial(grid, config).size(), 510U);
  config.analysis_start_ms = 0;
  EXPECT_EQ(preprocess_trial(grid, config).size(), 600U);
  for (int start : {0, 100, 300, 333, 1000}) {
    for (int end : {1001, 1500, 2000, 6999}) {
      config.analysis_start_ms = start;
      config.analysis_end_ms = end;
      const auto b = window_bounds(config);
      EXPECT_EQ(b.begin, static_cast<std::size_t>((start * 300 + 999) / 1000));
      EXPECT_EQ(b.end, static_cast<std::size_t>((end * 300 + 999) / 1000));
      EXPECT_EQ(preprocess_trial(grid, config).size(), b.size());
    }
  }
}

TEST(ExtractWindow, ShortTrialIsOutOfRange) {
  const auto grid = grid_samples(300, 3.5);  // 1 s
  EXPECT_THROW(preprocess_trial(grid, RunConfig{}), WindowOutOfRange);
  const auto dense = interpolate_remaining(combine_eyes(grid, 300));
  EXPECT_THROW(extract_window(dense, RunConfig{}), WindowOutOfRange);
}

TEST(Preprocess, WindowWithoutMeasurementsIsAllMissing) {
  auto grid = grid_samples(600, 3.5);
  for (std::size_t i = 90; i < grid.size(); ++i) grid[i].valid_left = grid[i].valid_right = false;
  EXPECT_THROW(preprocess_trial(grid, RunConfig{}), AllMissing);
}
