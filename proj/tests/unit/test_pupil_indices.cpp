#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "gazemetrics/error.hpp"
#include "gazemetrics/pupil_indices.hpp"
#include "reference_data.hpp"
#include "test_support.hpp"

using namespace gazemetrics;

namespace {

int as_count(double per_second, double duration_s) { return static_cast<int>(std::lround(per_second * duration_s)); }

AoiVisit visit(AoiName aoi, std::size_t begin, std::size_t end) {
  AoiVisit v;
  v.aoi_name = aoi;
  v.begin = begin;
  v.end = end;
  return v;
}

}  // namespace

TEST(ModulusMaxima, HandExamples) {
  const std::vector<double> a = {0, 1, 0, -2, 0};
  EXPECT_EQ(modulus_maxima(a), (std::vector<double>{0, 1, 0, 2, 0}));
  const std::vector<double> b = {1, 2, 3, 4};
  EXPECT_EQ(modulus_maxima(b), (std::vector<double>{0, 0, 0, 4}));
  const std::vector<double> zeros(6, 0.0);
  EXPECT_EQ(modulus_maxima(zeros), zeros);
  EXPECT_TRUE(modulus_maxima(std::vector<double>{}).empty());
}

TEST(ModulusMaxima, AgreesWithBruteForceScan) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> small(-3, 3);
  std::uniform_int_distribution<std::size_t> length(1, 40);
  for (int trial = 0; trial < 2000; ++trial) {
    // Small integers make plateaus and ties common.
    std::vector<double> c(length(rng));
    for (double& v : c) v = small(rng);
    EXPECT_EQ(modulus_maxima(c), oracle::modulus_maxima(c));
  }
}

TEST(UniversalThreshold, Examples) {
  EXPECT_EQ(universal_threshold(std::vector<double>(10, 4.0)), 0.0);
  std::vector<double> m(100);
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = i % 2 == 0 ? 3.0 : -1.0;  // population sd 2
  EXPECT_NEAR(universal_threshold(m), 6.0697, 1e-4);
  EXPECT_THROW(universal_threshold(std::vector<double>{1.0}), DegenerateInput);
  EXPECT_THROW(universal_threshold(std::vector<double>{}), DegenerateInput);
}

TEST(Ipa, ConstantSeriesIsZero) {
  const auto s = oracle::make_series(std::vector<double>(600, 4.2));
  EXPECT_EQ(ipa(s, daubechies_filter(21)), 0.0);
}

TEST(Ipa, NoiseRaisesIpa) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<double> clean(600);
  std::vector<double> noisy(600);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    clean[i] = 3.5 + 0.3 * std::sin(2 * std::numbers::pi * 0.5 * static_cast<double>(i) / 300.0);
    noisy[i] = clean[i] + noise(rng);
  }
  const auto& f = daubechies_filter(4);
  EXPECT_GT(ipa(oracle::make_series(noisy), f), ipa(oracle::make_series(clean), f));
}

TEST(Ipa, TooShortSeriesIsRejected) {
  EXPECT_THROW(ipa(oracle::make_series(std::vector<double>(100, 3.0)), daubechies_filter(21)), SegmentTooShort);
}

TEST(Lhipa, ConstantSeriesIsZero) {
  const auto r = lhipa(oracle::make_series(std::vector<double>(2100, 3.0)), daubechies_filter(21));
  EXPECT_FALSE(r.skipped);
  EXPECT_EQ(r.lhipa, 0.0);
  EXPECT_EQ(r.ipa, 0.0);
}

TEST(Lhipa, Db21On510SamplesIsTooShort) {
  const auto r = lhipa(oracle::make_series(oracle::reference_signal(510, 0.1, 0.4)), daubechies_filter(21));
  ASSERT_TRUE(r.skipped);
  EXPECT_EQ(*r.skipped, SkipReason::TooShort);
  EXPECT_EQ(r.lhipa, 0.0);
}

TEST(Lhipa, TwoToneSignalsMatchReference) {
  const auto& f = daubechies_filter(21);
  for (const auto& c : reference::kTwoToneCases) {
    const auto series = oracle::make_series(oracle::two_tone(2048, c.hf_amplitude, c.hf_hz));
    const auto r = lhipa(series, f);
    ASSERT_FALSE(r.skipped);
    EXPECT_EQ(std::lround(r.lhipa * series.duration_s()), c.lhipa_count) << c.hf_hz << " Hz, " << c.hf_amplitude;
  }
}

TEST(Lhipa, HighFrequencyComponentLowersLhipa) {
  // The tone has to reach the level-1 band (75 to 150 Hz at 300 Hz) to move the
  // ratio; a tone an octave or more lower mostly lands in levels LHIPA never reads.
  const auto& f = daubechies_filter(21);
  const auto lf = lhipa(oracle::make_series(oracle::two_tone(2048, 0.0, 76.0)), f);
  const auto hf = lhipa(oracle::make_series(oracle::two_tone(2048, 0.4, 76.0)), f);
  ASSERT_FALSE(lf.skipped);
  ASSERT_FALSE(hf.skipped);
  EXPECT_GT(lf.lhipa, hf.lhipa);
}

TEST(Lhipa, ScaleAndOffsetInvariance) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> amp(0.0, 0.3);
  std::uniform_real_distribution<double> phase(0.0, 3.0);
  const auto& f = daubechies_filter(4);
  for (int trial = 0; trial < 40; ++trial) {
    const auto d = oracle::reference_signal(900, amp(rng), phase(rng));
    const auto base = lhipa(oracle::make_series(d), f);
    for (double c : {0.1, 3.0, 40.0}) {
      auto scaled = d;
      for (double& v : scaled) v *= c;
      const auto r = lhipa(oracle::make_series(scaled), f);
      EXPECT_EQ(r.lhipa, base.lhipa) << c;
      EXPECT_EQ(r.ipa, base.ipa) << c;
    }
    for (double k : {-1.0, 2.0}) {
      auto shifted = d;
      for (double& v : shifted) v += k;
      const auto r = lhipa(oracle::make_series(shifted), f);
      EXPECT_EQ(r.lhipa, base.lhipa) << k;
      EXPECT_EQ(r.ipa, base.ipa) << k;
    }
  }
}

TEST(Lhipa, MatchesReferenceImplementationCounts) {
  for (const auto& c : reference::kIndexCases) {
    SCOPED_TRACE(testing::Message() << "n " << c.n << " amp " << c.hf_amplitude << " phase " << c.phase << " order "
                                    << c.order);
    const auto s = oracle::make_series(oracle::reference_signal(c.n, c.hf_amplitude, c.phase));
    const auto r = lhipa(s, daubechies_filter(c.order));
    if (c.lhipa_count < 0) {
      EXPECT_TRUE(r.skipped);
    } else {
      ASSERT_FALSE(r.skipped);
      EXPECT_EQ(as_count(r.lhipa, s.duration_s()), c.lhipa_count);
      EXPECT_EQ(as_count(r.ipa, s.duration_s()), c.ipa_count);
    }
    EXPECT_EQ(as_count(ipa(s, daubechies_filter(c.order)), s.duration_s()), c.ipa_count);
  }
}

TEST(Lhipa, RatesAreBoundedByNyquist) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int order : {1, 2, 4, 10}) {
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> d(1024);
      for (double& v : d) v = 3.0 + noise(rng);
      const auto r = lhipa(oracle::make_series(d), daubechies_filter(order));
      EXPECT_GE(r.lhipa, 0.0);
      EXPECT_GE(r.ipa, 0.0);
      EXPECT_LE(r.lhipa, 150.0);
      EXPECT_LE(r.ipa, 150.0);
    }
  }
}

TEST(Lhipa, ReportsSegmentDuration) {
  const auto r = lhipa(oracle::make_series(std::vector<double>(600, 3.0)), daubechies_filter(2));
  EXPECT_DOUBLE_EQ(r.segment_duration_s, 2.0);
}

TEST(LhipaPerAoi, MeanOverUsedVisits) {
  RunConfig config;
  config.wavelet_order = 2;
  const auto series = oracle::make_series(oracle::reference_signal(900, 0.1, 0.9));
  const std::vector<AoiVisit> visits = {visit(AoiName::Nose, 0, 300), visit(AoiName::Nose, 400, 800)};
  const auto a = lhipa(series.slice(0, 300), daubechies_filter(2));
  const auto b = lhipa(series.slice(400, 800), daubechies_filter(2));
  ASSERT_FALSE(a.skipped);
  ASSERT_FALSE(b.skipped);
  const auto result = lhipa_per_aoi(series, visits, config);
  ASSERT_EQ(result.by_aoi.size(), 1U);
  const auto& nose = result.by_aoi.at(AoiName::Nose);
  EXPECT_DOUBLE_EQ(nose.lhipa, (a.lhipa + b.lhipa) / 2.0);
  EXPECT_DOUBLE_EQ(nose.ipa, (a.ipa + b.ipa) / 2.0);
  EXPECT_EQ(nose.used_visits, 2);
  EXPECT_EQ(nose.skipped_visits, 0);
}

TEST(LhipaPerAoi, ShortVisitIsSkipped) {
  RunConfig config;
  config.wavelet_order = 2;
  const auto series = oracle::make_series(oracle::reference_signal(600, 0.1, 0.9));
  const std::vector<AoiVisit> visits = {visit(AoiName::Mouth, 10, 37)};  // 90 ms
  const auto result = lhipa_per_aoi(series, visits, config);
  EXPECT_TRUE(result.by_aoi.empty());
  EXPECT_EQ(result.skipped.at(SkipReason::BelowMinSegment), 1);
  EXPECT_EQ(result.skipped_by_aoi.at(AoiName::Mouth), 1);
}

TEST(LhipaPerAoi, ShallowDecompositionIsSkipped) {
  RunConfig config;  // 42-tap filter
  const auto series = oracle::make_series(oracle::reference_signal(600, 0.1, 0.9));
  const std::vector<AoiVisit> visits = {visit(AoiName::Chin, 0, 600)};
  const auto result = lhipa_per_aoi(series, visits, config);
  EXPECT_TRUE(result.by_aoi.empty());
  EXPECT_EQ(result.skipped.at(SkipReason::TooShort), 1);
}

TEST(LhipaPerAoi, NoVisitsGiveEmptyMap) {
  RunConfig config;
  const auto series = oracle::make_series(std::vector<double>(600, 3.0));
  const auto result = lhipa_per_aoi(series, {}, config);
  EXPECT_TRUE(result.by_aoi.empty());
}

TEST(LhipaPerAoi, VisitOutsideSeriesThrows) {
  RunConfig config;
  const auto series = oracle::make_series(std::vector<double>(600, 3.0));
  const std::vector<AoiVisit> visits = {visit(AoiName::Chin, 500, 700)};
  EXPECT_THROW(lhipa_per_aoi(series, visits, config), std::out_of_range);
}
