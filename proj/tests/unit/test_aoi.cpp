#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "gazemetrics/aoi.hpp"
#include "gazemetrics/synth.hpp"
#include "test_support.hpp"

using namespace gazemetrics;

namespace {

AoiPolygon square(AoiName name, double x0, double y0, double size) {
  return {"S01", name, {{x0, y0}, {x0 + size, y0}, {x0 + size, y0 + size}, {x0, y0 + size}}};
}

std::vector<AoiLabel> labels_from_runs(const std::vector<std::pair<AoiLabel, int>>& runs) {
  std::vector<AoiLabel> out;
  for (const auto& [label, count] : runs) out.insert(out.end(), static_cast<std::size_t>(count), label);
  return out;
}

FixationEvent fixation_at(double x, double y, std::int64_t start_us, double duration_ms) {
  FixationEvent f;
  f.start_us = start_us;
  f.end_us = start_us + static_cast<std::int64_t>(duration_ms * 1000);
  f.centroid_x_px = x;
  f.centroid_y_px = y;
  return f;
}

constexpr double kDt = 1e6 / 300.0;

}  // namespace

TEST(PointInAoi, CentroidOfConvexPolygon) {
  const std::vector<AoiPolygon> polys = {
      {"S01", AoiName::Nose, {{10, 0}, {20, 0}, {26, 30}, {4, 30}}},
  };
  const auto c = polygon_centroid(polys[0].vertices);
  EXPECT_EQ(point_in_aoi(c.x, c.y, polys), AoiName::Nose);
  EXPECT_FALSE(point_in_aoi(100, 100, polys));
}

TEST(PointInAoi, OverlapGoesToFirstDeclared) {
  std::vector<AoiPolygon> polys = {square(AoiName::Nose, 0, 0, 10), square(AoiName::LeftCheek, 5, 5, 10)};
  EXPECT_EQ(point_in_aoi(7, 7, polys), AoiName::Nose);
  std::swap(polys[0], polys[1]);
  EXPECT_EQ(point_in_aoi(7, 7, polys), AoiName::LeftCheek);
}

TEST(PointInAoi, BoundaryCountsAsInside) {
  const std::vector<AoiPolygon> polys = {square(AoiName::Chin, 0, 0, 10)};
  EXPECT_EQ(point_in_aoi(0, 5, polys), AoiName::Chin);
  EXPECT_EQ(point_in_aoi(10, 10, polys), AoiName::Chin);
  EXPECT_FALSE(point_in_aoi(10.0001, 5, polys));
}

TEST(PointInAoi, ConcavePolygon) {
  // U shape: the notch between the arms is outside.
  const std::vector<AoiPolygon> polys = {
      {"S01", AoiName::Mouth, {{0, 0}, {30, 0}, {30, 30}, {20, 30}, {20, 10}, {10, 10}, {10, 30}, {0, 30}}}};
  EXPECT_EQ(point_in_aoi(5, 20, polys), AoiName::Mouth);
  EXPECT_FALSE(point_in_aoi(15, 20, polys));
  EXPECT_EQ(point_in_aoi(15, 5, polys), AoiName::Mouth);
}

TEST(Visits, ThreeDwellsGiveThreeVisits) {
  const auto labels = labels_from_runs({{AoiName::Nose, 150}, {AoiName::Mouth, 210}, {AoiName::Nose, 90}});
  const auto v = build_visits_from_labels(labels, 0, kDt, 75.0);
  ASSERT_EQ(v.size(), 3U);
  EXPECT_EQ(v[0].aoi_name, AoiName::Nose);
  EXPECT_EQ(v[1].aoi_name, AoiName::Mouth);
  EXPECT_EQ(v[1].n_samples(), 210U);
  EXPECT_EQ(v[2].end_us, 1'500'000);
}

TEST(Visits, ShortExcursionIsAbsorbed) {
  const auto labels = labels_from_runs({{AoiName::Nose, 120}, {std::nullopt, 12}, {AoiName::Nose, 120}});
  const auto v = build_visits_from_labels(labels, 0, kDt, 75.0);
  ASSERT_EQ(v.size(), 1U);
  EXPECT_EQ(v[0].end_us - v[0].start_us, 840'000);
  EXPECT_EQ(v[0].n_samples(), 252U);
}

TEST(Visits, LongExcursionSplits) {
  const auto labels = labels_from_runs({{AoiName::Nose, 120}, {AoiName::Chin, 30}, {AoiName::Nose, 120}});
  EXPECT_EQ(build_visits_from_labels(labels, 0, kDt, 75.0).size(), 3U);
}

TEST(Visits, AllNoneGivesNoVisits) {
  const std::vector<AoiLabel> labels(300);
  EXPECT_TRUE(build_visits_from_labels(labels, 0, kDt, 75.0).empty());
}

TEST(Visits, MatchGreedyReferenceOnRandomLabels) {
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> pick(0, 3);
  std::uniform_int_distribution<int> run(1, 40);
  const std::vector<AoiLabel> alphabet = {std::nullopt, AoiName::Nose, AoiName::Mouth, AoiName::Chin};
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<AoiLabel> labels;
    while (labels.size() < 600) labels.insert(labels.end(), static_cast<std::size_t>(run(rng)), alphabet[pick(rng)]);
    labels.resize(600);
    for (double tol : {0.0, 20.0, 75.0, 150.0}) {
      const auto got = build_visits_from_labels(labels, 1000, kDt, tol);
      EXPECT_EQ(got, oracle::visits_reference(labels, 1000, kDt, tol)) << trial << " tol " << tol;
      for (std::size_t i = 1; i < got.size(); ++i) {
        EXPECT_LE(got[i - 1].end, got[i].begin);
        EXPECT_LE(got[i - 1].end_us, got[i].start_us);
      }
    }
  }
}

TEST(Visits, ZeroToleranceGivesMaximalRuns) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> pick(0, 3);
  const std::vector<AoiLabel> alphabet = {std::nullopt, AoiName::Nose, AoiName::Mouth, AoiName::Chin};
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<AoiLabel> labels(300);
    for (auto& l : labels) l = alphabet[pick(rng)];
    const auto got = build_visits_from_labels(labels, 0, kDt, 0.0);
    std::size_t covered = 0;
    for (const auto& v : got) {
      for (std::size_t k = v.begin; k < v.end; ++k) EXPECT_EQ(labels[k], v.aoi_name);
      if (v.begin > 0) {
        EXPECT_NE(labels[v.begin - 1], v.aoi_name);
      }
      if (v.end < labels.size()) {
        EXPECT_NE(labels[v.end], v.aoi_name);
      }
      covered += v.n_samples();
    }
    std::size_t labelled = 0;
    for (const auto& l : labels) labelled += l.has_value();
    EXPECT_EQ(covered, labelled);
  }
}

TEST(TraditionalMetrics, FixationsAddUpPerAoi) {
  const std::vector<AoiPolygon> polys = {square(AoiName::Mouth, 0, 0, 50), square(AoiName::Nose, 100, 0, 50)};
  const std::vector<FixationEvent> fx = {fixation_at(10, 10, 0, 300), fixation_at(20, 30, 400'000, 500),
                                         fixation_at(500, 500, 1'000'000, 200)};
  const auto m = traditional_metrics(fx, polys);
  ASSERT_EQ(m.size(), 2U);
  EXPECT_EQ(m.at(AoiName::Mouth).fixation_count, 2);
  EXPECT_DOUBLE_EQ(m.at(AoiName::Mouth).gaze_duration_ms, 800.0);
  EXPECT_EQ(m.at(AoiName::Nose).fixation_count, 0);
  const auto empty = traditional_metrics({}, polys);
  for (const auto& [name, metrics] : empty) {
    EXPECT_EQ(metrics.fixation_count, 0);
    EXPECT_EQ(metrics.gaze_duration_ms, 0.0);
  }
}

TEST(TraditionalMetrics, CountsNeverExceedFixationTotal) {
  const auto layout = face_layout({"S01"});
  const auto& polys = layout.at("S01");
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> x(500, 1400);
  std::uniform_real_distribution<double> y(50, 1000);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<FixationEvent> fx;
    for (int k = 0; k < 20; ++k) fx.push_back(fixation_at(x(rng), y(rng), k * 100'000, 80));
    const auto m = traditional_metrics(fx, polys);
    int count = 0;
    for (const auto& [name, metrics] : m) count += metrics.fixation_count;
    EXPECT_LE(count, 20);
  }
}
