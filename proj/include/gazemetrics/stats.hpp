#pragma once

#include <Eigen/Dense>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gazemetrics/aoi.hpp"
#include "gazemetrics/pupil_indices.hpp"
#include "gazemetrics/types.hpp"

namespace gazemetrics {

struct MetricRow {
  std::string participant_id;
  Group group = Group::Expert;
  std::string stimulus_id;
  PainLabel pain_label = PainLabel::Rest;
  AoiName aoi_name = AoiName::Nose;
  double lhipa = 0.0;
  double ipa = 0.0;
  int fixation_count = 0;
  double gaze_duration_ms = 0.0;
  int visit_count = 0;

  bool operator==(const MetricRow&) const = default;
};

// Canonical row order: participant, stimulus, AOI name, then values.
bool row_less(const MetricRow& a, const MetricRow& b);

enum class Metric { Lhipa, Ipa, FixationCount, GazeDuration, VisitCount };

std::string_view to_string(Metric m);
std::optional<Metric> parse_metric(std::string_view s);
double metric_value(const MetricRow& row, Metric m);

// Everything the table needs from one processed trial.
struct TrialMetrics {
  std::string participant_id;
  Group group = Group::Expert;
  std::string stimulus_id;
  PainLabel pain_label = PainLabel::Rest;
  std::map<AoiName, AoiMetrics> traditional;
  PerAoiPupilResult pupil;
};

// One row per (participant, stimulus, AOI with a used visit), canonical order.
std::vector<MetricRow> build_table(std::span<const TrialMetrics> trials);

struct OlsResult {
  std::vector<std::string> terms;
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> t_stats;
  std::vector<double> p_values;
  double r_squared = 0.0;
  double rss = 0.0;
  int n = 0;
  int dof = 0;
  std::vector<double> fitted;
  std::vector<double> residuals;
};

// Full-rank least squares via column-pivoted Householder QR. Throws
// RankDeficient naming a zero or dependent column and InsufficientData when
// there are no residual degrees of freedom.
OlsResult fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<std::string> terms);

// Two-sided p-value for a t statistic with `dof` degrees of freedom.
double t_two_sided_p(double t, int dof);

struct FactorDesign {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::string> terms;
  std::string reference_group;
  std::string reference_aoi;
  std::vector<MetricRow> rows;  // in design-row order
};

// y ~ 1 + group + aoi + group:aoi under treatment coding. Reference levels
// are Expert and the alphabetically first AOI present. Rows are put in
// canonical order first, so the design does not depend on input order.
FactorDesign build_design(std::span<const MetricRow> rows, Metric dependent);

struct GroupAoiRegression {
  OlsResult fit;
  Metric dependent = Metric::Lhipa;
  std::string reference_group;
  std::string reference_aoi;
};

// Throws InsufficientData unless both groups and two AOIs are present.
GroupAoiRegression ols_fit(std::span<const MetricRow> rows, Metric dependent);

struct MapValues {
  double lhipa_star = 0.0;
  double gaze_duration = 0.0;
  double fixation_count = 0.0;
};

struct MetricMap {
  // Per group, per AOI normalized values in [0, 1].
  std::map<Group, std::map<AoiName, MapValues>> values;
};

// Min-max onto [0, 1]; inputs with fewer than two distinct values map to 0.5.
std::map<AoiName, double> minmax_normalize(const std::map<AoiName, double>& values);

// Group x AOI means, min-max normalized per (group, metric). LHIPA* is the
// complement of normalized LHIPA.
MetricMap normalize_maps(std::span<const MetricRow> rows);

}  // namespace gazemetrics
