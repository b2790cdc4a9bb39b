#include "gazemetrics/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <tuple>

#include "gazemetrics/error.hpp"

namespace gazemetrics {

namespace {

auto row_key(const MetricRow& r) {
  return std::make_tuple(std::string_view(r.participant_id), std::string_view(r.stimulus_id),
                         to_string(r.aoi_name), r.group, r.pain_label, r.lhipa, r.ipa, r.fixation_count,
                         r.gaze_duration_ms, r.visit_count);
}

std::vector<MetricRow> sorted_rows(std::span<const MetricRow> rows) {
  std::vector<MetricRow> out(rows.begin(), rows.end());
  std::sort(out.begin(), out.end(), row_less);
  return out;
}

std::string group_term() { return "group[" + std::string(to_string(Group::NonExpert)) + "]"; }
std::string aoi_term(AoiName a) { return "aoi[" + std::string(to_string(a)) + "]"; }

}  // namespace

bool row_less(const MetricRow& a, const MetricRow& b) { return row_key(a) < row_key(b); }

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::Lhipa: return "lhipa";
    case Metric::Ipa: return "ipa";
    case Metric::FixationCount: return "fixation_count";
    case Metric::GazeDuration: return "gaze_duration_ms";
    case Metric::VisitCount: return "visit_count";
  }
  return "lhipa";
}

std::optional<Metric> parse_metric(std::string_view s) {
  for (auto m : {Metric::Lhipa, Metric::Ipa, Metric::FixationCount, Metric::GazeDuration, Metric::VisitCount}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

double metric_value(const MetricRow& row, Metric m) {
  switch (m) {
    case Metric::Lhipa: return row.lhipa;
    case Metric::Ipa: return row.ipa;
    case Metric::FixationCount: return row.fixation_count;
    case Metric::GazeDuration: return row.gaze_duration_ms;
    case Metric::VisitCount: return row.visit_count;
  }
  return row.lhipa;
}

std::vector<MetricRow> build_table(std::span<const TrialMetrics> trials) {
  std::vector<MetricRow> rows;
  for (const auto& t : trials) {
    for (const auto& [aoi, activity] : t.pupil.by_aoi) {
      MetricRow r;
      r.participant_id = t.participant_id;
      r.group = t.group;
      r.stimulus_id = t.stimulus_id;
      r.pain_label = t.pain_label;
      r.aoi_name = aoi;
      r.lhipa = activity.lhipa;
      r.ipa = activity.ipa;
      r.visit_count = activity.used_visits;
      if (const auto it = t.traditional.find(aoi); it != t.traditional.end()) {
        r.fixation_count = it->second.fixation_count;
        r.gaze_duration_ms = it->second.gaze_duration_ms;
      }
      rows.push_back(std::move(r));
    }
  }
  std::sort(rows.begin(), rows.end(), row_less);
  return rows;
}

double t_two_sided_p(double t, int dof) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  const boost::math::students_t dist(static_cast<double>(dof));
  const double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
  return std::clamp(p, 0.0, 1.0);
}

OlsResult fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::vector<std::string> terms) {
  const auto n = x.rows();
  const auto p = x.cols();
  if (static_cast<Eigen::Index>(terms.size()) != p) throw std::invalid_argument("one term name per column required");
  if (y.size() != n) throw std::invalid_argument("response length differs from design rows");
  if (n <= p) {
    throw InsufficientData(std::to_string(n) + " observations for " + std::to_string(p) +
                           " terms leave no residual degrees of freedom");
  }
  for (Eigen::Index j = 0; j < p; ++j) {
    if (x.col(j).cwiseAbs().maxCoeff() == 0.0) throw RankDeficient("design column '" + terms[j] + "' is all zero");
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < p) {
    const auto dependent = qr.colsPermutation().indices()[qr.rank()];
    throw RankDeficient("design column '" + terms[dependent] + "' is linearly dependent on the others");
  }

  const Eigen::VectorXd beta = qr.solve(y);
  const Eigen::VectorXd fitted = x * beta;
  const Eigen::VectorXd resid = y - fitted;
  const double rss = resid.squaredNorm();
  const int dof = static_cast<int>(n - p);
  const double sigma2 = rss / dof;

  // (X'X)^-1 = P R^-1 R^-T P' for X P = Q R.
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd cov_perm = r_inv * r_inv.transpose();
  const auto& perm = qr.colsPermutation().indices();

  OlsResult out;
  out.terms = std::move(terms);
  out.n = static_cast<int>(n);
  out.dof = dof;
  out.rss = rss;
  const double mean = y.mean();
  const double tss = (y.array() - mean).square().sum();
  out.r_squared = tss == 0.0 ? 1.0 : std::clamp(1.0 - rss / tss, 0.0, 1.0);
  out.fitted.assign(fitted.data(), fitted.data() + n);
  out.residuals.assign(resid.data(), resid.data() + n);

  std::vector<double> diag(static_cast<std::size_t>(p));
  for (Eigen::Index k = 0; k < p; ++k) diag[static_cast<std::size_t>(perm[k])] = cov_perm(k, k);

  for (Eigen::Index j = 0; j < p; ++j) {
    const double b = beta[j];
    const double se = std::sqrt(sigma2 * diag[static_cast<std::size_t>(j)]);
    double t = 0.0;
    double pv = 1.0;
    if (se > 0.0) {
      t = b / se;
      pv = t_two_sided_p(t, dof);
    } else if (b != 0.0) {
      t = b > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      pv = 0.0;
    }
    out.coefficients.push_back(b);
    out.std_errors.push_back(se);
    out.t_stats.push_back(t);
    out.p_values.push_back(pv);
  }
  return out;
}

FactorDesign build_design(std::span<const MetricRow> rows, Metric dependent) {
  FactorDesign d;
  d.rows = sorted_rows(rows);
  std::set<AoiName, AoiAlphabetical> aois;
  for (const auto& r : d.rows) aois.insert(r.aoi_name);
  d.reference_group = std::string(to_string(Group::Expert));
  if (aois.empty()) return d;
  d.reference_aoi = std::string(to_string(*aois.begin()));

  std::vector<AoiName> levels(std::next(aois.begin()), aois.end());
  d.terms.push_back("(Intercept)");
  d.terms.push_back(group_term());
  for (auto a : levels) d.terms.push_back(aoi_term(a));
  for (auto a : levels) d.terms.push_back(group_term() + ":" + aoi_term(a));

  const auto n = static_cast<Eigen::Index>(d.rows.size());
  const auto p = static_cast<Eigen::Index>(d.terms.size());
  const auto k = static_cast<Eigen::Index>(levels.size());
  d.x = Eigen::MatrixXd::Zero(n, p);
  d.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = d.rows[static_cast<std::size_t>(i)];
    const double g = r.group == Group::NonExpert ? 1.0 : 0.0;
    d.x(i, 0) = 1.0;
    d.x(i, 1) = g;
    const auto it = std::find(levels.begin(), levels.end(), r.aoi_name);
    if (it != levels.end()) {
      const auto a = static_cast<Eigen::Index>(it - levels.begin());
      d.x(i, 2 + a) = 1.0;
      d.x(i, 2 + k + a) = g;
    }
    d.y[i] = metric_value(r, dependent);
  }
  return d;
}

GroupAoiRegression ols_fit(std::span<const MetricRow> rows, Metric dependent) {
  std::set<Group> groups;
  std::set<AoiName> aois;
  for (const auto& r : rows) {
    groups.insert(r.group);
    aois.insert(r.aoi_name);
  }
  if (groups.size() < 2) throw InsufficientData("both participant groups must be present");
  if (aois.size() < 2) throw InsufficientData("at least two AOIs must be present");

  // An empty cell makes the interaction model unidentifiable. For the
  // reference AOI no single column goes to zero, so check the cells directly.
  std::set<std::pair<Group, AoiName>> cells;
  for (const auto& r : rows) cells.emplace(r.group, r.aoi_name);
  auto design = build_design(rows, dependent);
  for (auto g : groups) {
    for (auto a : aois) {
      if (cells.contains({g, a})) continue;
      std::string what = "group x AOI cell (" + std::string(to_string(g)) + ", " + std::string(to_string(a)) +
                         ") has no rows";
      if (std::string(to_string(a)) != design.reference_aoi) {
        what += "; column '" + group_term() + ":" + aoi_term(a) + "' is not estimable";
      } else {
        what += "; the group effect at the reference AOI is not estimable";
      }
      throw RankDeficient(what);
    }
  }
  GroupAoiRegression out;
  out.fit = fit_ols(design.x, design.y, std::move(design.terms));
  out.dependent = dependent;
  out.reference_group = design.reference_group;
  out.reference_aoi = design.reference_aoi;
  return out;
}

std::map<AoiName, double> minmax_normalize(const std::map<AoiName, double>& values) {
  std::map<AoiName, double> out;
  if (values.empty()) return out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& [_, v] : values) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  for (const auto& [a, v] : values) out[a] = hi > lo ? (v - lo) / (hi - lo) : 0.5;
  return out;
}

MetricMap normalize_maps(std::span<const MetricRow> rows) {
  struct Acc {
    double lhipa = 0.0;
    double gaze = 0.0;
    double fixations = 0.0;
    int n = 0;
  };
  std::map<Group, std::map<AoiName, Acc>> acc;
  for (const auto& r : sorted_rows(rows)) {
    auto& a = acc[r.group][r.aoi_name];
    a.lhipa += r.lhipa;
    a.gaze += r.gaze_duration_ms;
    a.fixations += r.fixation_count;
    ++a.n;
  }

  MetricMap out;
  for (const auto& [group, by_aoi] : acc) {
    std::map<AoiName, double> lhipa, gaze, fixations;
    for (const auto& [aoi, a] : by_aoi) {
      lhipa[aoi] = a.lhipa / a.n;
      gaze[aoi] = a.gaze / a.n;
      fixations[aoi] = a.fixations / a.n;
    }
    const auto nl = minmax_normalize(lhipa);
    const auto ng = minmax_normalize(gaze);
    const auto nf = minmax_normalize(fixations);
    auto& dst = out.values[group];
    for (const auto& [aoi, _] : by_aoi) {
      dst[aoi] = MapValues{1.0 - nl.at(aoi), ng.at(aoi), nf.at(aoi)};
    }
  }
  return out;
}

}  // namespace gazemetrics
