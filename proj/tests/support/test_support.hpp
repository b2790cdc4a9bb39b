#pragma once

// Independent reference implementations used as test oracles, plus small
// fixtures shared by the unit and acceptance suites. Nothing here calls the
// library routine it is meant to check.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "gazemetrics/aoi.hpp"
#include "gazemetrics/config.hpp"
#include "gazemetrics/ivt.hpp"
#include "gazemetrics/preprocess.hpp"
#include "gazemetrics/stats.hpp"
#include "gazemetrics/types.hpp"

namespace oracle {

// Test pupil signal shared with generate_reference.py.
std::vector<double> reference_signal(int n, double hf_amplitude, double phase);
// 0.5 Hz swing of 0.3 mm plus one tone at hf_hz, with the same fixed pseudo-noise
// as the reference generator.
std::vector<double> two_tone(int n, double hf_amplitude, double hf_hz);

gazemetrics::PupilSeries make_series(std::vector<double> d, double sample_rate_hz = 300.0);

// Literal scan of the modulus-maxima definition.
std::vector<double> modulus_maxima(const std::vector<double>& c);

// Least squares through the normal equations in long double with Gauss-Jordan
// elimination; the covariance comes from the same inverse.
struct NormalEquationsFit {
  std::vector<double> beta;
  std::vector<double> se;
  std::vector<double> t;
  std::vector<double> p;
  double rss = 0.0;
};
NormalEquationsFit normal_equations(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

// Two-sided Student-t tail from the regularized incomplete beta function,
// evaluated with a Lentz continued fraction.
double t_two_sided_p(double t, int dof);
double incomplete_beta(double a, double b, double x);

double spearman(const std::vector<double>& a, const std::vector<double>& b);

// Brute-force I-VT on a uniform grid, written directly from the rules.
struct RefFixation {
  std::int64_t start_us;
  std::int64_t end_us;
  double cx;
  double cy;
  std::size_t first;
  std::size_t last;
};
struct RefClassification {
  std::vector<RefFixation> fixations;
  std::vector<gazemetrics::SampleLabel> labels;
};
RefClassification classify_reference(const std::vector<gazemetrics::GazeSample>& grid,
                                     const gazemetrics::RunConfig& config);

// Greedy left-to-right visit builder over per-sample labels.
std::vector<gazemetrics::AoiVisit> visits_reference(const std::vector<gazemetrics::AoiLabel>& labels,
                                                    std::int64_t t0_us, double dt_us, double tolerance_ms);

// Random gaze stream of `duration_ms` at 300 Hz: stationary episodes, small
// wobbles, saccadic jumps and tracking losses.
std::vector<gazemetrics::GazeSample> random_scanpath(std::mt19937_64& rng, double duration_ms,
                                                     double sample_rate_hz = 300.0);

gazemetrics::RunConfig config_with_screen();

// Random metric table over both groups and all AOIs.
std::vector<gazemetrics::MetricRow> random_table(std::mt19937_64& rng, int n_rows);

}  // namespace oracle
