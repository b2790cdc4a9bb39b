#include "gazemetrics/wavelet.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include <array>
#include <cmath>
#include <mutex>
#include <string>

#include "gazemetrics/error.hpp"

namespace gazemetrics {

namespace {

using Real = boost::multiprecision::cpp_bin_float_50;
using Complex = boost::multiprecision::cpp_complex_50;

// Ascending coefficients: p(z) = sum c[k] z^k.
Complex horner(const std::vector<Real>& c, const Complex& z, Complex& derivative) {
  Complex p = c.back();
  derivative = Complex(0);
  for (std::size_t k = c.size() - 1; k-- > 0;) {
    derivative = derivative * z + p;
    p = p * z + c[k];
  }
  return p;
}

// All roots of a real polynomial by simultaneous Aberth-Ehrlich iteration.
std::vector<Complex> polynomial_roots(const std::vector<Real>& coeffs) {
  const std::size_t degree = coeffs.size() - 1;
  std::vector<Complex> roots(degree);
  if (degree == 0) return roots;

  // Fujiwara bound on root magnitude.
  Real bound = 0;
  for (std::size_t k = 1; k <= degree; ++k) {
    const Real ratio = boost::multiprecision::abs(coeffs[degree - k] / coeffs[degree]);
    const Real r = boost::multiprecision::pow(ratio, Real(1) / Real(k));
    if (r > bound) bound = r;
  }
  bound *= 2;

  const Real two_pi = 2 * boost::math::constants::pi<Real>();
  for (std::size_t k = 0; k < degree; ++k) {
    const Real angle = two_pi * Real(k) / Real(degree) + Real("0.4");
    roots[k] = Complex(bound * boost::multiprecision::cos(angle), bound * boost::multiprecision::sin(angle)) / Real(2);
  }

  const Real tolerance = Real("1e-45");
  for (int iter = 0; iter < 1000; ++iter) {
    Real worst = 0;
    for (std::size_t k = 0; k < degree; ++k) {
      Complex dp;
      const Complex p = horner(coeffs, roots[k], dp);
      if (p == Complex(0)) continue;
      const Complex w = p / dp;
      Complex repulsion(0);
      for (std::size_t j = 0; j < degree; ++j) {
        if (j != k) repulsion += Complex(1) / (roots[k] - roots[j]);
      }
      const Complex step = w / (Complex(1) - w * repulsion);
      roots[k] -= step;
      const Real rel = boost::multiprecision::abs(step) / (Real(1) + boost::multiprecision::abs(roots[k]));
      if (rel > worst) worst = rel;
    }
    if (worst < tolerance) break;
  }
  return roots;
}

WaveletFilter build_daubechies(int order) {
  const auto n = static_cast<std::size_t>(order);

  // |H|^2 = cos^{2N}(w/2) P(sin^2(w/2)), P(y) = sum_k C(N-1+k, k) y^k.
  std::vector<Real> p(n);
  Real binom = 1;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) binom = binom * Real(n - 1 + k) / Real(k);
    p[k] = binom;
  }

  // Each root y of P gives a reciprocal pair z, 1/z through y = (2 - z - 1/z) / 4;
  // the extremal-phase factor keeps the one inside the unit circle.
  std::vector<Complex> zeros;
  for (const auto& y : polynomial_roots(p)) {
    const Complex b = Complex(2) - Complex(4) * y;
    const Complex disc = boost::multiprecision::sqrt(b * b - Complex(4));
    const Complex z1 = (b + disc) / Real(2);
    const Complex z2 = (b - disc) / Real(2);
    zeros.push_back(boost::multiprecision::abs(z1) < boost::multiprecision::abs(z2) ? z1 : z2);
  }
  for (std::size_t k = 0; k < n; ++k) zeros.emplace_back(-1);

  std::vector<Complex> poly{Complex(1)};  // ascending powers of z
  for (const auto& r : zeros) {
    std::vector<Complex> next(poly.size() + 1, Complex(0));
    for (std::size_t j = 0; j < poly.size(); ++j) {
      next[j + 1] += poly[j];
      next[j] -= r * poly[j];
    }
    poly = std::move(next);
  }

  const std::size_t length = poly.size();
  Real sum = 0;
  for (const auto& c : poly) sum += c.real();
  const Real scale = boost::multiprecision::sqrt(Real(2)) / sum;

  WaveletFilter f;
  f.order = order;
  f.h.resize(length);
  f.g.resize(length);
  for (std::size_t k = 0; k < length; ++k) {
    f.h[k] = static_cast<double>(poly[length - 1 - k].real() * scale);
  }
  for (std::size_t k = 0; k < length; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    f.g[k] = sign * f.h[length - 1 - k];
  }
  return f;
}

// Position of tap k for output i (pos = 2i + k) on a circular signal of
// length n. The filter is centred the way PyWavelets' periodization mode
// centres it, so coefficients line up with that reference.
std::size_t circular_index(std::size_t pos, std::size_t filter_length, std::size_t n) {
  const auto shifted = static_cast<long long>(pos) + 1 - static_cast<long long>(filter_length / 2);
  const auto m = static_cast<long long>(n);
  return static_cast<std::size_t>(((shifted % m) + m) % m);
}

}  // namespace

const WaveletFilter& daubechies_filter(int order) {
  if (order < 1 || order > kMaxDaubechiesOrder) {
    throw UnsupportedOrder("Daubechies order " + std::to_string(order) + " outside [1, " +
                           std::to_string(kMaxDaubechiesOrder) + "]");
  }
  static std::array<WaveletFilter, kMaxDaubechiesOrder + 1> cache;
  static std::array<std::once_flag, kMaxDaubechiesOrder + 1> once;
  const auto slot = static_cast<std::size_t>(order);
  std::call_once(once[slot], [&] { cache[slot] = build_daubechies(order); });
  return cache[slot];
}

int max_level(std::size_t n, std::size_t filter_length) {
  if (filter_length < 2 || n < filter_length - 1) return 0;
  const std::size_t base = filter_length - 1;
  int level = 0;
  while (base << (level + 1) <= n) ++level;
  return level;
}

void dwt_step(std::span<const double> x, const WaveletFilter& filter, std::vector<double>& approx,
              std::vector<double>& detail) {
  const std::size_t n = x.size();
  const std::size_t padded = n + (n % 2);
  const std::size_t half = padded / 2;
  const std::size_t len = filter.length();
  const auto at = [&](std::size_t m) { return m < n ? x[m] : x[n - 1]; };

  approx.assign(half, 0.0);
  detail.assign(half, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    double a = 0.0;
    double d = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
      const double v = at(circular_index(2 * i + k, len, padded));
      a += filter.h[k] * v;
      d += filter.g[k] * v;
    }
    approx[i] = a;
    detail[i] = d;
  }
}

std::vector<double> idwt_step(std::span<const double> approx, std::span<const double> detail,
                              const WaveletFilter& filter, std::size_t output_length) {
  const std::size_t padded = 2 * approx.size();
  const std::size_t len = filter.length();
  std::vector<double> y(padded, 0.0);
  for (std::size_t i = 0; i < approx.size(); ++i) {
    for (std::size_t k = 0; k < len; ++k) {
      y[circular_index(2 * i + k, len, padded)] += filter.h[k] * approx[i] + filter.g[k] * detail[i];
    }
  }
  y.resize(output_length);
  return y;
}

DwtDecomposition dwt_multilevel(std::span<const double> x, const WaveletFilter& filter, int level) {
  const int deepest = max_level(x.size(), filter.length());
  if (level < 0 || level > deepest) {
    throw LevelTooDeep("level " + std::to_string(level) + " requested, " + std::to_string(x.size()) +
                       " samples with a " + std::to_string(filter.length()) + "-tap filter allow at most " +
                       std::to_string(deepest));
  }
  DwtDecomposition out;
  out.level = level;
  out.approximation.assign(x.begin(), x.end());
  for (int j = 1; j <= level; ++j) {
    std::vector<double> a, d;
    out.input_lengths.push_back(out.approximation.size());
    dwt_step(out.approximation, filter, a, d);
    out.approximation = std::move(a);
    out.details.push_back(std::move(d));
  }
  return out;
}

std::vector<double> idwt_multilevel(const DwtDecomposition& decomposition, const WaveletFilter& filter) {
  std::vector<double> a = decomposition.approximation;
  for (int j = decomposition.level; j >= 1; --j) {
    const auto idx = static_cast<std::size_t>(j - 1);
    a = idwt_step(a, decomposition.details[idx], filter, decomposition.input_lengths[idx]);
  }
  return a;
}

}  // namespace gazemetrics
