#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gazemetrics {

inline constexpr int kMaxDaubechiesOrder = 38;

// Orthogonal two-channel filter bank. `h` is the low-pass (scaling) filter in
// the usual reconstruction orientation; `g[k] = (-1)^k h[L-1-k]`.
struct WaveletFilter {
  int order = 0;
  std::vector<double> h;
  std::vector<double> g;

  std::size_t length() const { return h.size(); }
};

// Extremal-phase Daubechies filter with `order` vanishing moments, built by
// spectral factorization in 100-digit arithmetic and cached per order.
// Throws UnsupportedOrder outside [1, kMaxDaubechiesOrder].
const WaveletFilter& daubechies_filter(int order);

// floor(log2(n / (L - 1))) clamped at zero.
int max_level(std::size_t n, std::size_t filter_length);

struct DwtDecomposition {
  int level = 0;
  std::vector<double> approximation;         // cA_level
  std::vector<std::vector<double>> details;  // details[j - 1] = cD_j
  std::vector<std::size_t> input_lengths;    // signal length entering level j, j = 1..level

  const std::vector<double>& detail(int j) const { return details.at(static_cast<std::size_t>(j - 1)); }
};

// One analysis step with periodic extension. Odd-length input is padded by
// repeating its last sample, so outputs have ceil(n / 2) coefficients.
void dwt_step(std::span<const double> x, const WaveletFilter& filter, std::vector<double>& approx,
              std::vector<double>& detail);

// Inverse of dwt_step for an input of `output_length` samples.
std::vector<double> idwt_step(std::span<const double> approx, std::span<const double> detail,
                              const WaveletFilter& filter, std::size_t output_length);

// Throws LevelTooDeep when level exceeds max_level(x.size(), filter.length()).
DwtDecomposition dwt_multilevel(std::span<const double> x, const WaveletFilter& filter, int level);

std::vector<double> idwt_multilevel(const DwtDecomposition& decomposition, const WaveletFilter& filter);

}  // namespace gazemetrics
