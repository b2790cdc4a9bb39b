#include "gazemetrics/pupil_indices.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gazemetrics/error.hpp"

namespace gazemetrics {

namespace {

constexpr int kHighFrequencyLevel = 1;

// Details of a constant are zero only in exact arithmetic. Removing the mean
// and zeroing coefficients at rounding level makes that hold numerically, and
// leaves the result unchanged under offsets and positive scaling.
struct CenteredSignal {
  std::vector<double> x;
  double peak = 0.0;
};

CenteredSignal center(std::span<const double> d) {
  CenteredSignal out;
  const double mean = std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
  out.x.reserve(d.size());
  for (double v : d) {
    out.x.push_back(v - mean);
    out.peak = std::max(out.peak, std::abs(v - mean));
  }
  return out;
}

std::vector<double> scaled_detail(const DwtDecomposition& dec, int level, double peak) {
  std::vector<double> c = dec.detail(level);
  const double floor = kDetailNoiseFloor * peak;
  const double scale = std::pow(2.0, -0.5 * level);
  for (double& v : c) v = std::abs(v) <= floor ? 0.0 : v * scale;
  return c;
}

double floored(double v) {
  if (std::abs(v) >= kRatioDenominatorFloor) return v;
  return v < 0.0 ? -kRatioDenominatorFloor : kRatioDenominatorFloor;
}

std::size_t count_ipa_maxima(const std::vector<double>& cd2) {
  const auto m = modulus_maxima(cd2);
  const double lambda = universal_threshold(m);
  std::size_t count = 0;
  for (double v : m) count += v > lambda ? 1 : 0;
  return count;
}

}  // namespace

std::string_view to_string(SkipReason r) {
  return r == SkipReason::BelowMinSegment ? "below_min_segment" : "too_short";
}

std::vector<double> modulus_maxima(std::span<const double> c) {
  const std::size_t n = c.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  for (std::size_t i = 0; i < n; ++i) {
    const double here = std::abs(c[i]);
    bool is_max = false;
    if (i == 0) {
      is_max = here > std::abs(c[1]);
    } else if (i == n - 1) {
      is_max = here > std::abs(c[n - 2]);
    } else {
      const double left = std::abs(c[i - 1]);
      const double right = std::abs(c[i + 1]);
      is_max = here >= left && here >= right && (here > left || here > right);
    }
    if (is_max) out[i] = here;
  }
  return out;
}

double universal_threshold(std::span<const double> m) {
  const std::size_t n = m.size();
  if (n < 2) throw DegenerateInput("universal threshold needs at least 2 values, got " + std::to_string(n));
  const double mean = std::accumulate(m.begin(), m.end(), 0.0) / static_cast<double>(n);
  double ss = 0.0;
  for (double v : m) ss += (v - mean) * (v - mean);
  const double sigma = std::sqrt(ss / static_cast<double>(n));
  return sigma * std::sqrt(2.0 * std::log(static_cast<double>(n)));
}

double ipa(const PupilSeries& series, const WaveletFilter& filter) {
  if (max_level(series.size(), filter.length()) < 2) {
    throw SegmentTooShort(std::to_string(series.size()) + " samples cannot support a 2-level decomposition with a " +
                          std::to_string(filter.length()) + "-tap filter");
  }
  const auto centered = center(series.d);
  const auto dec = dwt_multilevel(centered.x, filter, 2);
  const auto cd2 = scaled_detail(dec, 2, centered.peak);
  if (cd2.size() < 2) throw SegmentTooShort("level-2 details hold fewer than 2 coefficients");
  return static_cast<double>(count_ipa_maxima(cd2)) / series.duration_s();
}

PupilIndices lhipa(const PupilSeries& series, const WaveletFilter& filter) {
  PupilIndices out;
  out.segment_duration_s = series.duration_s();
  const int wmax = max_level(series.size(), filter.length());
  const int hif = kHighFrequencyLevel;
  const int lof = wmax / 2;
  if (lof <= hif) {
    out.skipped = SkipReason::TooShort;
    return out;
  }

  const auto centered = center(series.d);
  const auto dec = dwt_multilevel(centered.x, filter, lof);
  const auto high = scaled_detail(dec, hif, centered.peak);
  const auto low = scaled_detail(dec, lof, centered.peak);

  std::vector<double> ratio(low.size());
  const std::size_t stride = std::size_t{1} << static_cast<unsigned>(lof - hif);
  for (std::size_t i = 0; i < low.size(); ++i) {
    const std::size_t j = std::min(i * stride, high.size() - 1);
    ratio[i] = low[i] / floored(high[j]);
  }

  const auto maxima = modulus_maxima(ratio);
  const double lambda = universal_threshold(maxima);
  std::size_t kept = 0;
  for (double v : maxima) kept += (v > 0.0 && v < lambda) ? 1 : 0;

  out.lhipa = static_cast<double>(kept) / out.segment_duration_s;
  out.ipa = static_cast<double>(count_ipa_maxima(scaled_detail(dec, 2, centered.peak))) / out.segment_duration_s;
  return out;
}

PerAoiPupilResult lhipa_per_aoi(const PupilSeries& series, std::span<const AoiVisit> visits, const RunConfig& config) {
  const auto& filter = daubechies_filter(config.wavelet_order);
  struct Sums {
    double lhipa = 0.0;
    double ipa = 0.0;
    int used = 0;
  };
  std::map<AoiName, Sums> sums;
  PerAoiPupilResult out;

  for (const auto& v : visits) {
    if (v.begin > v.end || v.end > series.size()) {
      throw std::out_of_range("visit samples [" + std::to_string(v.begin) + ", " + std::to_string(v.end) +
                              ") exceed the series length " + std::to_string(series.size()));
    }
    const double duration_ms = static_cast<double>(v.n_samples()) * series.dt_us / 1000.0;
    std::optional<SkipReason> skip;
    PupilIndices indices;
    if (duration_ms < config.min_segment_ms) {
      skip = SkipReason::BelowMinSegment;
    } else {
      indices = lhipa(series.slice(v.begin, v.end), filter);
      skip = indices.skipped;
    }
    if (skip) {
      ++out.skipped[*skip];
      ++out.skipped_by_aoi[v.aoi_name];
      continue;
    }
    auto& s = sums[v.aoi_name];
    s.lhipa += indices.lhipa;
    s.ipa += indices.ipa;
    ++s.used;
  }

  for (const auto& [aoi, s] : sums) {
    AoiPupilActivity a;
    a.lhipa = s.lhipa / s.used;
    a.ipa = s.ipa / s.used;
    a.used_visits = s.used;
    const auto it = out.skipped_by_aoi.find(aoi);
    a.skipped_visits = it == out.skipped_by_aoi.end() ? 0 : it->second;
    out.by_aoi[aoi] = a;
  }
  return out;
}

}  // namespace gazemetrics
