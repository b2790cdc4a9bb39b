#pragma once

#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "gazemetrics/aoi.hpp"
#include "gazemetrics/config.hpp"
#include "gazemetrics/preprocess.hpp"
#include "gazemetrics/wavelet.hpp"

namespace gazemetrics {

// Ratio denominators smaller than this in magnitude are clamped to it.
inline constexpr double kRatioDenominatorFloor = 1e-12;

// Detail coefficients within this fraction of the segment's peak deviation
// from its mean are rounding residue and are treated as exact zeros.
inline constexpr double kDetailNoiseFloor = 1e-10;

enum class SkipReason {
  BelowMinSegment,  // visit shorter than min_segment_ms
  TooShort,         // decomposition too shallow: lof <= hif
};

std::string_view to_string(SkipReason r);

// out[i] = |c[i]| where |c[i]| is >= both neighbours and > at least one of
// them (edges compare their single neighbour); 0 elsewhere.
std::vector<double> modulus_maxima(std::span<const double> c);

// sigma * sqrt(2 ln n) with sigma the population standard deviation.
// Throws DegenerateInput for n < 2.
double universal_threshold(std::span<const double> m);

// Level-2 detail maxima above the universal threshold, per second.
// Throws SegmentTooShort when the series cannot support two levels.
double ipa(const PupilSeries& series, const WaveletFilter& filter);

struct PupilIndices {
  double lhipa = 0.0;  // 1/s
  double ipa = 0.0;    // 1/s
  double segment_duration_s = 0.0;
  std::optional<SkipReason> skipped;
};

// LF/HF detail-ratio maxima below the universal threshold, per second.
// Segments whose decomposition is too shallow come back skipped.
PupilIndices lhipa(const PupilSeries& series, const WaveletFilter& filter);

struct AoiPupilActivity {
  double lhipa = 0.0;  // mean over used visits
  double ipa = 0.0;    // mean over used visits
  int used_visits = 0;
  int skipped_visits = 0;
};

struct PerAoiPupilResult {
  std::map<AoiName, AoiPupilActivity> by_aoi;  // AOIs with at least one used visit
  std::map<SkipReason, int> skipped;           // visit skips per reason, all AOIs
  std::map<AoiName, int> skipped_by_aoi;       // includes AOIs absent from by_aoi
};

// Visit ranges index `series`; throws std::out_of_range when one does not fit.
PerAoiPupilResult lhipa_per_aoi(const PupilSeries& series, std::span<const AoiVisit> visits,
                                const RunConfig& config);

}  // namespace gazemetrics
