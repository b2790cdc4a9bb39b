#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gazemetrics/aoi.hpp"
#include "gazemetrics/config.hpp"
#include "gazemetrics/data_model.hpp"
#include "gazemetrics/ivt.hpp"
#include "gazemetrics/preprocess.hpp"
#include "gazemetrics/stats.hpp"

namespace gazemetrics {

enum class TrialStatus { Ok, AllMissing, WindowOutOfRange };

std::string_view to_string(TrialStatus s);

struct TrialResult {
  TrialStatus status = TrialStatus::Ok;
  std::string message;
  TrialMetrics metrics;

  // Intermediates, kept for debug dumps.
  PupilSeries window_series;
  std::vector<FixationEvent> fixations;
  std::vector<AoiVisit> visits;
};

// Runs one trial end to end. Trial-level data problems come back as a
// status; configuration problems (missing geometry, missing AOIs) throw.
TrialResult process_trial(const TrialRecord& trial, const AoiLayout& aois, const RunConfig& config);

// Processes every trial on `jobs` worker threads. Results are in input
// order regardless of scheduling.
std::vector<TrialResult> process_session(const std::vector<TrialRecord>& trials, const AoiLayout& aois,
                                         const RunConfig& config, int jobs);

// Throws SchemaError naming the first stimulus in the session without AOIs.
void check_aoi_coverage(const std::vector<TrialRecord>& trials, const AoiLayout& aois);

}  // namespace gazemetrics
