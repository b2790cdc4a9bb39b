#include "gazemetrics/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "gazemetrics/error.hpp"
#include "gazemetrics/pupil_indices.hpp"

namespace gazemetrics {

std::string_view to_string(TrialStatus s) {
  switch (s) {
    case TrialStatus::Ok: return "ok";
    case TrialStatus::AllMissing: return "AllMissing";
    case TrialStatus::WindowOutOfRange: return "WindowOutOfRange";
  }
  return "ok";
}

void check_aoi_coverage(const std::vector<TrialRecord>& trials, const AoiLayout& aois) {
  for (const auto& t : trials) {
    if (!aois.contains(t.stimulus_id)) {
      throw SchemaError("stimulus '" + t.stimulus_id + "' (participant " + t.participant_id +
                        ") has no AOI definitions");
    }
  }
}

TrialResult process_trial(const TrialRecord& trial, const AoiLayout& aois, const RunConfig& config) {
  TrialResult out;
  out.metrics.participant_id = trial.participant_id;
  out.metrics.group = trial.group;
  out.metrics.stimulus_id = trial.stimulus_id;
  out.metrics.pain_label = trial.pain_label;

  const auto layout = aois.find(trial.stimulus_id);
  if (layout == aois.end()) throw SchemaError("stimulus '" + trial.stimulus_id + "' has no AOI definitions");
  const auto& polygons = layout->second;

  const auto grid = align_to_grid(trial.samples, config.sample_rate_hz);
  try {
    out.window_series = preprocess_trial(grid, config);
  } catch (const AllMissing& e) {
    out.status = TrialStatus::AllMissing;
    out.message = e.what();
    return out;
  } catch (const WindowOutOfRange& e) {
    out.status = TrialStatus::WindowOutOfRange;
    out.message = e.what();
    return out;
  }

  const auto velocities = angular_velocity(grid, config);
  const auto classification = classify(grid, velocities, config);
  out.fixations = window_fixations(classification.fixations, grid, config);

  const auto w = window_bounds(config);
  const std::span<const GazeSample> window(grid.data() + w.begin, w.size());
  out.visits = build_visits(window, polygons, config);

  out.metrics.traditional = traditional_metrics(out.fixations, polygons);
  out.metrics.pupil = lhipa_per_aoi(out.window_series, out.visits, config);
  for (auto& [aoi, m] : out.metrics.traditional) {
    const auto it = out.metrics.pupil.by_aoi.find(aoi);
    m.visit_count = it == out.metrics.pupil.by_aoi.end() ? 0 : it->second.used_visits;
  }
  return out;
}

std::vector<TrialResult> process_session(const std::vector<TrialRecord>& trials, const AoiLayout& aois,
                                         const RunConfig& config, int jobs) {
  std::vector<TrialResult> results(trials.size());
  const auto workers = static_cast<std::size_t>(std::clamp<int>(jobs, 1, std::max<int>(1, static_cast<int>(trials.size()))));
  if (workers <= 1) {
    for (std::size_t i = 0; i < trials.size(); ++i) results[i] = process_trial(trials[i], aois, config);
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::size_t failed_index = trials.size();
  const auto work = [&] {
    for (std::size_t i = next++; i < trials.size(); i = next++) {
      try {
        results[i] = process_trial(trials[i], aois, config);
      } catch (...) {
        // Report the earliest failing trial so the error does not depend on scheduling.
        std::lock_guard lock(failure_mutex);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t k = 0; k < workers; ++k) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace gazemetrics
