#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gazemetrics/aoi.hpp"
#include "gazemetrics/data_model.hpp"
#include "gazemetrics/types.hpp"

namespace gazemetrics {

struct GapSpec {
  double start_ms = 0.0;
  double duration_ms = 0.0;
};

struct DwellSpec {
  AoiName aoi = AoiName::Nose;
  double dwell_ms = 0.0;
  std::optional<double> hf_amplitude_mm;  // overrides the trial amplitude during this dwell
};

struct SynthSpec {
  std::uint64_t seed = 1;
  int n_participants = 1;
  std::optional<int> n_experts;  // defaults to the 44:29 expert split, rounded
  int n_trials = 20;             // per participant, one stimulus each
  int sample_rate_hz = 300;
  double trial_duration_ms = 2000.0;

  double baseline_mm = 3.5;
  double lf_hz = 0.5;
  double lf_amplitude_mm = 0.2;
  double hf_hz = 76.0;
  double hf_amplitude_mm = 0.1;
  // When set, trial k of K gets hf_amplitude_mm + (max - hf_amplitude_mm) * k / (K - 1).
  std::optional<double> hf_amplitude_max_mm;
  double noise_sd_mm = 0.01;

  std::vector<GapSpec> gaps;
  // Empty means a random scanpath per trial.
  std::vector<DwellSpec> scanpath;
  double random_dwell_min_ms = 150.0;
  double random_dwell_max_ms = 650.0;
  double gaze_jitter_px = 1.0;

  int experts() const;
  int total_trials() const { return n_participants * n_trials; }
  // Throws SpecError.
  void validate() const;
};

SynthSpec parse_synth_spec(std::string_view json_text);

struct TrialTruth {
  std::string participant_id;
  std::string stimulus_id;
  double hf_amplitude_mm = 0.0;
  // Maximal same-AOI runs of the intended per-sample AOI over the whole trial grid.
  std::vector<AoiVisit> visits;
};

struct SynthSession {
  std::vector<TrialRecord> trials;
  AoiLayout aois;
  std::vector<TrialTruth> truth;
};

std::string stimulus_name(int index);
std::string participant_name(int index);

// Schematic face in screen pixels, shifted slightly per stimulus.
AoiLayout face_layout(const std::vector<std::string>& stimulus_ids);

SynthSession generate(const SynthSpec& spec);

std::string ground_truth_json(const SynthSpec& spec, const SynthSession& session);

}  // namespace gazemetrics
