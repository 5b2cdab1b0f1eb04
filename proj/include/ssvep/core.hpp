#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ssvep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense command index, 0..n_commands-1, in stimulus-list order.
using CommandLabel = int;

// One flickering on-screen button: the command it triggers and its
// stimulation frequency. Color is carried as metadata only.
struct StimulusSpec {
  CommandLabel label_id = 0;
  std::string name;
  double frequency_hz = 0.0;
  std::string color = "green";
};

// Recording geometry of the headset session. Defaults match a 14-channel
// saline headset sampling at 257 Hz with 5 s flicker windows.
struct RecordingSpec {
  double sampling_rate_hz = 257.0;
  std::vector<std::string> channels = default_channels();
  int samples_per_trial = 1285;
  double flicker_seconds = 5.0;
  double rest_seconds = 5.0;

  static std::vector<std::string> default_channels();

  double nyquist_hz() const { return sampling_rate_hz / 2.0; }
  double spectral_resolution_hz() const {
    return sampling_rate_hz / static_cast<double>(samples_per_trial);
  }
  int channel_index(const std::string& name) const;  // -1 if unknown
};

// One 5 s flicker window: samples_per_trial rows, one column per channel,
// ear-referenced potentials in nominal microvolts.
struct TrialRecording {
  Matrix samples;
  CommandLabel true_label = -1;  // -1 when ground truth is absent (online)
  int trial_index = 0;
  int session_index = 0;
  std::string subject_id;

  bool has_label() const { return true_label >= 0; }
};

// How a dataset came into existence; used to validate schedule conformance
// and to reproduce generated data.
struct DatasetProvenance {
  std::uint64_t seed = 0;
  std::string profile;                       // generator profile summary, or ""
  std::vector<std::string> source_paths;     // when loaded from disk
  std::vector<int> trials_per_session;       // schedule shape at generation time
};

struct SubjectDataset {
  RecordingSpec spec;
  std::vector<StimulusSpec> stimuli;
  std::vector<TrialRecording> trials;
  DatasetProvenance provenance;
};

// A single violated invariant. trial_index is -1 for dataset-level issues.
struct Violation {
  int trial_index = -1;
  std::string rule;
  std::string detail;
};

std::vector<StimulusSpec> default_stimuli();

// Checks every structural invariant of the dataset and its specs.
// Violations are data, not errors: an empty report means the dataset is
// well formed.
std::vector<Violation> validate_dataset(const SubjectDataset& dataset);

// Invariant checks shared by validate_dataset and config loading. Each
// returns violations rather than throwing so callers can aggregate.
std::vector<Violation> validate_stimuli(const std::vector<StimulusSpec>& stimuli,
                                        const RecordingSpec& spec);
std::vector<Violation> validate_recording_spec(const RecordingSpec& spec);

std::string format_violations(const std::vector<Violation>& violations);

}  // namespace ssvep
