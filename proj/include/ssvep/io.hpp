#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ssvep/ensemble.hpp"
#include "ssvep/experiment.hpp"
#include "ssvep/synth.hpp"

namespace ssvep {

// --------------------------------------------------------------------------
// Trial files: '#'-prefixed key-value header (subject, session, trial, label,
// sampling rate, channel names) followed by one comma-separated row per
// sample, one column per channel, 9 significant digits.

void write_trial(std::ostream& out, const TrialRecording& trial,
                 const RecordingSpec& spec);
void write_trial(const std::filesystem::path& path, const TrialRecording& trial,
                 const RecordingSpec& spec);

// Parses and validates against `spec`; errors cite the offending row/column.
TrialRecording read_trial(std::istream& in, const RecordingSpec& spec,
                          const std::string& origin = "<stream>");
TrialRecording read_trial(const std::filesystem::path& path, const RecordingSpec& spec);

// Dataset directory: dataset.json manifest plus one trial file per trial.
void save_dataset(const std::filesystem::path& dir, const SubjectDataset& dataset);
SubjectDataset load_dataset(const std::filesystem::path& dir);

// --------------------------------------------------------------------------
// Run configuration (JSON). An empty file or {} yields the full defaults:
// 12/10/8.57 Hz green stimuli, 257 Hz x 1285-sample trials on the 14-channel
// montage, O1/O2 analysis channels, harmonics {1,2}, 0.5 Hz half windows,
// 0.95 PCA threshold, linear SVM + random forest over the four preprocessing
// arms, 80/20 split, stimulation-time ITR base. Unknown keys are rejected
// with their full path.

struct SynthSettings {
  std::string profile = "clean";  // clean | moderate | noisy
  std::uint64_t seed = 7;
  std::optional<double> occipital_gain, other_gain;
  std::optional<double> noise_white_level, noise_pink_level;
  std::optional<double> freq_jitter_hz, alpha_level;
  std::optional<double> blink_rate_per_trial, motion_rate_per_trial;
  std::optional<ArtifactSpec> artifacts;
};

struct RunConfig {
  RecordingSpec recording;
  std::vector<StimulusSpec> stimuli = default_stimuli();
  std::vector<std::string> channels = {"O1", "O2"};
  std::vector<int> harmonics = {1, 2};
  double half_width_hz = 0.5;
  double pca_variance_threshold = 0.95;
  std::vector<TrainableSpec> classifiers = default_classifier_specs();
  double train_fraction = 0.8;
  std::uint64_t split_seed = 0;
  std::uint64_t schedule_seed = 0;
  int n_sessions = 5;
  ItrTimeBase itr_time_base = ItrTimeBase::stimulation;
  std::optional<double> avg_classification_seconds;
  SynthSettings synth;

  ExperimentConfig experiment_config() const;
  std::vector<PreprocessConfig> preprocess_configs() const;
};

RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text, const std::string& origin);
std::string save_config(const RunConfig& config);

// The named generator presets; `settings` overrides are applied on top.
SubjectProfile make_profile(const SynthSettings& settings, const RecordingSpec& spec);

// --------------------------------------------------------------------------
// Ensemble model file (versioned JSON).

void save_model(const std::filesystem::path& path, const EnsembleModel& model);
EnsembleModel load_model(const std::filesystem::path& path);

// --------------------------------------------------------------------------
// Experiment reports: machine-readable JSON plus a text summary table shaped
// like one accuracy/ITR row per variant and one for the ensemble. With
// include_timings off, the timestamp and every measured-time field are
// omitted so identical runs serialize byte-identically.

std::string report_to_json(const ExperimentReport& report, bool include_timings);
void save_report(const std::filesystem::path& path, const ExperimentReport& report,
                 bool include_timings);
ExperimentReport load_report(const std::filesystem::path& path);
std::string render_report_table(const ExperimentReport& report);

}  // namespace ssvep
