#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ssvep/ensemble.hpp"
#include "ssvep/metrics.hpp"
#include "ssvep/protocol.hpp"

namespace ssvep {

struct ExperimentConfig {
  std::vector<PreprocessConfig> preprocess = default_preprocess_configs();
  std::vector<TrainableSpec> classifiers = default_classifier_specs();
  double train_fraction = 0.8;
  std::uint64_t split_seed = 0;
  double stimulation_seconds = 5.0;
  // When set, compute-base ITR uses this instead of measured wall time
  // (keeps reports reproducible byte for byte).
  std::optional<double> avg_classification_seconds_override;
};

struct TrialOutcome {
  int ordinal = 0;
  CommandLabel truth = -1;
  CommandLabel predicted = -1;
  std::vector<double> tally;
  std::vector<CommandLabel> per_variant;
};

struct VariantReport {
  std::string name;
  double weight = 0.0;         // training accuracy
  double test_accuracy = 0.0;
  double itr_stimulation = 0.0;
  bool pca_degenerate = false;
  bool convergence_warning = false;
};

struct ExperimentReport {
  int n_train = 0;
  int n_test = 0;
  int n_labels = 0;
  std::vector<VariantReport> variants;
  double ensemble_accuracy = 0.0;
  double ensemble_itr_stimulation = 0.0;
  double stimulation_seconds = 5.0;
  std::optional<double> ensemble_itr_compute;
  double avg_classification_seconds = 0.0;  // measured, or the override
  bool compute_seconds_overridden = false;
  std::vector<std::vector<int>> confusion;  // [truth][predicted], ensemble
  std::vector<TrialOutcome> outcomes;
  std::optional<TTestResult> significance;  // ensemble vs best variant, per-trial
  std::string significance_note;
};

// Split the dataset (subject-wise, stratified), build the ensemble on the
// training part, evaluate every variant and the weighted vote on the test
// part.
ExperimentReport run_offline_experiment(const SubjectDataset& dataset,
                                        const ExperimentConfig& config);

// Same evaluation phase on an already-built ensemble and explicit test set;
// run_offline_experiment delegates here after splitting and training.
ExperimentReport evaluate_ensemble(const EnsembleModel& model,
                                   const std::vector<TrialRecording>& test_trials,
                                   const ExperimentConfig& config, int n_train);

// Pull-based online loop. Sources yield trials until nullopt; sinks receive
// one record per pulled trial, in arrival order.
using TrialSource = std::function<std::optional<TrialRecording>()>;

struct OnlineRecord {
  int ordinal = 0;
  bool error = false;
  std::string error_detail;
  CommandLabel predicted = -1;
  std::string command_name;
  std::optional<CommandLabel> truth;
  std::vector<double> tally;
  double seconds = 0.0;  // classification wall time
};

using CommandSink = std::function<void(const OnlineRecord&)>;

struct OnlineReport {
  std::vector<OnlineRecord> records;
  int commands_emitted = 0;
  int errors = 0;
  std::optional<double> accuracy;  // over labeled trials only
  double avg_classification_seconds = 0.0;
};

// Classify each incoming trial and emit the result. Malformed trials (shape
// mismatch or non-finite samples) produce an error record and the stream
// continues.
OnlineReport run_online_session(const EnsembleModel& model, TrialSource source,
                                CommandSink sink);

TrialSource make_replay_source(const std::vector<TrialRecording>& trials);

}  // namespace ssvep
