#pragma once

#include <string>
#include <vector>

#include "ssvep/classifiers.hpp"
#include "ssvep/core.hpp"
#include "ssvep/preprocess.hpp"

namespace ssvep {

struct EnsembleVariant {
  std::string name;  // e.g. "svm_linear/car+pca"
  PreprocessConfig config;
  FittedPreprocess fitted;
  TrainedModel model;
  double weight = 0.0;  // training accuracy of the variant
};

struct EnsembleModel {
  RecordingSpec rec_spec;
  std::vector<StimulusSpec> stimuli;
  std::vector<EnsembleVariant> variants;

  int n_labels() const { return static_cast<int>(stimuli.size()); }
};

// The four preprocessing arms: CAR+PCA, CAR only, PCA only, neither — all on
// the given channel subset.
std::vector<PreprocessConfig> default_preprocess_configs(
    const std::vector<std::string>& channels = {"O1", "O2"});

// The default variant bank pairs each preprocessing arm with a linear SVM
// and a random forest (eight variants).
std::vector<TrainableSpec> default_classifier_specs(std::uint64_t seed = 0);

// Fit every (classifier, preprocessing) pair on the same training trials in
// the same order; each variant's weight is its training accuracy. Variants
// whose PCA degenerates to zero variance are trained without PCA and keep
// fitted.pca_degenerate set.
EnsembleModel build_ensemble(const std::vector<TrialRecording>& train_trials,
                             const std::vector<CommandLabel>& labels,
                             const std::vector<TrainableSpec>& classifier_specs,
                             const std::vector<PreprocessConfig>& configs,
                             const RecordingSpec& rec_spec,
                             const std::vector<StimulusSpec>& stimuli);

struct VoteResult {
  CommandLabel winner = 0;
  Vector tally;  // summed weight per label
};

// tally[l] = sum of weights over variants that predicted l; the winner is
// the argmax with exact ties resolved toward the lower label.
VoteResult weighted_vote(const std::vector<CommandLabel>& predictions,
                         const std::vector<double>& weights, int n_labels);

struct EnsemblePrediction {
  CommandLabel winner = 0;
  Vector tally;
  std::vector<CommandLabel> per_variant;
};

EnsemblePrediction ensemble_predict(const EnsembleModel& model,
                                    const TrialRecording& trial);

}  // namespace ssvep
