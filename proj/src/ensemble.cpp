#include "ssvep/ensemble.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

namespace ssvep {

std::vector<PreprocessConfig> default_preprocess_configs(
    const std::vector<std::string>& channels) {
  std::vector<PreprocessConfig> configs(4);
  configs[0].use_car = true;
  configs[0].use_pca = true;
  configs[1].use_car = true;
  configs[1].use_pca = false;
  configs[2].use_car = false;
  configs[2].use_pca = true;
  configs[3].use_car = false;
  configs[3].use_pca = false;
  for (auto& c : configs) c.channels = channels;
  return configs;
}

std::vector<TrainableSpec> default_classifier_specs(std::uint64_t seed) {
  TrainableSpec svm;
  svm.kind = ClassifierKind::svm_linear;
  svm.seed = seed;
  TrainableSpec forest;
  forest.kind = ClassifierKind::random_forest;
  forest.seed = seed;
  return {svm, forest};
}

EnsembleModel build_ensemble(const std::vector<TrialRecording>& train_trials,
                             const std::vector<CommandLabel>& labels,
                             const std::vector<TrainableSpec>& classifier_specs,
                             const std::vector<PreprocessConfig>& configs,
                             const RecordingSpec& rec_spec,
                             const std::vector<StimulusSpec>& stimuli) {
  if (train_trials.empty()) throw std::invalid_argument("build_ensemble: empty train set");
  if (train_trials.size() != labels.size()) {
    throw std::invalid_argument("build_ensemble: label count does not match trials");
  }
  if (classifier_specs.empty() || configs.empty()) {
    throw std::invalid_argument("build_ensemble: need at least one classifier and config");
  }

  EnsembleModel model;
  model.rec_spec = rec_spec;
  model.stimuli = stimuli;

  // Raw band features depend only on (channels, use_car); share them across
  // variants. Fitted transforms stay per-variant.
  std::map<std::string, Matrix> raw_cache;
  const auto raw_features = [&](const PreprocessConfig& config) -> const Matrix& {
    std::ostringstream key;
    for (const auto& ch : config.channels) key << ch << ",";
    key << "|car=" << config.use_car << "|hw=" << config.half_width_hz << "|h=";
    for (const int h : config.harmonics) key << h << ",";
    auto it = raw_cache.find(key.str());
    if (it == raw_cache.end()) {
      Matrix raw;
      for (std::size_t t = 0; t < train_trials.size(); ++t) {
        const Vector f = band_features(train_trials[t], config, rec_spec, stimuli);
        if (t == 0) raw.resize(static_cast<Eigen::Index>(train_trials.size()), f.size());
        raw.row(static_cast<Eigen::Index>(t)) = f.transpose();
      }
      it = raw_cache.emplace(key.str(), std::move(raw)).first;
    }
    return it->second;
  };

  for (const auto& classifier : classifier_specs) {
    for (const auto& config : configs) {
      EnsembleVariant variant;
      variant.config = config;
      FitResult fit = fit_preprocess_from_features(raw_features(config), config);
      variant.fitted = std::move(fit.fitted);
      variant.model = train(classifier, fit.train_features, labels);
      variant.weight = variant.model.training_accuracy;
      variant.name = to_string(classifier.kind) + "/" + config.name();
      if (variant.fitted.pca_degenerate) variant.name += " (pca degenerate)";
      model.variants.push_back(std::move(variant));
    }
  }
  return model;
}

VoteResult weighted_vote(const std::vector<CommandLabel>& predictions,
                         const std::vector<double>& weights, int n_labels) {
  if (predictions.empty()) throw std::invalid_argument("weighted_vote: empty prediction list");
  if (predictions.size() != weights.size()) {
    throw std::invalid_argument("weighted_vote: predictions and weights differ in length");
  }
  if (n_labels < 1) throw std::invalid_argument("weighted_vote: need at least one label");

  VoteResult result;
  result.tally.setZero(n_labels);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("weighted_vote: negative weight");
    const CommandLabel l = predictions[i];
    if (l < 0 || l >= n_labels) {
      throw std::invalid_argument("weighted_vote: prediction out of label range");
    }
    result.tally[l] += weights[i];
  }
  result.winner = argmax_lowest_tie(result.tally);
  return result;
}

EnsemblePrediction ensemble_predict(const EnsembleModel& model,
                                    const TrialRecording& trial) {
  if (model.variants.empty()) throw std::invalid_argument("ensemble_predict: empty model");
  EnsemblePrediction out;
  std::vector<double> weights;
  weights.reserve(model.variants.size());
  for (const auto& variant : model.variants) {
    const FeatureVector features =
        preprocess_trial(trial, variant.config, variant.fitted, model.rec_spec, model.stimuli);
    out.per_variant.push_back(predict(variant.model, features.values));
    weights.push_back(variant.weight);
  }
  const VoteResult vote = weighted_vote(out.per_variant, weights, model.n_labels());
  out.winner = vote.winner;
  out.tally = vote.tally;
  return out;
}

}  // namespace ssvep
