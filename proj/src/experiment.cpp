#include "ssvep/experiment.hpp"

#include <chrono>
#include <memory>
#include <stdexcept>

namespace ssvep {

namespace {

double variant_itr(double accuracy, int n_labels, double stimulation_seconds) {
  const double bits = bits_per_trial(accuracy, n_labels);
  return itr_bits_per_minute(bits, q_per_minute_from_seconds(stimulation_seconds));
}

}  // namespace

ExperimentReport evaluate_ensemble(const EnsembleModel& model,
                                   const std::vector<TrialRecording>& test_trials,
                                   const ExperimentConfig& config, int n_train) {
  if (test_trials.empty()) {
    throw std::invalid_argument("evaluate_ensemble: empty test set");
  }
  const int n_labels = model.n_labels();
  const std::size_t n_variants = model.variants.size();

  ExperimentReport report;
  report.n_train = n_train;
  report.n_test = static_cast<int>(test_trials.size());
  report.n_labels = n_labels;
  report.confusion.assign(static_cast<std::size_t>(n_labels),
                          std::vector<int>(static_cast<std::size_t>(n_labels), 0));

  std::vector<std::vector<CommandLabel>> variant_preds(n_variants);
  std::vector<CommandLabel> ensemble_preds;
  std::vector<CommandLabel> truths;
  double total_seconds = 0.0;

  for (std::size_t i = 0; i < test_trials.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    const EnsemblePrediction pred = ensemble_predict(model, test_trials[i]);
    const auto stop = std::chrono::steady_clock::now();
    total_seconds += std::chrono::duration<double>(stop - start).count();

    TrialOutcome outcome;
    outcome.ordinal = static_cast<int>(i);
    outcome.truth = test_trials[i].true_label;
    outcome.predicted = pred.winner;
    outcome.tally.assign(pred.tally.data(), pred.tally.data() + pred.tally.size());
    outcome.per_variant = pred.per_variant;
    report.outcomes.push_back(std::move(outcome));

    for (std::size_t v = 0; v < n_variants; ++v) {
      variant_preds[v].push_back(pred.per_variant[v]);
    }
    ensemble_preds.push_back(pred.winner);
    truths.push_back(test_trials[i].true_label);
    report.confusion[static_cast<std::size_t>(test_trials[i].true_label)]
                    [static_cast<std::size_t>(pred.winner)]++;
  }

  for (std::size_t v = 0; v < n_variants; ++v) {
    VariantReport vr;
    vr.name = model.variants[v].name;
    vr.weight = model.variants[v].weight;
    vr.test_accuracy = accuracy(variant_preds[v], truths);
    vr.itr_stimulation =
        variant_itr(vr.test_accuracy, n_labels, config.stimulation_seconds);
    vr.pca_degenerate = model.variants[v].fitted.pca_degenerate;
    vr.convergence_warning = model.variants[v].model.convergence_warning;
    report.variants.push_back(std::move(vr));
  }

  report.ensemble_accuracy = accuracy(ensemble_preds, truths);
  report.stimulation_seconds = config.stimulation_seconds;
  report.ensemble_itr_stimulation =
      variant_itr(report.ensemble_accuracy, n_labels, config.stimulation_seconds);

  if (config.avg_classification_seconds_override) {
    report.avg_classification_seconds = *config.avg_classification_seconds_override;
    report.compute_seconds_overridden = true;
  } else {
    report.avg_classification_seconds =
        total_seconds / static_cast<double>(test_trials.size());
  }
  if (report.avg_classification_seconds > 0.0) {
    report.ensemble_itr_compute = itr_bits_per_minute(
        bits_per_trial(report.ensemble_accuracy, n_labels),
        q_per_minute_from_seconds(report.avg_classification_seconds));
  }

  // Per-trial paired comparison of the ensemble against the single best
  // variant (by test accuracy, ties to the earlier variant).
  std::size_t best = 0;
  for (std::size_t v = 1; v < n_variants; ++v) {
    if (report.variants[v].test_accuracy > report.variants[best].test_accuracy) best = v;
  }
  std::vector<double> ensemble_correct, best_correct;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    ensemble_correct.push_back(ensemble_preds[i] == truths[i] ? 1.0 : 0.0);
    best_correct.push_back(variant_preds[best][i] == truths[i] ? 1.0 : 0.0);
  }
  try {
    report.significance = paired_t_test(ensemble_correct, best_correct);
    report.significance_note = "ensemble vs best variant (" +
                               report.variants[best].name + "), per-trial correctness";
  } catch (const std::invalid_argument&) {
    report.significance_note = "ensemble vs best variant (" +
                               report.variants[best].name +
                               "): identical per-trial outcomes, t-test degenerate";
  }
  return report;
}

ExperimentReport run_offline_experiment(const SubjectDataset& dataset,
                                        const ExperimentConfig& config) {
  {
    const auto violations = validate_dataset(dataset);
    if (!violations.empty()) {
      throw std::invalid_argument("run_offline_experiment: invalid dataset:\n" +
                                  format_violations(violations));
    }
  }
  const SplitResult split =
      split_subjectwise_stratified(dataset, config.train_fraction, config.split_seed);
  if (split.test.empty()) {
    throw std::invalid_argument(
        "run_offline_experiment: split produced an empty test set");
  }
  std::vector<CommandLabel> labels;
  labels.reserve(split.train.size());
  for (const auto& t : split.train) labels.push_back(t.true_label);

  const EnsembleModel model =
      build_ensemble(split.train, labels, config.classifiers, config.preprocess,
                     dataset.spec, dataset.stimuli);
  return evaluate_ensemble(model, split.test, config,
                           static_cast<int>(split.train.size()));
}

TrialSource make_replay_source(const std::vector<TrialRecording>& trials) {
  auto index = std::make_shared<std::size_t>(0);
  auto copy = std::make_shared<std::vector<TrialRecording>>(trials);
  return [index, copy]() -> std::optional<TrialRecording> {
    if (*index >= copy->size()) return std::nullopt;
    return (*copy)[(*index)++];
  };
}

OnlineReport run_online_session(const EnsembleModel& model, TrialSource source,
                                CommandSink sink) {
  OnlineReport report;
  int ordinal = 0;
  double total_seconds = 0.0;
  int labeled = 0;
  int labeled_correct = 0;

  while (auto trial = source()) {
    OnlineRecord record;
    record.ordinal = ordinal++;

    const bool shape_ok =
        trial->samples.rows() == model.rec_spec.samples_per_trial &&
        trial->samples.cols() == static_cast<Eigen::Index>(model.rec_spec.channels.size());
    if (!shape_ok || !trial->samples.allFinite()) {
      record.error = true;
      record.error_detail = !shape_ok ? "sample matrix shape does not match recording spec"
                                      : "sample matrix contains non-finite values";
      ++report.errors;
      sink(record);
      report.records.push_back(std::move(record));
      continue;
    }

    const auto start = std::chrono::steady_clock::now();
    const EnsemblePrediction pred = ensemble_predict(model, *trial);
    const auto stop = std::chrono::steady_clock::now();
    record.seconds = std::chrono::duration<double>(stop - start).count();
    total_seconds += record.seconds;

    record.predicted = pred.winner;
    record.command_name =
        model.stimuli[static_cast<std::size_t>(pred.winner)].name;
    record.tally.assign(pred.tally.data(), pred.tally.data() + pred.tally.size());
    if (trial->has_label()) {
      record.truth = trial->true_label;
      ++labeled;
      if (pred.winner == trial->true_label) ++labeled_correct;
    }
    ++report.commands_emitted;
    sink(record);
    report.records.push_back(std::move(record));
  }

  if (labeled > 0) {
    report.accuracy = static_cast<double>(labeled_correct) / static_cast<double>(labeled);
  }
  if (report.commands_emitted > 0) {
    report.avg_classification_seconds =
        total_seconds / static_cast<double>(report.commands_emitted);
  }
  return report;
}

}  // namespace ssvep
