#include "ssvep/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ssvep/rng.hpp"

namespace ssvep {

std::vector<CommandLabel> ScheduleSession::all_labels() const {
  std::vector<CommandLabel> out = part_a;
  out.insert(out.end(), part_b.begin(), part_b.end());
  return out;
}

int ProtocolSchedule::total_trials() const {
  int n = 0;
  for (const auto& s : sessions) {
    n += static_cast<int>(s.part_a.size() + s.part_b.size());
  }
  return n;
}

std::vector<int> ProtocolSchedule::trials_per_session() const {
  std::vector<int> out;
  out.reserve(sessions.size());
  for (const auto& s : sessions) {
    out.push_back(static_cast<int>(s.part_a.size() + s.part_b.size()));
  }
  return out;
}

namespace {

// Seeded Fisher-Yates; uniform_index keeps the stream portable.
void shuffle_labels(std::vector<CommandLabel>& labels, Rng& rng) {
  for (std::size_t i = labels.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
    std::swap(labels[i - 1], labels[j]);
  }
}

std::vector<CommandLabel> balanced_sequence(int length, int n_labels, Rng& rng) {
  std::vector<CommandLabel> seq;
  seq.reserve(static_cast<std::size_t>(length));
  const int base = length / n_labels;
  int extra = length % n_labels;
  std::vector<CommandLabel> extras(static_cast<std::size_t>(n_labels));
  std::iota(extras.begin(), extras.end(), 0);
  shuffle_labels(extras, rng);
  for (CommandLabel l = 0; l < n_labels; ++l) {
    int count = base;
    if (extra > 0 && std::find(extras.begin(), extras.begin() + extra, l) !=
                         extras.begin() + extra) {
      ++count;
    }
    seq.insert(seq.end(), static_cast<std::size_t>(count), l);
  }
  (void)extra;
  shuffle_labels(seq, rng);
  return seq;
}

}  // namespace

ProtocolSchedule make_offline_schedule(std::uint64_t seed, int n_sessions, int n_labels) {
  if (n_sessions < 1) throw std::invalid_argument("make_offline_schedule: no sessions");
  if (n_labels < 2) throw std::invalid_argument("make_offline_schedule: need >= 2 labels");
  ProtocolSchedule schedule;
  schedule.sessions.resize(static_cast<std::size_t>(n_sessions));
  for (int s = 0; s < n_sessions; ++s) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(s));
    schedule.sessions[static_cast<std::size_t>(s)].part_a =
        balanced_sequence(12, n_labels, rng);
    schedule.sessions[static_cast<std::size_t>(s)].part_b =
        balanced_sequence(13, n_labels, rng);
  }
  return schedule;
}

bool validate_cue_sequence(const std::vector<CommandLabel>& sequence, int length,
                           int n_labels) {
  if (static_cast<int>(sequence.size()) != length) return false;
  std::vector<int> counts(static_cast<std::size_t>(n_labels), 0);
  for (const CommandLabel l : sequence) {
    if (l < 0 || l >= n_labels) return false;
    ++counts[static_cast<std::size_t>(l)];
  }
  const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
  return *hi - *lo <= 1;
}

long session_timeline_samples(const ScheduleSession& session,
                              const ProtocolSchedule& timing,
                              const RecordingSpec& spec) {
  const double rate = spec.sampling_rate_hz;
  const long flicker = std::lround(timing.flicker_seconds * rate);
  const long rest = std::lround(timing.rest_seconds * rate);
  const long inter = std::lround(timing.inter_part_rest_seconds * rate);
  long total = static_cast<long>(session.part_a.size() + session.part_b.size()) *
               (flicker + rest);
  if (!session.part_a.empty() && !session.part_b.empty()) total += inter;
  return total;
}

std::vector<TrialRecording> slice_recording(const Matrix& stream,
                                            const ScheduleSession& session,
                                            const ProtocolSchedule& timing,
                                            const RecordingSpec& spec,
                                            int session_index) {
  const long needed = session_timeline_samples(session, timing, spec);
  if (stream.rows() < needed) {
    std::ostringstream msg;
    msg << "slice_recording: stream has " << stream.rows()
        << " samples, timeline needs " << needed;
    throw std::invalid_argument(msg.str());
  }
  if (stream.cols() != static_cast<Eigen::Index>(spec.channels.size())) {
    std::ostringstream msg;
    msg << "slice_recording: stream has " << stream.cols() << " channels, spec has "
        << spec.channels.size();
    throw std::invalid_argument(msg.str());
  }

  const double rate = spec.sampling_rate_hz;
  const long flicker = std::lround(timing.flicker_seconds * rate);
  const long rest = std::lround(timing.rest_seconds * rate);
  if (flicker != spec.samples_per_trial) {
    throw std::invalid_argument(
        "slice_recording: timing flicker window does not match samples_per_trial");
  }

  std::vector<TrialRecording> trials;
  long cursor = 0;
  int trial_index = 0;
  const auto take_part = [&](const std::vector<CommandLabel>& labels) {
    for (const CommandLabel label : labels) {
      TrialRecording trial;
      trial.samples = stream.middleRows(cursor, flicker);
      trial.true_label = label;
      trial.trial_index = trial_index++;
      trial.session_index = session_index;
      trials.push_back(std::move(trial));
      cursor += flicker + rest;
    }
  };
  take_part(session.part_a);
  if (!session.part_a.empty() && !session.part_b.empty()) {
    cursor += std::lround(timing.inter_part_rest_seconds * rate);
  }
  take_part(session.part_b);
  return trials;
}

SplitResult split_subjectwise_stratified(const SubjectDataset& dataset,
                                         double train_fraction, std::uint64_t seed) {
  if (train_fraction < 0.0 || train_fraction > 1.0) {
    throw std::invalid_argument("split: train_fraction must be in [0, 1]");
  }
  const int n_labels = static_cast<int>(dataset.stimuli.size());
  std::map<CommandLabel, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < dataset.trials.size(); ++i) {
    by_class[dataset.trials[i].true_label].push_back(i);
  }
  for (CommandLabel l = 0; l < n_labels; ++l) {
    if (by_class[l].size() < 2) {
      throw std::invalid_argument("split: class " + std::to_string(l) +
                                  " has fewer than 2 trials");
    }
  }

  const double test_fraction = 1.0 - train_fraction;
  const int total_test = static_cast<int>(
      std::floor(static_cast<double>(dataset.trials.size()) * test_fraction));

  // Per-class floors first, then distribute the remainder by largest
  // fractional part (ties to the lower label).
  std::vector<int> test_counts(static_cast<std::size_t>(n_labels), 0);
  std::vector<std::pair<double, CommandLabel>> remainders;
  int assigned = 0;
  for (CommandLabel l = 0; l < n_labels; ++l) {
    const double exact = static_cast<double>(by_class[l].size()) * test_fraction;
    test_counts[static_cast<std::size_t>(l)] = static_cast<int>(std::floor(exact));
    assigned += test_counts[static_cast<std::size_t>(l)];
    remainders.push_back({exact - std::floor(exact), l});
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) {
                     if (a.first != b.first) return a.first > b.first;
                     return a.second < b.second;
                   });
  for (std::size_t i = 0; assigned < total_test && i < remainders.size(); ++i) {
    const CommandLabel l = remainders[i].second;
    if (test_counts[static_cast<std::size_t>(l)] <
        static_cast<int>(by_class[l].size())) {
      ++test_counts[static_cast<std::size_t>(l)];
      ++assigned;
    }
  }

  SplitResult result;
  std::vector<bool> in_test(dataset.trials.size(), false);
  for (CommandLabel l = 0; l < n_labels; ++l) {
    auto indices = by_class[l];
    Rng rng = substream(seed, 0x501u + static_cast<std::uint64_t>(l));
    for (std::size_t i = indices.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
      std::swap(indices[i - 1], indices[j]);
    }
    for (int t = 0; t < test_counts[static_cast<std::size_t>(l)]; ++t) {
      in_test[indices[static_cast<std::size_t>(t)]] = true;
    }
  }
  for (std::size_t i = 0; i < dataset.trials.size(); ++i) {
    (in_test[i] ? result.test : result.train).push_back(dataset.trials[i]);
  }
  result.empty_test_warning = result.test.empty();
  return result;
}

}  // namespace ssvep
