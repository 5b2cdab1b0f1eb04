#include "ssvep/core.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace ssvep {

std::vector<std::string> RecordingSpec::default_channels() {
  return {"AF3", "F7", "F3", "FC5", "T7",  "P7", "O1",
          "O2",  "P8", "T8", "FC6", "F4",  "F8", "AF4"};
}

int RecordingSpec::channel_index(const std::string& name) const {
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i] == name) return static_cast<int>(i);
  }
  return -1;
}

std::vector<StimulusSpec> default_stimuli() {
  return {
      {0, "create_cube", 12.0, "green"},
      {1, "delete_all", 10.0, "green"},
      {2, "create_sphere", 8.57, "green"},
  };
}

std::vector<Violation> validate_recording_spec(const RecordingSpec& spec) {
  std::vector<Violation> out;
  if (spec.sampling_rate_hz <= 0.0) {
    out.push_back({-1, "sampling rate", "sampling_rate_hz must be positive"});
  }
  if (spec.samples_per_trial <= 0) {
    out.push_back({-1, "samples per trial", "samples_per_trial must be positive"});
  }
  const double expected = spec.sampling_rate_hz * spec.flicker_seconds;
  if (spec.samples_per_trial != static_cast<int>(std::lround(expected))) {
    std::ostringstream msg;
    msg << "samples_per_trial " << spec.samples_per_trial
        << " != round(sampling_rate_hz * flicker_seconds) = " << std::lround(expected);
    out.push_back({-1, "samples per trial", msg.str()});
  }
  if (spec.channels.empty()) {
    out.push_back({-1, "channels", "channel list is empty"});
  }
  std::set<std::string> seen;
  for (const auto& name : spec.channels) {
    if (!seen.insert(name).second) {
      out.push_back({-1, "channels", "duplicate channel name " + name});
    }
  }
  return out;
}

std::vector<Violation> validate_stimuli(const std::vector<StimulusSpec>& stimuli,
                                        const RecordingSpec& spec) {
  std::vector<Violation> out;
  if (stimuli.size() < 2) {
    out.push_back({-1, "stimulus count", "need at least 2 stimuli"});
  }
  for (std::size_t i = 0; i < stimuli.size(); ++i) {
    const auto& s = stimuli[i];
    if (s.label_id != static_cast<int>(i)) {
      out.push_back({-1, "label ids",
                     "stimulus " + std::to_string(i) + " has label_id " +
                         std::to_string(s.label_id) + "; labels must be dense 0..N-1"});
    }
    if (s.frequency_hz <= 0.0) {
      out.push_back({-1, "stimulus frequency",
                     s.name + ": frequency must be positive"});
    }
    if (s.frequency_hz >= spec.nyquist_hz()) {
      std::ostringstream msg;
      msg << s.name << ": " << s.frequency_hz << " Hz is not below Nyquist "
          << spec.nyquist_hz() << " Hz";
      out.push_back({-1, "stimulus frequency", msg.str()});
    }
    for (std::size_t j = i + 1; j < stimuli.size(); ++j) {
      if (stimuli[j].frequency_hz == s.frequency_hz) {
        out.push_back({-1, "stimulus frequency",
                       "stimuli " + s.name + " and " + stimuli[j].name +
                           " share frequency " + std::to_string(s.frequency_hz)});
      }
    }
  }
  return out;
}

std::vector<Violation> validate_dataset(const SubjectDataset& dataset) {
  std::vector<Violation> out = validate_recording_spec(dataset.spec);
  {
    auto v = validate_stimuli(dataset.stimuli, dataset.spec);
    out.insert(out.end(), v.begin(), v.end());
  }

  const int rows = dataset.spec.samples_per_trial;
  const int cols = static_cast<int>(dataset.spec.channels.size());
  const int n_labels = static_cast<int>(dataset.stimuli.size());

  for (std::size_t t = 0; t < dataset.trials.size(); ++t) {
    const auto& trial = dataset.trials[t];
    const int idx = static_cast<int>(t);
    if (trial.samples.rows() != rows) {
      std::ostringstream msg;
      msg << "expected " << rows << " rows, got " << trial.samples.rows();
      out.push_back({idx, "row count", msg.str()});
    }
    if (trial.samples.cols() != cols) {
      std::ostringstream msg;
      msg << "expected " << cols << " columns, got " << trial.samples.cols();
      out.push_back({idx, "column count", msg.str()});
    }
    if (trial.true_label < 0 || trial.true_label >= n_labels) {
      out.push_back({idx, "label range",
                     "label " + std::to_string(trial.true_label) +
                         " does not index a stimulus"});
    }
    if (!trial.samples.allFinite()) {
      out.push_back({idx, "non-finite value", "sample matrix contains NaN or Inf"});
    }
  }

  // Schedule conformance is checkable only when generation recorded it.
  if (!dataset.provenance.trials_per_session.empty()) {
    std::vector<int> counts(dataset.provenance.trials_per_session.size(), 0);
    bool session_out_of_range = false;
    for (std::size_t t = 0; t < dataset.trials.size(); ++t) {
      const int s = dataset.trials[t].session_index;
      if (s < 0 || s >= static_cast<int>(counts.size())) {
        out.push_back({static_cast<int>(t), "session index",
                       "session " + std::to_string(s) + " is not in the schedule"});
        session_out_of_range = true;
        continue;
      }
      ++counts[static_cast<std::size_t>(s)];
    }
    if (!session_out_of_range) {
      for (std::size_t s = 0; s < counts.size(); ++s) {
        if (counts[s] != dataset.provenance.trials_per_session[s]) {
          std::ostringstream msg;
          msg << "session " << s << " has " << counts[s] << " trials, schedule says "
              << dataset.provenance.trials_per_session[s];
          out.push_back({-1, "session trial count", msg.str()});
        }
      }
    }
  }
  return out;
}

std::string format_violations(const std::vector<Violation>& violations) {
  std::ostringstream os;
  for (const auto& v : violations) {
    if (v.trial_index >= 0) {
      os << "trial " << v.trial_index << ": ";
    }
    os << v.rule << ": " << v.detail << "\n";
  }
  return os.str();
}

}  // namespace ssvep
