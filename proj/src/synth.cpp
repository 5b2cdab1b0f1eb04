#include "ssvep/synth.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "ssvep/fft.hpp"

namespace ssvep {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

SubjectProfile SubjectProfile::occipital_focus(const RecordingSpec& spec,
                                               double occipital_gain,
                                               double other_gain) {
  SubjectProfile p;
  p.ssvep_gain.resize(spec.channels.size(), other_gain);
  for (std::size_t c = 0; c < spec.channels.size(); ++c) {
    if (spec.channels[c] == "O1" || spec.channels[c] == "O2") {
      p.ssvep_gain[c] = occipital_gain;
    }
  }
  return p;
}

std::vector<Violation> validate_profile(const SubjectProfile& profile,
                                        const RecordingSpec& spec) {
  std::vector<Violation> out;
  if (profile.ssvep_gain.size() != spec.channels.size()) {
    out.push_back({-1, "gain length",
                   "ssvep_gain has " + std::to_string(profile.ssvep_gain.size()) +
                       " entries for " + std::to_string(spec.channels.size()) +
                       " channels"});
  }
  for (const double g : profile.ssvep_gain) {
    if (g < 0.0) out.push_back({-1, "gain sign", "ssvep_gain entries must be >= 0"});
  }
  bool any_harmonic = false;
  for (const double a : profile.harmonic_amplitudes) {
    if (a > 0.0) any_harmonic = true;
  }
  if (!any_harmonic) {
    out.push_back({-1, "harmonics", "at least one harmonic amplitude must be > 0"});
  }
  if (profile.freq_jitter_hz < 0.0 || profile.freq_jitter_hz >= 0.5) {
    out.push_back({-1, "jitter",
                   "freq_jitter_hz must lie in [0, 0.5) to stay inside the "
                   "extraction window"});
  }
  if (profile.noise_pink_level < 0.0 || profile.noise_white_level < 0.0) {
    out.push_back({-1, "noise", "noise levels must be >= 0"});
  }
  if (profile.artifacts.blink_duration_s > spec.flicker_seconds ||
      profile.artifacts.motion_duration_s > spec.flicker_seconds) {
    out.push_back({-1, "artifact duration", "durations must not exceed the flicker window"});
  }
  if (profile.artifacts.blink_amplitude < 0.0 || profile.artifacts.motion_amplitude < 0.0) {
    out.push_back({-1, "artifact amplitude", "amplitudes must be >= 0"});
  }
  return out;
}

Vector pink_noise(int length, Rng& rng) {
  if (length < 2) throw std::invalid_argument("pink_noise: length must be >= 2");
  const std::size_t n = static_cast<std::size_t>(length);
  std::vector<std::complex<double>> spectrum(n, {0.0, 0.0});
  // Hermitian spectrum with power ~ 1/k; DC stays zero.
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(k));
    const std::complex<double> coeff{scale * gaussian(rng), scale * gaussian(rng)};
    spectrum[k] = coeff;
    if (k != n - k) spectrum[n - k] = std::conj(coeff);
  }
  if (n % 2 == 0) spectrum[n / 2] = {spectrum[n / 2].real(), 0.0};

  const auto series = inverse_fourier_transform(spectrum);
  Vector out(length);
  for (int t = 0; t < length; ++t) out[t] = series[static_cast<std::size_t>(t)].real();
  const double mean = out.mean();
  const double sd = std::sqrt((out.array() - mean).square().mean());
  if (sd > 0.0) out = (out.array() - mean) / sd;
  return out;
}

std::vector<double> blink_channel_weights(const RecordingSpec& spec) {
  std::vector<double> w(spec.channels.size(), 0.2);
  for (std::size_t c = 0; c < spec.channels.size(); ++c) {
    const auto& name = spec.channels[c];
    if (!name.empty() && (name[0] == 'A' || name[0] == 'F')) w[c] = 1.0;
  }
  return w;
}

void add_blink(Matrix& samples, const RecordingSpec& rec_spec, const ArtifactSpec& spec,
               double onset_s, double carrier_hz, double phase) {
  if (spec.blink_amplitude == 0.0) return;
  const double rate = rec_spec.sampling_rate_hz;
  const long start = std::lround(onset_s * rate);
  const long width = std::lround(spec.blink_duration_s * rate);
  const auto weights = blink_channel_weights(rec_spec);
  const long last = std::min<long>(start + width, samples.rows());
  for (long t = std::max<long>(start, 0); t < last; ++t) {
    const double rel = static_cast<double>(t - start) / rate;
    const double envelope = std::sin(std::numbers::pi * rel / spec.blink_duration_s);
    const double value = spec.blink_amplitude * envelope * envelope *
                         std::sin(kTwoPi * carrier_hz * rel + phase);
    for (Eigen::Index c = 0; c < samples.cols(); ++c) {
      samples(t, c) += weights[static_cast<std::size_t>(c)] * value;
    }
  }
}

void add_motion_burst(Matrix& samples, const RecordingSpec& rec_spec,
                      const ArtifactSpec& spec, double onset_s,
                      const std::vector<double>& channel_scale, Rng& rng) {
  if (spec.motion_amplitude == 0.0) return;
  const double rate = rec_spec.sampling_rate_hz;
  const long start = std::lround(onset_s * rate);
  const long width = std::lround(spec.motion_duration_s * rate);
  const long last = std::min<long>(start + width, samples.rows());
  for (long t = std::max<long>(start, 0); t < last; ++t) {
    const double rel = static_cast<double>(t - start) / rate;
    const double envelope = std::sin(std::numbers::pi * rel / spec.motion_duration_s);
    for (Eigen::Index c = 0; c < samples.cols(); ++c) {
      samples(t, c) += spec.motion_amplitude *
                       channel_scale[static_cast<std::size_t>(c)] * envelope *
                       envelope * gaussian(rng);
    }
  }
}

namespace {

void sample_blinks(Matrix& samples, const RecordingSpec& rec_spec,
                   const ArtifactSpec& spec, double rate_per_trial, Rng& rng) {
  const int count = poisson(rng, rate_per_trial);
  for (int i = 0; i < count; ++i) {
    const double latest = rec_spec.flicker_seconds - spec.blink_duration_s;
    const double onset = uniform(rng, 0.0, std::max(latest, 0.0));
    const double carrier = uniform(rng, spec.blink_band_low_hz, spec.blink_band_high_hz);
    const double phase = uniform(rng, 0.0, kTwoPi);
    add_blink(samples, rec_spec, spec, onset, carrier, phase);
  }
}

void sample_motion(Matrix& samples, const RecordingSpec& rec_spec,
                   const ArtifactSpec& spec, double rate_per_trial, Rng& rng) {
  const int count = poisson(rng, rate_per_trial);
  for (int i = 0; i < count; ++i) {
    const double latest = rec_spec.flicker_seconds - spec.motion_duration_s;
    const double onset = uniform(rng, 0.0, std::max(latest, 0.0));
    std::vector<double> scale(rec_spec.channels.size());
    for (auto& s : scale) s = uniform(rng, 0.5, 1.5);
    add_motion_burst(samples, rec_spec, spec, onset, scale, rng);
  }
}

}  // namespace

TrialRecording synth_trial(const SubjectProfile& profile, CommandLabel target,
                           const std::vector<StimulusSpec>& stimuli,
                           const RecordingSpec& spec, Rng& rng) {
  if (target < 0 || target >= static_cast<int>(stimuli.size())) {
    throw std::invalid_argument("synth_trial: target does not index a stimulus");
  }
  {
    const auto violations = validate_profile(profile, spec);
    if (!violations.empty()) {
      throw std::invalid_argument("synth_trial: invalid profile: " +
                                  format_violations(violations));
    }
  }
  const double f_target = stimuli[static_cast<std::size_t>(target)].frequency_hz;
  for (std::size_t h = 0; h < profile.harmonic_amplitudes.size(); ++h) {
    if (profile.harmonic_amplitudes[h] != 0.0 &&
        static_cast<double>(h + 1) * f_target >= spec.nyquist_hz()) {
      std::ostringstream msg;
      msg << "synth_trial: harmonic " << h + 1 << " of " << f_target
          << " Hz reaches Nyquist " << spec.nyquist_hz() << " Hz";
      throw std::invalid_argument(msg.str());
    }
  }

  const int rows = spec.samples_per_trial;
  const int cols = static_cast<int>(spec.channels.size());
  const double rate = spec.sampling_rate_hz;

  const double jitter =
      profile.freq_jitter_hz > 0.0
          ? uniform(rng, -profile.freq_jitter_hz, profile.freq_jitter_hz)
          : 0.0;
  std::vector<double> phases(profile.harmonic_amplitudes.size());
  for (auto& p : phases) p = uniform(rng, 0.0, kTwoPi);
  const double f = f_target + jitter;

  TrialRecording trial;
  trial.true_label = target;
  trial.samples.setZero(rows, cols);

  Vector stack(rows);
  stack.setZero();
  for (std::size_t h = 0; h < profile.harmonic_amplitudes.size(); ++h) {
    const double a = profile.harmonic_amplitudes[h];
    if (a == 0.0) continue;
    const double omega = kTwoPi * static_cast<double>(h + 1) * f;
    for (int t = 0; t < rows; ++t) {
      stack[t] += a * std::sin(omega * static_cast<double>(t) / rate + phases[h]);
    }
  }

  for (int c = 0; c < cols; ++c) {
    trial.samples.col(c) = profile.ssvep_gain[static_cast<std::size_t>(c)] * stack;
  }

  if (profile.alpha_level > 0.0) {
    const double alpha_phase = uniform(rng, 0.0, kTwoPi);
    for (int t = 0; t < rows; ++t) {
      const double v = profile.alpha_level *
                       std::sin(kTwoPi * 10.0 * static_cast<double>(t) / rate + alpha_phase);
      for (int c = 0; c < cols; ++c) trial.samples(t, c) += v;
    }
  }

  if (profile.noise_pink_level > 0.0) {
    for (int c = 0; c < cols; ++c) {
      trial.samples.col(c) += profile.noise_pink_level * pink_noise(rows, rng);
    }
  }
  if (profile.noise_white_level > 0.0) {
    for (int c = 0; c < cols; ++c) {
      for (int t = 0; t < rows; ++t) {
        trial.samples(t, c) += profile.noise_white_level * gaussian(rng);
      }
    }
  }

  sample_blinks(trial.samples, spec, profile.artifacts, profile.blink_rate_per_trial, rng);
  sample_motion(trial.samples, spec, profile.artifacts,
                profile.motion_burst_rate_per_trial, rng);
  return trial;
}

SubjectDataset synth_dataset(const SubjectProfile& profile,
                             const ProtocolSchedule& schedule,
                             const std::vector<StimulusSpec>& stimuli,
                             const RecordingSpec& spec) {
  SubjectDataset dataset;
  dataset.spec = spec;
  dataset.stimuli = stimuli;
  dataset.provenance.seed = profile.seed;
  dataset.provenance.profile = profile.name;
  dataset.provenance.trials_per_session = schedule.trials_per_session();

  std::uint64_t ordinal = 0;
  for (std::size_t s = 0; s < schedule.sessions.size(); ++s) {
    const auto labels = schedule.sessions[s].all_labels();
    for (std::size_t t = 0; t < labels.size(); ++t) {
      Rng rng = substream(profile.seed, ordinal++);
      TrialRecording trial = synth_trial(profile, labels[t], stimuli, spec, rng);
      trial.trial_index = static_cast<int>(t);
      trial.session_index = static_cast<int>(s);
      trial.subject_id = profile.name;
      dataset.trials.push_back(std::move(trial));
    }
  }
  return dataset;
}

TrialRecording inject_artifacts(const TrialRecording& trial, const ArtifactSpec& spec,
                                const RecordingSpec& rec_spec, Rng& rng) {
  TrialRecording out = trial;
  sample_blinks(out.samples, rec_spec, spec, spec.blink_rate_per_trial, rng);
  sample_motion(out.samples, rec_spec, spec, spec.motion_rate_per_trial, rng);
  return out;
}

}  // namespace ssvep
