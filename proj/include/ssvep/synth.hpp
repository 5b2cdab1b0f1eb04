#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssvep/core.hpp"
#include "ssvep/protocol.hpp"
#include "ssvep/rng.hpp"

namespace ssvep {

// Additive transient shapes. Blinks are a band-limited (1-3 Hz by default)
// carrier under a raised-cosine envelope, weighted toward frontal channels;
// motion bursts are broadband noise under the same envelope with a random
// amplitude per channel. Rates here drive inject_artifacts; during trial
// synthesis the subject profile's rates take precedence.
struct ArtifactSpec {
  double blink_amplitude = 8.0;
  double blink_duration_s = 0.4;
  double blink_band_low_hz = 1.0;
  double blink_band_high_hz = 3.0;
  double motion_amplitude = 5.0;
  double motion_duration_s = 0.8;
  double blink_rate_per_trial = 1.0;
  double motion_rate_per_trial = 1.0;
};

// Everything that makes one synthetic subject's EEG: per-channel response
// gain (strong over the visual cortex), harmonic structure, noise floor,
// display-driven frequency jitter, and artifact tendency.
struct SubjectProfile {
  std::vector<double> ssvep_gain;            // aligned with RecordingSpec.channels
  std::vector<double> harmonic_amplitudes = {1.0, 0.5};  // a_h for h = 1..H
  double noise_pink_level = 0.0;
  double noise_white_level = 0.0;
  double freq_jitter_hz = 0.0;   // constant within a trial, drawn per trial
  double alpha_level = 0.0;      // optional ~10 Hz background for stress tests
  double blink_rate_per_trial = 0.0;
  double motion_burst_rate_per_trial = 0.0;
  ArtifactSpec artifacts;
  std::uint64_t seed = 0;
  std::string name = "synthetic";

  // Gain concentrated on O1/O2 with a small bleed elsewhere.
  static SubjectProfile occipital_focus(const RecordingSpec& spec,
                                        double occipital_gain = 1.0,
                                        double other_gain = 0.1);
};

std::vector<Violation> validate_profile(const SubjectProfile& profile,
                                        const RecordingSpec& spec);

// One 5 s flicker window for the target command: per channel, the gain-scaled
// harmonic stack at the (jittered) stimulus frequency plus pink and white
// noise and any sampled artifacts. Deterministic for a fixed rng state.
TrialRecording synth_trial(const SubjectProfile& profile, CommandLabel target,
                           const std::vector<StimulusSpec>& stimuli,
                           const RecordingSpec& spec, Rng& rng);

// Full dataset following a protocol schedule; each trial draws from an
// independent substream of profile.seed, so generation order is immaterial.
SubjectDataset synth_dataset(const SubjectProfile& profile,
                             const ProtocolSchedule& schedule,
                             const std::vector<StimulusSpec>& stimuli,
                             const RecordingSpec& spec);

// Copy of `trial` with Poisson-sampled blink and motion transients added.
// Shape and label are never altered.
TrialRecording inject_artifacts(const TrialRecording& trial, const ArtifactSpec& spec,
                                const RecordingSpec& rec_spec, Rng& rng);

// Deterministic single-event helpers (also used by the samplers above).
void add_blink(Matrix& samples, const RecordingSpec& rec_spec, const ArtifactSpec& spec,
               double onset_s, double carrier_hz, double phase);
void add_motion_burst(Matrix& samples, const RecordingSpec& rec_spec,
                      const ArtifactSpec& spec, double onset_s,
                      const std::vector<double>& channel_scale, Rng& rng);

// Frontal-weighted blink topography: 1.0 on AF*/F* channels, 0.2 elsewhere.
std::vector<double> blink_channel_weights(const RecordingSpec& spec);

// Unit-variance 1/f noise of the given length (spectral synthesis).
Vector pink_noise(int length, Rng& rng);

}  // namespace ssvep
