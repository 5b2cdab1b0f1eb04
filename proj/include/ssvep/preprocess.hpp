#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ssvep/core.hpp"

namespace ssvep {

// One-sided power spectrum: power[k] = |DFT(x)[k]|^2 for k = 0..floor(L/2).
struct Spectrum {
  std::vector<double> power;
  double resolution_hz = 0.0;
  int n_bins = 0;

  double bin_center_hz(int k) const { return k * resolution_hz; }
};

// One extraction window: the spectrum bins whose centers fall inside
// [h*f - half_width, h*f + half_width] for a (channel, stimulus, harmonic).
struct BandWindow {
  int channel = 0;
  int stimulus = 0;
  int harmonic = 1;  // the multiplier h itself, not an index
  std::vector<int> bins;
};

// Fixed feature ordering: channel-major, then stimulus, then harmonic, then
// bin. Total length is the sum of per-window bin counts (equal counts for
// the default 0.2 Hz resolution and 0.5 Hz half width).
struct FeatureLayout {
  std::vector<BandWindow> windows;
  int n_channels = 0;
  int n_stimuli = 0;
  int n_harmonics = 0;
  int total = 0;

  std::string describe() const;
};

struct FeatureVector {
  Vector values;
  std::string layout;
};

struct PcaModel {
  Vector mean;
  Matrix components;  // k x d, rows orthonormal
  Vector explained_variance_fraction;  // length k, non-increasing
  int k = 0;
};

struct ZScoreModel {
  Vector mean;
  Vector stddev;  // entries >= 0; zero entries mark constant features

  int zero_variance_count() const;
};

// One of the four preprocessing arms of the ensemble. Defaults follow the
// online configuration: O1/O2, fundamental plus second harmonic, 1 Hz
// windows, 95% retained PCA variance.
struct PreprocessConfig {
  bool use_car = true;
  bool use_pca = true;
  std::vector<std::string> channels = {"O1", "O2"};
  std::vector<int> harmonics = {1, 2};
  double half_width_hz = 0.5;
  double pca_variance_threshold = 0.95;

  std::string name() const;
};

// Fitted per-variant transforms. pca is absent when the config disables it
// or when the fit degenerated (flagged).
struct FittedPreprocess {
  std::optional<PcaModel> pca;
  ZScoreModel zscore;
  bool pca_degenerate = false;
};

// Restrict and reorder trial columns to the named channels.
Matrix select_channels(const TrialRecording& trial, const RecordingSpec& spec,
                       const std::vector<std::string>& names);

// Common average reference: subtract the cross-channel mean at every time
// instant. Requires at least two channels.
Matrix car_filter(const Matrix& samples);

Spectrum power_spectrum(const Vector& signal, double sampling_rate_hz);

FeatureLayout band_layout(int n_channels, const std::vector<StimulusSpec>& stimuli,
                          const std::vector<int>& harmonics, double half_width_hz,
                          double resolution_hz, int spectrum_bins, double nyquist_hz);

FeatureVector extract_band_features(const std::vector<Spectrum>& spectra,
                                    const std::vector<StimulusSpec>& stimuli,
                                    const std::vector<int>& harmonics,
                                    double half_width_hz, double nyquist_hz);

PcaModel pca_fit(const Matrix& feature_matrix, double variance_threshold = 0.95);
Vector pca_transform(const PcaModel& model, const Vector& features);
Matrix pca_transform_rows(const PcaModel& model, const Matrix& features);

ZScoreModel zscore_fit(const Matrix& feature_matrix);
Vector zscore_apply(const ZScoreModel& model, const Vector& features);
Matrix zscore_apply_rows(const ZScoreModel& model, const Matrix& features);

// Raw band features for one trial under a config: channel selection, then
// optional CAR, then per-channel power spectra, then window extraction.
Vector band_features(const TrialRecording& trial, const PreprocessConfig& config,
                     const RecordingSpec& spec, const std::vector<StimulusSpec>& stimuli);

// Full per-trial path using transforms fitted on training data.
FeatureVector preprocess_trial(const TrialRecording& trial, const PreprocessConfig& config,
                               const FittedPreprocess& fitted, const RecordingSpec& spec,
                               const std::vector<StimulusSpec>& stimuli);

// Fit PCA (when enabled and non-degenerate) and z-score on the training
// trials; returns the fitted transforms plus the fully transformed training
// feature matrix, one row per trial.
struct FitResult {
  FittedPreprocess fitted;
  Matrix train_features;
};
FitResult fit_preprocess(const std::vector<TrialRecording>& trials,
                         const PreprocessConfig& config, const RecordingSpec& spec,
                         const std::vector<StimulusSpec>& stimuli);

// Same fit given an already-computed raw band-feature matrix (one row per
// trial). Raw band features depend only on (channels, use_car), so ensemble
// builds share them across variants with identical settings.
FitResult fit_preprocess_from_features(const Matrix& raw_band_features,
                                       const PreprocessConfig& config);

}  // namespace ssvep
