#include "ssvep/preprocess.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ssvep/fft.hpp"

namespace ssvep {

std::string FeatureLayout::describe() const {
  std::ostringstream os;
  os << "channel>stimulus>harmonic>bin; " << n_channels << " channels x "
     << n_stimuli << " stimuli x " << n_harmonics << " harmonics; " << total
     << " values";
  return os.str();
}

int ZScoreModel::zero_variance_count() const {
  int n = 0;
  for (Eigen::Index i = 0; i < stddev.size(); ++i) {
    if (stddev[i] == 0.0) ++n;
  }
  return n;
}

std::string PreprocessConfig::name() const {
  if (use_car && use_pca) return "car+pca";
  if (use_car) return "car";
  if (use_pca) return "pca";
  return "plain";
}

Matrix select_channels(const TrialRecording& trial, const RecordingSpec& spec,
                       const std::vector<std::string>& names) {
  if (names.empty()) {
    throw std::invalid_argument("select_channels: empty channel list");
  }
  Matrix out(trial.samples.rows(), static_cast<Eigen::Index>(names.size()));
  for (std::size_t i = 0; i < names.size(); ++i) {
    const int idx = spec.channel_index(names[i]);
    if (idx < 0) {
      throw std::invalid_argument("select_channels: unknown channel " + names[i]);
    }
    out.col(static_cast<Eigen::Index>(i)) = trial.samples.col(idx);
  }
  return out;
}

Matrix car_filter(const Matrix& samples) {
  if (samples.cols() < 2) {
    throw std::invalid_argument("car_filter: need at least 2 channels");
  }
  Matrix out = samples;
  const Vector row_means = samples.rowwise().mean();
  out.colwise() -= row_means;
  return out;
}

Spectrum power_spectrum(const Vector& signal, double sampling_rate_hz) {
  if (signal.size() < 2) {
    throw std::invalid_argument("power_spectrum: signal length must be >= 2");
  }
  if (sampling_rate_hz <= 0.0) {
    throw std::invalid_argument("power_spectrum: sampling rate must be positive");
  }
  if (!signal.allFinite()) {
    throw std::invalid_argument("power_spectrum: signal contains non-finite samples");
  }
  const std::size_t n = static_cast<std::size_t>(signal.size());
  std::vector<std::complex<double>> x(n);
  for (std::size_t t = 0; t < n; ++t) x[t] = {signal[static_cast<Eigen::Index>(t)], 0.0};
  const auto dft = fourier_transform(x);

  Spectrum s;
  s.resolution_hz = sampling_rate_hz / static_cast<double>(n);
  s.n_bins = static_cast<int>(n / 2) + 1;
  s.power.resize(static_cast<std::size_t>(s.n_bins));
  for (int k = 0; k < s.n_bins; ++k) {
    s.power[static_cast<std::size_t>(k)] = std::norm(dft[static_cast<std::size_t>(k)]);
  }
  return s;
}

FeatureLayout band_layout(int n_channels, const std::vector<StimulusSpec>& stimuli,
                          const std::vector<int>& harmonics, double half_width_hz,
                          double resolution_hz, int spectrum_bins, double nyquist_hz) {
  if (n_channels < 1) throw std::invalid_argument("band_layout: no channels");
  if (harmonics.empty()) throw std::invalid_argument("band_layout: no harmonics");
  if (half_width_hz < 0.0) throw std::invalid_argument("band_layout: negative half width");

  FeatureLayout layout;
  layout.n_channels = n_channels;
  layout.n_stimuli = static_cast<int>(stimuli.size());
  layout.n_harmonics = static_cast<int>(harmonics.size());

  for (int c = 0; c < n_channels; ++c) {
    for (std::size_t s = 0; s < stimuli.size(); ++s) {
      for (const int h : harmonics) {
        if (h < 1) throw std::invalid_argument("band_layout: harmonic multiplier < 1");
        const double center = h * stimuli[s].frequency_hz;
        const double lo = center - half_width_hz;
        const double hi = center + half_width_hz;
        if (hi >= nyquist_hz) {
          std::ostringstream msg;
          msg << "band_layout: window [" << lo << ", " << hi << "] Hz for "
              << stimuli[s].name << " harmonic " << h << " reaches Nyquist "
              << nyquist_hz << " Hz";
          throw std::invalid_argument(msg.str());
        }
        BandWindow w;
        w.channel = c;
        w.stimulus = static_cast<int>(s);
        w.harmonic = h;
        // Closed-interval membership with a small slack so centers that land
        // exactly on a window edge are kept regardless of rounding.
        const double eps = 1e-9 * std::max(1.0, hi);
        for (int k = 0; k < spectrum_bins; ++k) {
          const double bc = k * resolution_hz;
          if (bc >= lo - eps && bc <= hi + eps) w.bins.push_back(k);
        }
        layout.total += static_cast<int>(w.bins.size());
        layout.windows.push_back(std::move(w));
      }
    }
  }
  return layout;
}

namespace {

Vector gather_features(const std::vector<Spectrum>& spectra, const FeatureLayout& layout) {
  Vector values(layout.total);
  Eigen::Index at = 0;
  for (const auto& w : layout.windows) {
    const auto& power = spectra[static_cast<std::size_t>(w.channel)].power;
    for (const int k : w.bins) values[at++] = power[static_cast<std::size_t>(k)];
  }
  return values;
}

}  // namespace

FeatureVector extract_band_features(const std::vector<Spectrum>& spectra,
                                    const std::vector<StimulusSpec>& stimuli,
                                    const std::vector<int>& harmonics,
                                    double half_width_hz, double nyquist_hz) {
  if (spectra.empty()) throw std::invalid_argument("extract_band_features: no spectra");
  const auto layout =
      band_layout(static_cast<int>(spectra.size()), stimuli, harmonics, half_width_hz,
                  spectra[0].resolution_hz, spectra[0].n_bins, nyquist_hz);
  return {gather_features(spectra, layout), layout.describe()};
}

PcaModel pca_fit(const Matrix& X, double variance_threshold) {
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  if (n < 2) throw std::invalid_argument("pca_fit: need at least 2 rows");

  PcaModel model;
  model.mean = X.colwise().mean();
  Matrix centered = X.rowwise() - model.mean.transpose();

  const Eigen::Index cap = std::min<Eigen::Index>(n - 1, d);
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // columns, matching eigenvalues

  if (d <= n) {
    const Matrix cov = centered.transpose() * centered / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    eigenvalues = solver.eigenvalues().reverse();
    eigenvectors = solver.eigenvectors().rowwise().reverse();
  } else {
    // More features than rows: eigendecompose the n x n Gram matrix and map
    // its eigenvectors back through the data. Same nonzero spectrum, much
    // smaller solve for the 420-feature all-channel configuration.
    const Matrix gram = centered * centered.transpose() / static_cast<double>(n - 1);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram);
    eigenvalues = solver.eigenvalues().reverse();
    const Matrix u = solver.eigenvectors().rowwise().reverse();
    eigenvectors.resize(d, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double lambda = std::max(eigenvalues[j], 0.0);
      const double scale = std::sqrt(lambda * static_cast<double>(n - 1));
      if (scale > 0.0) {
        eigenvectors.col(j) = centered.transpose() * u.col(j) / scale;
      } else {
        eigenvectors.col(j).setZero();
      }
    }
  }

  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    eigenvalues[i] = std::max(eigenvalues[i], 0.0);
  }
  const double total = eigenvalues.sum();
  if (total <= 0.0) {
    throw std::invalid_argument("pca_fit: zero-variance feature matrix (k = 0)");
  }

  // Components below numerical rank carry no variance and an unusable
  // direction from the Gram mapping; never retain them.
  Eigen::Index rank_cap = 0;
  while (rank_cap < cap && eigenvalues[rank_cap] > 1e-12 * eigenvalues[0]) ++rank_cap;

  Eigen::Index k = 1;
  double cumulative = eigenvalues[0];
  while (k < rank_cap && cumulative < variance_threshold * total * (1.0 - 1e-12)) {
    cumulative += eigenvalues[k];
    ++k;
  }

  model.k = static_cast<int>(k);
  model.components = eigenvectors.leftCols(k).transpose();
  model.explained_variance_fraction = eigenvalues.head(k) / total;
  return model;
}

Vector pca_transform(const PcaModel& model, const Vector& features) {
  if (features.size() != model.mean.size()) {
    throw std::invalid_argument("pca_transform: feature length does not match model");
  }
  return model.components * (features - model.mean);
}

Matrix pca_transform_rows(const PcaModel& model, const Matrix& features) {
  if (features.cols() != model.mean.size()) {
    throw std::invalid_argument("pca_transform: feature width does not match model");
  }
  return (features.rowwise() - model.mean.transpose()) * model.components.transpose();
}

ZScoreModel zscore_fit(const Matrix& X) {
  if (X.rows() < 2) throw std::invalid_argument("zscore_fit: need at least 2 rows");
  ZScoreModel model;
  model.mean = X.colwise().mean();
  const Matrix centered = X.rowwise() - model.mean.transpose();
  model.stddev =
      (centered.array().square().colwise().sum() / static_cast<double>(X.rows()))
          .sqrt()
          .matrix()
          .transpose();
  return model;
}

Vector zscore_apply(const ZScoreModel& model, const Vector& features) {
  if (features.size() != model.mean.size()) {
    throw std::invalid_argument("zscore_apply: feature length does not match model");
  }
  Vector out(features.size());
  for (Eigen::Index i = 0; i < features.size(); ++i) {
    out[i] = model.stddev[i] == 0.0 ? 0.0 : (features[i] - model.mean[i]) / model.stddev[i];
  }
  return out;
}

Matrix zscore_apply_rows(const ZScoreModel& model, const Matrix& features) {
  Matrix out(features.rows(), features.cols());
  for (Eigen::Index r = 0; r < features.rows(); ++r) {
    out.row(r) = zscore_apply(model, features.row(r).transpose()).transpose();
  }
  return out;
}

Vector band_features(const TrialRecording& trial, const PreprocessConfig& config,
                     const RecordingSpec& spec,
                     const std::vector<StimulusSpec>& stimuli) {
  Matrix samples = select_channels(trial, spec, config.channels);
  if (config.use_car) samples = car_filter(samples);
  std::vector<Spectrum> spectra;
  spectra.reserve(static_cast<std::size_t>(samples.cols()));
  for (Eigen::Index c = 0; c < samples.cols(); ++c) {
    spectra.push_back(power_spectrum(samples.col(c), spec.sampling_rate_hz));
  }
  return extract_band_features(spectra, stimuli, config.harmonics, config.half_width_hz,
                               spec.nyquist_hz())
      .values;
}

FeatureVector preprocess_trial(const TrialRecording& trial, const PreprocessConfig& config,
                               const FittedPreprocess& fitted, const RecordingSpec& spec,
                               const std::vector<StimulusSpec>& stimuli) {
  Vector features = band_features(trial, config, spec, stimuli);
  std::string layout = "band power, " + config.name();
  if (fitted.pca) {
    features = pca_transform(*fitted.pca, features);
    layout += " -> pca(" + std::to_string(fitted.pca->k) + ")";
  }
  features = zscore_apply(fitted.zscore, features);
  layout += " -> zscore";
  return {std::move(features), std::move(layout)};
}

FitResult fit_preprocess_from_features(const Matrix& raw, const PreprocessConfig& config) {
  FitResult result;
  Matrix staged = raw;
  if (config.use_pca) {
    try {
      PcaModel pca = pca_fit(raw, config.pca_variance_threshold);
      staged = pca_transform_rows(pca, raw);
      result.fitted.pca = std::move(pca);
    } catch (const std::invalid_argument&) {
      // Degenerate (zero-variance) fit: train this variant without PCA.
      result.fitted.pca_degenerate = true;
      staged = raw;
    }
  }
  result.fitted.zscore = zscore_fit(staged);
  result.train_features = zscore_apply_rows(result.fitted.zscore, staged);
  return result;
}

FitResult fit_preprocess(const std::vector<TrialRecording>& trials,
                         const PreprocessConfig& config, const RecordingSpec& spec,
                         const std::vector<StimulusSpec>& stimuli) {
  if (trials.empty()) throw std::invalid_argument("fit_preprocess: no trials");

  Matrix raw;
  for (std::size_t t = 0; t < trials.size(); ++t) {
    const Vector f = band_features(trials[t], config, spec, stimuli);
    if (t == 0) raw.resize(static_cast<Eigen::Index>(trials.size()), f.size());
    raw.row(static_cast<Eigen::Index>(t)) = f.transpose();
  }
  return fit_preprocess_from_features(raw, config);
}

}  // namespace ssvep
