#include "ssvep/io.hpp"

#include <charconv>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ssvep {

using nlohmann::json;

namespace {

std::string format_sample(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string join(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string current;
  for (const char ch : text) {
    if (ch == sep) {
      out.push_back(current);
      current.clear();
    } else {
      current += ch;
    }
  }
  out.push_back(current);
  return out;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// Trial files.

void write_trial(std::ostream& out, const TrialRecording& trial,
                 const RecordingSpec& spec) {
  out << "# ssvep-trial v1\n";
  out << "# subject: " << trial.subject_id << "\n";
  out << "# session: " << trial.session_index << "\n";
  out << "# trial: " << trial.trial_index << "\n";
  out << "# label: " << trial.true_label << "\n";
  out << "# sampling_rate_hz: " << format_sample(spec.sampling_rate_hz) << "\n";
  out << "# channels: " << join(spec.channels, ",") << "\n";
  for (Eigen::Index r = 0; r < trial.samples.rows(); ++r) {
    for (Eigen::Index c = 0; c < trial.samples.cols(); ++c) {
      if (c) out << ',';
      out << format_sample(trial.samples(r, c));
    }
    out << '\n';
  }
}

void write_trial(const std::filesystem::path& path, const TrialRecording& trial,
                 const RecordingSpec& spec) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_trial: cannot open " + path.string());
  write_trial(out, trial, spec);
  if (!out) throw std::runtime_error("write_trial: write failed for " + path.string());
}

TrialRecording read_trial(std::istream& in, const RecordingSpec& spec,
                          const std::string& origin) {
  TrialRecording trial;
  const int expected_cols = static_cast<int>(spec.channels.size());
  trial.samples.resize(spec.samples_per_trial, expected_cols);

  std::string line;
  int data_row = 0;
  bool header_checked = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = trim(line.substr(1, colon - 1));
      const std::string value = trim(line.substr(colon + 1));
      if (key == "subject") {
        trial.subject_id = value;
      } else if (key == "session") {
        trial.session_index = std::stoi(value);
      } else if (key == "trial") {
        trial.trial_index = std::stoi(value);
      } else if (key == "label") {
        trial.true_label = std::stoi(value);
      } else if (key == "sampling_rate_hz") {
        const double rate = std::stod(value);
        if (rate != spec.sampling_rate_hz) {
          std::ostringstream msg;
          msg << origin << ": sampling rate " << rate << " does not match expected "
              << spec.sampling_rate_hz;
          throw std::runtime_error(msg.str());
        }
      } else if (key == "channels") {
        const auto names = split(value, ',');
        if (names != spec.channels) {
          throw std::runtime_error(origin + ": channel list does not match recording spec");
        }
        header_checked = true;
      }
      continue;
    }

    ++data_row;
    if (data_row > spec.samples_per_trial) {
      std::ostringstream msg;
      msg << origin << ": more than " << spec.samples_per_trial << " data rows";
      throw std::runtime_error(msg.str());
    }
    const auto fields = split(line, ',');
    if (static_cast<int>(fields.size()) != expected_cols) {
      std::ostringstream msg;
      msg << origin << ": row " << data_row << ": expected " << expected_cols
          << " columns, found " << fields.size();
      throw std::runtime_error(msg.str());
    }
    for (int c = 0; c < expected_cols; ++c) {
      const std::string field = trim(fields[static_cast<std::size_t>(c)]);
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc{} || ptr != field.data() + field.size()) {
        std::ostringstream msg;
        msg << origin << ": row " << data_row << ", column " << c + 1
            << ": cannot parse '" << field << "' as a number";
        throw std::runtime_error(msg.str());
      }
      trial.samples(data_row - 1, c) = value;
    }
  }
  if (data_row != spec.samples_per_trial) {
    std::ostringstream msg;
    msg << origin << ": expected " << spec.samples_per_trial << " data rows, found "
        << data_row;
    throw std::runtime_error(msg.str());
  }
  (void)header_checked;
  return trial;
}

TrialRecording read_trial(const std::filesystem::path& path, const RecordingSpec& spec) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_trial: cannot open " + path.string());
  return read_trial(in, spec, path.filename().string());
}

// ---------------------------------------------------------------------------
// JSON helpers shared by dataset/config/model/report codecs.

namespace {

void require_keys(const json& obj, const std::string& path,
                  const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw std::runtime_error("config: unknown key " +
                               (path.empty() ? key : path + "." + key));
    }
  }
}

json recording_to_json(const RecordingSpec& spec) {
  return json{{"sampling_rate_hz", spec.sampling_rate_hz},
              {"channels", spec.channels},
              {"samples_per_trial", spec.samples_per_trial},
              {"flicker_seconds", spec.flicker_seconds},
              {"rest_seconds", spec.rest_seconds}};
}

RecordingSpec recording_from_json(const json& j, const std::string& path) {
  require_keys(j, path,
               {"sampling_rate_hz", "channels", "samples_per_trial", "flicker_seconds",
                "rest_seconds"});
  RecordingSpec spec;
  if (j.contains("sampling_rate_hz")) spec.sampling_rate_hz = j["sampling_rate_hz"];
  if (j.contains("channels")) {
    spec.channels = j["channels"].get<std::vector<std::string>>();
  }
  if (j.contains("samples_per_trial")) spec.samples_per_trial = j["samples_per_trial"];
  if (j.contains("flicker_seconds")) spec.flicker_seconds = j["flicker_seconds"];
  if (j.contains("rest_seconds")) spec.rest_seconds = j["rest_seconds"];
  return spec;
}

json stimuli_to_json(const std::vector<StimulusSpec>& stimuli) {
  json arr = json::array();
  for (const auto& s : stimuli) {
    arr.push_back(
        {{"name", s.name}, {"frequency_hz", s.frequency_hz}, {"color", s.color}});
  }
  return arr;
}

std::vector<StimulusSpec> stimuli_from_json(const json& arr, const std::string& path) {
  std::vector<StimulusSpec> out;
  int index = 0;
  for (const auto& j : arr) {
    require_keys(j, path + "[" + std::to_string(index) + "]",
                 {"name", "frequency_hz", "color"});
    StimulusSpec s;
    s.label_id = index++;
    s.name = j.at("name");
    s.frequency_hz = j.at("frequency_hz");
    if (j.contains("color")) s.color = j["color"];
    out.push_back(std::move(s));
  }
  return out;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Vector vector_from_json(const json& arr) {
  Vector v(static_cast<Eigen::Index>(arr.size()));
  Eigen::Index i = 0;
  for (const auto& x : arr) v[i++] = x.get<double>();
  return v;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, Eigen::Index expected_cols = -1) {
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  Eigen::Index cols = expected_cols;
  if (cols < 0) cols = n > 0 ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Matrix m(n, cols);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto& row = rows[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Dataset directory.

void save_dataset(const std::filesystem::path& dir, const SubjectDataset& dataset) {
  std::filesystem::create_directories(dir);
  json manifest;
  manifest["format"] = "ssvep-dataset";
  manifest["version"] = 1;
  manifest["recording"] = recording_to_json(dataset.spec);
  manifest["stimuli"] = stimuli_to_json(dataset.stimuli);
  manifest["provenance"] = {
      {"seed", dataset.provenance.seed},
      {"profile", dataset.provenance.profile},
      {"trials_per_session", dataset.provenance.trials_per_session}};

  json files = json::array();
  for (std::size_t i = 0; i < dataset.trials.size(); ++i) {
    const auto& trial = dataset.trials[i];
    char name[64];
    std::snprintf(name, sizeof(name), "s%d_t%02d.csv", trial.session_index,
                  trial.trial_index);
    files.push_back(name);
    write_trial(dir / name, trial, dataset.spec);
  }
  manifest["trials"] = files;

  std::ofstream out(dir / "dataset.json");
  if (!out) throw std::runtime_error("save_dataset: cannot write manifest in " + dir.string());
  out << manifest.dump(2) << "\n";
}

SubjectDataset load_dataset(const std::filesystem::path& dir) {
  std::ifstream in(dir / "dataset.json");
  if (!in) throw std::runtime_error("load_dataset: no dataset.json in " + dir.string());
  json manifest = json::parse(in);
  if (manifest.value("format", "") != "ssvep-dataset") {
    throw std::runtime_error("load_dataset: not a dataset manifest");
  }

  SubjectDataset dataset;
  dataset.spec = recording_from_json(manifest.at("recording"), "recording");
  dataset.stimuli = stimuli_from_json(manifest.at("stimuli"), "stimuli");
  if (manifest.contains("provenance")) {
    const auto& p = manifest["provenance"];
    dataset.provenance.seed = p.value("seed", 0ULL);
    dataset.provenance.profile = p.value("profile", "");
    if (p.contains("trials_per_session")) {
      dataset.provenance.trials_per_session =
          p["trials_per_session"].get<std::vector<int>>();
    }
  }
  for (const auto& name : manifest.at("trials")) {
    const auto path = dir / name.get<std::string>();
    dataset.trials.push_back(read_trial(path, dataset.spec));
    dataset.provenance.source_paths.push_back(path.string());
  }
  return dataset;
}

// ---------------------------------------------------------------------------
// Run configuration.

std::vector<PreprocessConfig> RunConfig::preprocess_configs() const {
  auto configs = default_preprocess_configs(channels);
  for (auto& c : configs) {
    c.harmonics = harmonics;
    c.half_width_hz = half_width_hz;
    c.pca_variance_threshold = pca_variance_threshold;
  }
  return configs;
}

ExperimentConfig RunConfig::experiment_config() const {
  ExperimentConfig e;
  e.preprocess = preprocess_configs();
  e.classifiers = classifiers;
  e.train_fraction = train_fraction;
  e.split_seed = split_seed;
  e.stimulation_seconds = recording.flicker_seconds;
  e.avg_classification_seconds_override = avg_classification_seconds;
  return e;
}

namespace {

TrainableSpec classifier_from_json(const json& j, const std::string& path) {
  TrainableSpec spec;
  const std::string kind = j.at("kind");
  spec.kind = classifier_kind_from_string(kind);
  std::set<std::string> allowed = {"kind", "seed"};
  if (spec.kind == ClassifierKind::svm_linear || spec.kind == ClassifierKind::svm_poly) {
    allowed.insert({"c", "tolerance", "max_iterations"});
  }
  if (spec.kind == ClassifierKind::svm_poly) allowed.insert({"degree", "coef0"});
  if (spec.kind == ClassifierKind::random_forest) {
    allowed.insert({"trees", "max_depth", "min_leaf", "bootstrap"});
  }
  require_keys(j, path, allowed);
  spec.svm_c = j.value("c", spec.svm_c);
  spec.svm_tolerance = j.value("tolerance", spec.svm_tolerance);
  spec.svm_max_iterations = j.value("max_iterations", spec.svm_max_iterations);
  spec.poly_degree = j.value("degree", spec.poly_degree);
  spec.poly_coef0 = j.value("coef0", spec.poly_coef0);
  spec.rf_trees = j.value("trees", spec.rf_trees);
  spec.rf_max_depth = j.value("max_depth", spec.rf_max_depth);
  spec.rf_min_leaf = j.value("min_leaf", spec.rf_min_leaf);
  spec.rf_bootstrap = j.value("bootstrap", spec.rf_bootstrap);
  spec.seed = j.value("seed", spec.seed);
  return spec;
}

json classifier_to_json(const TrainableSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  j["seed"] = spec.seed;
  if (spec.kind == ClassifierKind::svm_linear || spec.kind == ClassifierKind::svm_poly) {
    j["c"] = spec.svm_c;
    j["tolerance"] = spec.svm_tolerance;
    j["max_iterations"] = spec.svm_max_iterations;
  }
  if (spec.kind == ClassifierKind::svm_poly) {
    j["degree"] = spec.poly_degree;
    j["coef0"] = spec.poly_coef0;
  }
  if (spec.kind == ClassifierKind::random_forest) {
    j["trees"] = spec.rf_trees;
    j["max_depth"] = spec.rf_max_depth;
    j["min_leaf"] = spec.rf_min_leaf;
    j["bootstrap"] = spec.rf_bootstrap;
  }
  return j;
}

json artifacts_to_json(const ArtifactSpec& a) {
  return json{{"blink_amplitude", a.blink_amplitude},
              {"blink_duration_s", a.blink_duration_s},
              {"blink_band_low_hz", a.blink_band_low_hz},
              {"blink_band_high_hz", a.blink_band_high_hz},
              {"motion_amplitude", a.motion_amplitude},
              {"motion_duration_s", a.motion_duration_s},
              {"blink_rate_per_trial", a.blink_rate_per_trial},
              {"motion_rate_per_trial", a.motion_rate_per_trial}};
}

ArtifactSpec artifacts_from_json(const json& j, const std::string& path) {
  require_keys(j, path,
               {"blink_amplitude", "blink_duration_s", "blink_band_low_hz",
                "blink_band_high_hz", "motion_amplitude", "motion_duration_s",
                "blink_rate_per_trial", "motion_rate_per_trial"});
  ArtifactSpec a;
  a.blink_amplitude = j.value("blink_amplitude", a.blink_amplitude);
  a.blink_duration_s = j.value("blink_duration_s", a.blink_duration_s);
  a.blink_band_low_hz = j.value("blink_band_low_hz", a.blink_band_low_hz);
  a.blink_band_high_hz = j.value("blink_band_high_hz", a.blink_band_high_hz);
  a.motion_amplitude = j.value("motion_amplitude", a.motion_amplitude);
  a.motion_duration_s = j.value("motion_duration_s", a.motion_duration_s);
  a.blink_rate_per_trial = j.value("blink_rate_per_trial", a.blink_rate_per_trial);
  a.motion_rate_per_trial = j.value("motion_rate_per_trial", a.motion_rate_per_trial);
  return a;
}

void config_validate(const RunConfig& config, const std::string& origin) {
  std::vector<Violation> violations = validate_recording_spec(config.recording);
  {
    auto v = validate_stimuli(config.stimuli, config.recording);
    violations.insert(violations.end(), v.begin(), v.end());
  }
  if (!violations.empty()) {
    throw std::runtime_error(origin + ": invalid config:\n" +
                             format_violations(violations));
  }
  for (const auto& name : config.channels) {
    if (config.recording.channel_index(name) < 0) {
      throw std::runtime_error(origin + ": invalid config: analysis.channels: unknown channel " +
                               name);
    }
  }
  if (config.harmonics.empty()) {
    throw std::runtime_error(origin + ": invalid config: analysis.harmonics: empty");
  }
  for (const int h : config.harmonics) {
    if (h < 1) {
      throw std::runtime_error(origin +
                               ": invalid config: analysis.harmonics: multiplier < 1");
    }
    for (const auto& s : config.stimuli) {
      const double top = h * s.frequency_hz + config.half_width_hz;
      if (top >= config.recording.nyquist_hz()) {
        std::ostringstream msg;
        msg << origin << ": invalid config: analysis.harmonics: harmonic " << h
            << " of " << s.frequency_hz << " Hz puts the window edge at " << top
            << " Hz, at or above Nyquist " << config.recording.nyquist_hz() << " Hz";
        throw std::runtime_error(msg.str());
      }
    }
  }
  if (config.train_fraction < 0.0 || config.train_fraction > 1.0) {
    throw std::runtime_error(origin + ": invalid config: split.train_fraction out of [0, 1]");
  }
  if (config.half_width_hz <= 0.0) {
    throw std::runtime_error(origin + ": invalid config: analysis.half_width_hz must be > 0");
  }
  if (config.pca_variance_threshold <= 0.0 || config.pca_variance_threshold > 1.0) {
    throw std::runtime_error(
        origin + ": invalid config: analysis.pca_variance_threshold out of (0, 1]");
  }
  if (config.n_sessions < 1) {
    throw std::runtime_error(origin + ": invalid config: protocol.sessions must be >= 1");
  }
  const std::set<std::string> profiles = {"clean", "moderate", "noisy"};
  if (!profiles.count(config.synth.profile)) {
    throw std::runtime_error(origin + ": invalid config: synth.profile must be one of "
                                      "clean|moderate|noisy");
  }
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const std::string& origin) {
  const std::string trimmed = trim(json_text);
  json j = trimmed.empty() ? json::object() : json::parse(trimmed);

  require_keys(j, "",
               {"recording", "stimuli", "analysis", "classifiers", "split", "protocol",
                "metrics", "synth"});

  RunConfig config;
  if (j.contains("recording")) {
    config.recording = recording_from_json(j["recording"], "recording");
  }
  if (j.contains("stimuli")) config.stimuli = stimuli_from_json(j["stimuli"], "stimuli");
  if (j.contains("analysis")) {
    const auto& a = j["analysis"];
    require_keys(a, "analysis",
                 {"channels", "harmonics", "half_width_hz", "pca_variance_threshold"});
    if (a.contains("channels")) config.channels = a["channels"].get<std::vector<std::string>>();
    if (a.contains("harmonics")) config.harmonics = a["harmonics"].get<std::vector<int>>();
    config.half_width_hz = a.value("half_width_hz", config.half_width_hz);
    config.pca_variance_threshold =
        a.value("pca_variance_threshold", config.pca_variance_threshold);
  }
  if (j.contains("classifiers")) {
    config.classifiers.clear();
    int index = 0;
    for (const auto& c : j["classifiers"]) {
      config.classifiers.push_back(
          classifier_from_json(c, "classifiers[" + std::to_string(index++) + "]"));
    }
    if (config.classifiers.empty()) {
      throw std::runtime_error(origin + ": invalid config: classifiers: empty list");
    }
  }
  if (j.contains("split")) {
    require_keys(j["split"], "split", {"train_fraction", "seed"});
    config.train_fraction = j["split"].value("train_fraction", config.train_fraction);
    config.split_seed = j["split"].value("seed", config.split_seed);
  }
  if (j.contains("protocol")) {
    require_keys(j["protocol"], "protocol", {"sessions", "schedule_seed"});
    config.n_sessions = j["protocol"].value("sessions", config.n_sessions);
    config.schedule_seed = j["protocol"].value("schedule_seed", config.schedule_seed);
  }
  if (j.contains("metrics")) {
    require_keys(j["metrics"], "metrics",
                 {"itr_time_base", "avg_classification_seconds"});
    if (j["metrics"].contains("itr_time_base")) {
      config.itr_time_base =
          itr_time_base_from_string(j["metrics"]["itr_time_base"].get<std::string>());
    }
    if (j["metrics"].contains("avg_classification_seconds") &&
        !j["metrics"]["avg_classification_seconds"].is_null()) {
      config.avg_classification_seconds =
          j["metrics"]["avg_classification_seconds"].get<double>();
      if (*config.avg_classification_seconds <= 0.0) {
        throw std::runtime_error(
            origin + ": invalid config: metrics.avg_classification_seconds must be > 0");
      }
    }
  }
  if (j.contains("synth")) {
    const auto& s = j["synth"];
    require_keys(s, "synth", {"profile", "seed", "overrides", "artifacts"});
    config.synth.profile = s.value("profile", config.synth.profile);
    config.synth.seed = s.value("seed", config.synth.seed);
    if (s.contains("overrides")) {
      const auto& o = s["overrides"];
      require_keys(o, "synth.overrides",
                   {"occipital_gain", "other_gain", "noise_white_level",
                    "noise_pink_level", "freq_jitter_hz", "alpha_level",
                    "blink_rate_per_trial", "motion_rate_per_trial"});
      const auto opt = [&o](const char* key) -> std::optional<double> {
        if (o.contains(key)) return o[key].get<double>();
        return std::nullopt;
      };
      config.synth.occipital_gain = opt("occipital_gain");
      config.synth.other_gain = opt("other_gain");
      config.synth.noise_white_level = opt("noise_white_level");
      config.synth.noise_pink_level = opt("noise_pink_level");
      config.synth.freq_jitter_hz = opt("freq_jitter_hz");
      config.synth.alpha_level = opt("alpha_level");
      config.synth.blink_rate_per_trial = opt("blink_rate_per_trial");
      config.synth.motion_rate_per_trial = opt("motion_rate_per_trial");
    }
    if (s.contains("artifacts")) {
      config.synth.artifacts = artifacts_from_json(s["artifacts"], "synth.artifacts");
    }
  }

  config_validate(config, origin);
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_config: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.filename().string());
}

std::string save_config(const RunConfig& config) {
  json j;
  j["recording"] = recording_to_json(config.recording);
  j["stimuli"] = stimuli_to_json(config.stimuli);
  j["analysis"] = {{"channels", config.channels},
                   {"harmonics", config.harmonics},
                   {"half_width_hz", config.half_width_hz},
                   {"pca_variance_threshold", config.pca_variance_threshold}};
  j["classifiers"] = json::array();
  for (const auto& c : config.classifiers) j["classifiers"].push_back(classifier_to_json(c));
  j["split"] = {{"train_fraction", config.train_fraction}, {"seed", config.split_seed}};
  j["protocol"] = {{"sessions", config.n_sessions},
                   {"schedule_seed", config.schedule_seed}};
  j["metrics"] = {{"itr_time_base", to_string(config.itr_time_base)}};
  if (config.avg_classification_seconds) {
    j["metrics"]["avg_classification_seconds"] = *config.avg_classification_seconds;
  }
  json synth;
  synth["profile"] = config.synth.profile;
  synth["seed"] = config.synth.seed;
  json overrides = json::object();
  const auto put = [&overrides](const char* key, const std::optional<double>& v) {
    if (v) overrides[key] = *v;
  };
  put("occipital_gain", config.synth.occipital_gain);
  put("other_gain", config.synth.other_gain);
  put("noise_white_level", config.synth.noise_white_level);
  put("noise_pink_level", config.synth.noise_pink_level);
  put("freq_jitter_hz", config.synth.freq_jitter_hz);
  put("alpha_level", config.synth.alpha_level);
  put("blink_rate_per_trial", config.synth.blink_rate_per_trial);
  put("motion_rate_per_trial", config.synth.motion_rate_per_trial);
  if (!overrides.empty()) synth["overrides"] = overrides;
  if (config.synth.artifacts) synth["artifacts"] = artifacts_to_json(*config.synth.artifacts);
  j["synth"] = synth;
  return j.dump(2) + "\n";
}

SubjectProfile make_profile(const SynthSettings& settings, const RecordingSpec& spec) {
  double occipital = 1.0;
  double other = 0.1;
  SubjectProfile profile = SubjectProfile::occipital_focus(spec, occipital, other);
  profile.seed = settings.seed;
  profile.name = settings.profile;

  if (settings.profile == "clean") {
    // all-zero noise/jitter/artifact defaults
  } else if (settings.profile == "moderate") {
    profile.noise_white_level = 1.1;
    profile.noise_pink_level = 1.1;
    profile.freq_jitter_hz = 0.12;
    profile.blink_rate_per_trial = 1.0;
    profile.motion_burst_rate_per_trial = 1.0;
  } else if (settings.profile == "noisy") {
    profile.noise_white_level = 2.2;
    profile.noise_pink_level = 2.2;
    profile.freq_jitter_hz = 0.2;
    profile.blink_rate_per_trial = 2.0;
    profile.motion_burst_rate_per_trial = 2.0;
  } else {
    throw std::invalid_argument("make_profile: unknown profile " + settings.profile);
  }

  if (settings.occipital_gain || settings.other_gain) {
    profile.ssvep_gain =
        SubjectProfile::occipital_focus(spec, settings.occipital_gain.value_or(occipital),
                                        settings.other_gain.value_or(other))
            .ssvep_gain;
  }
  if (settings.noise_white_level) profile.noise_white_level = *settings.noise_white_level;
  if (settings.noise_pink_level) profile.noise_pink_level = *settings.noise_pink_level;
  if (settings.freq_jitter_hz) profile.freq_jitter_hz = *settings.freq_jitter_hz;
  if (settings.alpha_level) profile.alpha_level = *settings.alpha_level;
  if (settings.blink_rate_per_trial) {
    profile.blink_rate_per_trial = *settings.blink_rate_per_trial;
  }
  if (settings.motion_rate_per_trial) {
    profile.motion_burst_rate_per_trial = *settings.motion_rate_per_trial;
  }
  if (settings.artifacts) profile.artifacts = *settings.artifacts;
  return profile;
}

// ---------------------------------------------------------------------------
// Model file.

namespace {

json preprocess_config_to_json(const PreprocessConfig& c) {
  return json{{"use_car", c.use_car},
              {"use_pca", c.use_pca},
              {"channels", c.channels},
              {"harmonics", c.harmonics},
              {"half_width_hz", c.half_width_hz},
              {"pca_variance_threshold", c.pca_variance_threshold}};
}

PreprocessConfig preprocess_config_from_json(const json& j) {
  PreprocessConfig c;
  c.use_car = j.at("use_car");
  c.use_pca = j.at("use_pca");
  c.channels = j.at("channels").get<std::vector<std::string>>();
  c.harmonics = j.at("harmonics").get<std::vector<int>>();
  c.half_width_hz = j.at("half_width_hz");
  c.pca_variance_threshold = j.at("pca_variance_threshold");
  return c;
}

json trained_model_to_json(const TrainedModel& m) {
  json j;
  j["spec"] = classifier_to_json(m.spec);
  j["n_features"] = m.n_features;
  j["n_labels"] = m.n_labels;
  j["training_accuracy"] = m.training_accuracy;
  j["convergence_warning"] = m.convergence_warning;
  if (m.spec.kind == ClassifierKind::random_forest) {
    json trees = json::array();
    for (const auto& tree : m.forest.trees) {
      json nodes = json::array();
      for (const auto& n : tree.nodes) {
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.label});
      }
      trees.push_back(std::move(nodes));
    }
    j["forest"] = std::move(trees);
  } else {
    json heads = json::array();
    for (const auto& head : m.svm.heads) {
      heads.push_back({{"support_vectors", matrix_to_json(head.support_vectors)},
                       {"coefficients", vector_to_json(head.coefficients)},
                       {"bias", head.bias}});
    }
    j["svm"] = std::move(heads);
  }
  return j;
}

TrainedModel trained_model_from_json(const json& j) {
  TrainedModel m;
  m.spec = classifier_from_json(j.at("spec"), "model.classifier.spec");
  m.n_features = j.at("n_features");
  m.n_labels = j.at("n_labels");
  m.training_accuracy = j.at("training_accuracy");
  m.convergence_warning = j.value("convergence_warning", false);
  if (m.spec.kind == ClassifierKind::random_forest) {
    for (const auto& tree_json : j.at("forest")) {
      DecisionTree tree;
      for (const auto& n : tree_json) {
        TreeNode node;
        node.feature = n[0];
        node.threshold = n[1];
        node.left = n[2];
        node.right = n[3];
        node.label = n[4];
        tree.nodes.push_back(node);
      }
      m.forest.trees.push_back(std::move(tree));
    }
  } else {
    for (const auto& head_json : j.at("svm")) {
      SvmHead head;
      head.support_vectors =
          matrix_from_json(head_json.at("support_vectors"), m.n_features);
      head.coefficients = vector_from_json(head_json.at("coefficients"));
      head.bias = head_json.at("bias");
      m.svm.heads.push_back(std::move(head));
    }
  }
  return m;
}

}  // namespace

void save_model(const std::filesystem::path& path, const EnsembleModel& model) {
  json j;
  j["format"] = "ssvep-ensemble-model";
  j["version"] = 1;
  j["recording"] = recording_to_json(model.rec_spec);
  j["stimuli"] = stimuli_to_json(model.stimuli);
  json variants = json::array();
  for (const auto& v : model.variants) {
    json vj;
    vj["name"] = v.name;
    vj["config"] = preprocess_config_to_json(v.config);
    vj["weight"] = v.weight;
    vj["pca_degenerate"] = v.fitted.pca_degenerate;
    if (v.fitted.pca) {
      vj["pca"] = {{"mean", vector_to_json(v.fitted.pca->mean)},
                   {"components", matrix_to_json(v.fitted.pca->components)},
                   {"explained_variance_fraction",
                    vector_to_json(v.fitted.pca->explained_variance_fraction)},
                   {"k", v.fitted.pca->k}};
    }
    vj["zscore"] = {{"mean", vector_to_json(v.fitted.zscore.mean)},
                    {"stddev", vector_to_json(v.fitted.zscore.stddev)}};
    vj["classifier"] = trained_model_to_json(v.model);
    variants.push_back(std::move(vj));
  }
  j["variants"] = std::move(variants);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot open " + path.string());
  out << j.dump() << "\n";
}

EnsembleModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path.string());
  json j = json::parse(in);
  if (j.value("format", "") != "ssvep-ensemble-model") {
    throw std::runtime_error("load_model: " + path.string() +
                             " is not an ensemble model file");
  }
  if (j.value("version", 0) != 1) {
    throw std::runtime_error("load_model: unsupported model version");
  }

  EnsembleModel model;
  model.rec_spec = recording_from_json(j.at("recording"), "model.recording");
  model.stimuli = stimuli_from_json(j.at("stimuli"), "model.stimuli");
  for (const auto& vj : j.at("variants")) {
    EnsembleVariant v;
    v.name = vj.at("name");
    v.config = preprocess_config_from_json(vj.at("config"));
    v.weight = vj.at("weight");
    v.fitted.pca_degenerate = vj.value("pca_degenerate", false);
    if (vj.contains("pca")) {
      PcaModel pca;
      pca.mean = vector_from_json(vj["pca"].at("mean"));
      pca.k = vj["pca"].at("k");
      pca.components = matrix_from_json(vj["pca"].at("components"), pca.mean.size());
      pca.explained_variance_fraction =
          vector_from_json(vj["pca"].at("explained_variance_fraction"));
      v.fitted.pca = std::move(pca);
    }
    v.fitted.zscore.mean = vector_from_json(vj.at("zscore").at("mean"));
    v.fitted.zscore.stddev = vector_from_json(vj.at("zscore").at("stddev"));
    v.model = trained_model_from_json(vj.at("classifier"));
    model.variants.push_back(std::move(v));
  }
  return model;
}

// ---------------------------------------------------------------------------
// Reports.

std::string report_to_json(const ExperimentReport& report, bool include_timings) {
  json j;
  j["format"] = "ssvep-experiment-report";
  j["version"] = 1;
  j["n_train"] = report.n_train;
  j["n_test"] = report.n_test;
  j["n_labels"] = report.n_labels;
  j["stimulation_seconds"] = report.stimulation_seconds;

  json variants = json::array();
  for (const auto& v : report.variants) {
    variants.push_back({{"name", v.name},
                        {"weight", v.weight},
                        {"test_accuracy", v.test_accuracy},
                        {"itr_stimulation_bpm", v.itr_stimulation},
                        {"pca_degenerate", v.pca_degenerate},
                        {"convergence_warning", v.convergence_warning}});
  }
  j["variants"] = std::move(variants);

  j["ensemble"] = {{"accuracy", report.ensemble_accuracy},
                   {"itr_stimulation_bpm", report.ensemble_itr_stimulation},
                   {"itr_time_base", "stimulation"}};
  const bool stable_compute = report.compute_seconds_overridden;
  if (report.ensemble_itr_compute && (include_timings || stable_compute)) {
    j["ensemble"]["itr_compute_bpm"] = *report.ensemble_itr_compute;
    j["ensemble"]["itr_compute_time_base"] = "measured_compute";
    j["ensemble"]["avg_classification_seconds"] = report.avg_classification_seconds;
    j["ensemble"]["compute_seconds_overridden"] = report.compute_seconds_overridden;
  }

  j["confusion"] = report.confusion;
  json outcomes = json::array();
  for (const auto& o : report.outcomes) {
    outcomes.push_back({{"ordinal", o.ordinal},
                        {"truth", o.truth},
                        {"predicted", o.predicted},
                        {"tally", o.tally},
                        {"per_variant", o.per_variant}});
  }
  j["outcomes"] = std::move(outcomes);

  if (report.significance) {
    j["significance"] = {{"t", report.significance->t},
                         {"p_value", report.significance->p_value},
                         {"degrees_of_freedom", report.significance->degrees_of_freedom},
                         {"note", report.significance_note}};
  } else {
    j["significance"] = {{"note", report.significance_note}};
  }
  if (include_timings) {
    j["timestamp_unix"] = static_cast<long>(std::time(nullptr));
  }
  return j.dump(2) + "\n";
}

void save_report(const std::filesystem::path& path, const ExperimentReport& report,
                 bool include_timings) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_report: cannot open " + path.string());
  out << report_to_json(report, include_timings);
}

ExperimentReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_report: cannot open " + path.string());
  json j = json::parse(in);
  if (j.value("format", "") != "ssvep-experiment-report") {
    throw std::runtime_error("load_report: " + path.string() + " is not a report file");
  }

  ExperimentReport report;
  report.n_train = j.at("n_train");
  report.n_test = j.at("n_test");
  report.n_labels = j.at("n_labels");
  report.stimulation_seconds = j.value("stimulation_seconds", 5.0);
  for (const auto& vj : j.at("variants")) {
    VariantReport v;
    v.name = vj.at("name");
    v.weight = vj.at("weight");
    v.test_accuracy = vj.at("test_accuracy");
    v.itr_stimulation = vj.at("itr_stimulation_bpm");
    v.pca_degenerate = vj.value("pca_degenerate", false);
    v.convergence_warning = vj.value("convergence_warning", false);
    report.variants.push_back(std::move(v));
  }
  report.ensemble_accuracy = j.at("ensemble").at("accuracy");
  report.ensemble_itr_stimulation = j.at("ensemble").at("itr_stimulation_bpm");
  if (j.at("ensemble").contains("itr_compute_bpm")) {
    report.ensemble_itr_compute = j["ensemble"]["itr_compute_bpm"].get<double>();
    report.avg_classification_seconds =
        j["ensemble"].value("avg_classification_seconds", 0.0);
    report.compute_seconds_overridden =
        j["ensemble"].value("compute_seconds_overridden", false);
  }
  report.confusion = j.at("confusion").get<std::vector<std::vector<int>>>();
  for (const auto& oj : j.at("outcomes")) {
    TrialOutcome o;
    o.ordinal = oj.at("ordinal");
    o.truth = oj.at("truth");
    o.predicted = oj.at("predicted");
    o.tally = oj.at("tally").get<std::vector<double>>();
    o.per_variant = oj.at("per_variant").get<std::vector<CommandLabel>>();
    report.outcomes.push_back(std::move(o));
  }
  if (j.contains("significance")) {
    report.significance_note = j["significance"].value("note", "");
    if (j["significance"].contains("t")) {
      TTestResult t;
      t.t = j["significance"]["t"];
      t.p_value = j["significance"]["p_value"];
      t.degrees_of_freedom = j["significance"]["degrees_of_freedom"];
      report.significance = t;
    }
  }
  return report;
}

std::string render_report_table(const ExperimentReport& report) {
  std::ostringstream os;
  char line[160];
  os << "variant                     train-acc   test-acc   ITR (bpm, stimulation)\n";
  os << "-----------------------------------------------------------------------\n";
  for (const auto& v : report.variants) {
    std::snprintf(line, sizeof(line), "%-26s  %8.4f   %8.4f   %10.2f%s\n", v.name.c_str(),
                  v.weight, v.test_accuracy, v.itr_stimulation,
                  v.convergence_warning ? "  [svm convergence warning]" : "");
    os << line;
  }
  os << "-----------------------------------------------------------------------\n";
  std::snprintf(line, sizeof(line), "%-26s  %8s   %8.4f   %10.2f\n", "ensemble (weighted vote)",
                "", report.ensemble_accuracy, report.ensemble_itr_stimulation);
  os << line;
  std::snprintf(line, sizeof(line),
                "ITR time base: stimulation, %.3g s per trial (Q = %.4g/min)\n",
                report.stimulation_seconds, 60.0 / report.stimulation_seconds);
  os << line;
  if (report.ensemble_itr_compute) {
    std::snprintf(line, sizeof(line),
                  "ITR time base: measured_compute, %.3g s per classification "
                  "(Q = %.4g/min) -> ensemble ITR %.4g bpm%s\n",
                  report.avg_classification_seconds,
                  60.0 / report.avg_classification_seconds, *report.ensemble_itr_compute,
                  report.compute_seconds_overridden ? " [configured time]" : " [measured]");
    os << line;
  }
  std::snprintf(line, sizeof(line), "test trials: %d, train trials: %d\n", report.n_test,
                report.n_train);
  os << line;
  if (report.significance) {
    std::snprintf(line, sizeof(line), "paired t-test: t = %.4f, p = %.5f (%s)\n",
                  report.significance->t, report.significance->p_value,
                  report.significance_note.c_str());
    os << line;
  } else if (!report.significance_note.empty()) {
    os << "paired t-test: " << report.significance_note << "\n";
  }
  return os.str();
}

}  // namespace ssvep
