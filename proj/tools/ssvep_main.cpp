#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "ssvep/bridge.hpp"
#include "ssvep/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ssvep::RunConfig config_or_defaults(const std::string& config_path) {
  if (config_path.empty()) return ssvep::RunConfig{};
  return ssvep::load_config(config_path);
}

std::pair<std::string, int> parse_endpoint(const std::string& endpoint) {
  const auto colon = endpoint.rfind(':');
  if (colon == std::string::npos) {
    throw std::runtime_error("endpoint must look like HOST:PORT, got " + endpoint);
  }
  return {endpoint.substr(0, colon), std::stoi(endpoint.substr(colon + 1))};
}

int run_synth(const std::string& config_path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, const std::string& profile_name,
              const std::string& subject) {
  ssvep::RunConfig config = config_or_defaults(config_path);
  if (seed) config.synth.seed = *seed;
  if (!profile_name.empty()) config.synth.profile = profile_name;

  ssvep::SubjectProfile profile = ssvep::make_profile(config.synth, config.recording);
  if (!subject.empty()) profile.name = subject;

  const auto schedule =
      ssvep::make_offline_schedule(config.schedule_seed, config.n_sessions,
                                   static_cast<int>(config.stimuli.size()));
  const ssvep::SubjectDataset dataset =
      ssvep::synth_dataset(profile, schedule, config.stimuli, config.recording);

  const auto violations = ssvep::validate_dataset(dataset);
  if (!violations.empty()) {
    std::cerr << "generated dataset failed validation:\n"
              << ssvep::format_violations(violations);
    return 1;
  }
  ssvep::save_dataset(out_dir, dataset);
  std::cout << "wrote " << dataset.trials.size() << " trials to " << out_dir
            << " (profile " << profile.name << ", generator seed " << profile.seed
            << ", schedule seed " << config.schedule_seed << ")\n";
  return 0;
}

int run_train(const std::string& config_path, const std::string& data_dir,
              const std::string& out_path, bool all_channels) {
  ssvep::RunConfig config = config_or_defaults(config_path);
  if (all_channels) config.channels = config.recording.channels;

  const ssvep::SubjectDataset dataset = ssvep::load_dataset(data_dir);
  const auto split =
      ssvep::split_subjectwise_stratified(dataset, config.train_fraction, config.split_seed);
  std::vector<ssvep::CommandLabel> labels;
  for (const auto& t : split.train) labels.push_back(t.true_label);

  const ssvep::EnsembleModel model =
      ssvep::build_ensemble(split.train, labels, config.classifiers,
                            config.preprocess_configs(), dataset.spec, dataset.stimuli);
  ssvep::save_model(out_path, model);
  std::cout << "trained " << model.variants.size() << " variants on "
            << split.train.size() << " trials (split seed " << config.split_seed
            << "); model written to " << out_path << "\n";
  for (const auto& v : model.variants) {
    std::cout << "  " << v.name << ": training accuracy " << v.weight << "\n";
  }
  return 0;
}

int run_evaluate(const std::string& config_path, const std::string& data_dir,
                 const std::string& out_path, bool all_channels, bool no_timings) {
  ssvep::RunConfig config = config_or_defaults(config_path);
  if (all_channels) config.channels = config.recording.channels;

  const ssvep::SubjectDataset dataset = ssvep::load_dataset(data_dir);
  const ssvep::ExperimentReport report =
      ssvep::run_offline_experiment(dataset, config.experiment_config());

  std::cout << ssvep::render_report_table(report);
  if (!out_path.empty()) {
    ssvep::save_report(out_path, report, !no_timings);
    std::cout << "report written to " << out_path << "\n";
  }
  return 0;
}

int run_online(const std::string& config_path, const std::string& model_path,
               const std::string& data_dir, const std::string& split_mode,
               const std::string& listen, const std::string& out_path) {
  ssvep::RunConfig config = config_or_defaults(config_path);
  const ssvep::EnsembleModel model = ssvep::load_model(model_path);
  const ssvep::SubjectDataset dataset = ssvep::load_dataset(data_dir);

  std::vector<ssvep::TrialRecording> trials;
  if (split_mode == "test") {
    trials = ssvep::split_subjectwise_stratified(dataset, config.train_fraction,
                                                 config.split_seed)
                 .test;
  } else if (split_mode == "all") {
    trials = dataset.trials;
  } else {
    std::cerr << "--split must be test or all\n";
    return 2;
  }

  ssvep::OnlineReport online;
  if (!listen.empty()) {
    const auto [host, port] = parse_endpoint(listen);
    ssvep::CommandBridge bridge(host, port);
    std::cout << "serving " << trials.size() << " trials on " << host << ":"
              << bridge.port() << "\n";
    const ssvep::BridgeStats stats =
        bridge.serve(model, ssvep::make_replay_source(trials));
    online = stats.online;
    std::cout << "delivered " << stats.frames_sent << " frames ("
              << stats.commands_sent << " CMD, " << stats.errors_sent << " ERR) over "
              << stats.client_sessions << " client session(s)\n";
  } else {
    online = ssvep::run_online_session(
        model, ssvep::make_replay_source(trials), [](const ssvep::OnlineRecord& r) {
          std::cout << (r.error ? ssvep::format_err_frame(r) : ssvep::format_cmd_frame(r));
        });
    std::cout << "END\n";
  }

  if (online.accuracy) {
    std::cout << "online accuracy over labeled trials: " << *online.accuracy << "\n";
  }
  if (!out_path.empty()) {
    json j;
    j["format"] = "ssvep-online-report";
    j["version"] = 1;
    j["commands"] = online.commands_emitted;
    j["errors"] = online.errors;
    if (online.accuracy) j["accuracy"] = *online.accuracy;
    json records = json::array();
    for (const auto& r : online.records) {
      json rj = {{"ordinal", r.ordinal}, {"error", r.error}};
      if (r.error) {
        rj["detail"] = r.error_detail;
      } else {
        rj["predicted"] = r.predicted;
        rj["name"] = r.command_name;
        rj["tally"] = r.tally;
        if (r.truth) rj["truth"] = *r.truth;
      }
      records.push_back(std::move(rj));
    }
    j["records"] = std::move(records);
    std::ofstream out(out_path);
    out << j.dump(2) << "\n";
    std::cout << "online report written to " << out_path << "\n";
  }
  return 0;
}

int run_report(const std::vector<std::string>& inputs) {
  for (const auto& path : inputs) {
    const ssvep::ExperimentReport report = ssvep::load_report(path);
    std::cout << "== " << path << "\n" << ssvep::render_report_table(report);
    // Accuracy bars, ensemble last.
    for (const auto& v : report.variants) {
      const int width = static_cast<int>(v.test_accuracy * 40.0 + 0.5);
      std::cout << "  " << std::string(static_cast<std::size_t>(width), '#')
                << std::string(static_cast<std::size_t>(40 - width), '.') << "  "
                << v.name << "\n";
    }
    const int width = static_cast<int>(report.ensemble_accuracy * 40.0 + 0.5);
    std::cout << "  " << std::string(static_cast<std::size_t>(width), '#')
              << std::string(static_cast<std::size_t>(40 - width), '.')
              << "  ensemble\n\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SSVEP ensemble BCI toolkit: synthetic recording, training, "
               "evaluation, and the online command bridge"};
  app.require_subcommand(1);

  std::string config_path, out_path, data_dir, model_path;
  std::string profile_name, subject, split_mode = "test", listen;
  std::optional<std::uint64_t> seed;
  bool all_channels = false, no_timings = false;
  std::vector<std::string> report_inputs;

  auto* synth = app.add_subcommand("synth", "generate a synthetic subject dataset");
  synth->add_option("--config", config_path, "run configuration (JSON)");
  synth->add_option("--out", out_path, "output dataset directory")->required();
  synth->add_option("--seed", seed, "generator seed (overrides config)");
  synth->add_option("--profile", profile_name, "clean | moderate | noisy");
  synth->add_option("--subject", subject, "subject id stored with the trials");

  auto* train = app.add_subcommand("train", "build and serialize the ensemble");
  train->add_option("--config", config_path, "run configuration (JSON)");
  train->add_option("--data", data_dir, "dataset directory")->required();
  train->add_option("--out", out_path, "output model file")->required();
  train->add_flag("--all-channels", all_channels, "use every recorded channel");

  auto* evaluate = app.add_subcommand("evaluate", "run the offline experiment");
  evaluate->add_option("--config", config_path, "run configuration (JSON)");
  evaluate->add_option("--data", data_dir, "dataset directory")->required();
  evaluate->add_option("--out", out_path, "report file (JSON)");
  evaluate->add_flag("--all-channels", all_channels, "use every recorded channel");
  evaluate->add_flag("--no-timings", no_timings,
                     "omit timestamps and measured times for reproducible bytes");

  auto* online = app.add_subcommand("online", "replay trials through the command bridge");
  online->add_option("--config", config_path, "run configuration (JSON)");
  online->add_option("--model", model_path, "trained ensemble model")->required();
  online->add_option("--data", data_dir, "dataset directory")->required();
  online->add_option("--split", split_mode, "replay the test split or all trials");
  online->add_option("--listen", listen, "serve frames on HOST:PORT instead of stdout");
  online->add_option("--out", out_path, "online report file (JSON)");

  auto* report = app.add_subcommand("report", "render saved experiment reports");
  report->add_option("--in", report_inputs, "report file(s)")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      return run_synth(config_path, out_path, seed, profile_name, subject);
    }
    if (train->parsed()) {
      return run_train(config_path, data_dir, out_path, all_channels);
    }
    if (evaluate->parsed()) {
      return run_evaluate(config_path, data_dir, out_path, all_channels, no_timings);
    }
    if (online->parsed()) {
      return run_online(config_path, model_path, data_dir, split_mode, listen, out_path);
    }
    if (report->parsed()) {
      return run_report(report_inputs);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
