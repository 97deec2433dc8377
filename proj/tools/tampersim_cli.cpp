// Command-line front end: loads process/covering/protocol definitions, runs
// verification suites and attack experiments with reproducible seeding, and
// emits machine-readable reports.
//
// Exit codes: 0 all checks passed, 1 at least one check failed,
// 2 configuration or input validation error.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tampersim/errors.hpp"
#include "tampersim/harness.hpp"
#include "tampersim/version.hpp"

namespace {

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw tampersim::ValidationError("cannot open config file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw tampersim::ValidationError("cannot parse " + path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tampersim: tampering-attack simulation and verification"};
  app.set_version_flag("--version", std::string(tampersim::kVersion));

  std::string config_path;
  std::string command;
  std::string process_path;
  std::string covering_path;
  std::string protocol_path;
  std::string preset;
  std::string objective;
  std::string mode;
  std::string out_path;
  std::string format;
  std::vector<int> target;
  double p = -1.0;
  double eps = -1.0;
  double alpha = -1.0;
  long long k = -1;
  long long m = -1;
  long long trials = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::uint64_t support_cap = 0;

  app.add_option("--config", config_path, "experiment config JSON; flags override its values");
  app.add_option("--command", command,
                 "bias-exact | bias-sim | bounds-check | covering-verify | mpp-attack | suite");
  app.add_option("--process", process_path, "process definition JSON path");
  app.add_option("--covering", covering_path, "covering definition JSON path");
  app.add_option("--protocol", protocol_path, "protocol definition JSON path");
  app.add_option("--preset", preset, "built-in protocol: majority | threshold-erm | noisy-majority");
  app.add_option("--objective", objective,
                 "bias objective name, or mpp objective: confidence | risk | targeted");
  app.add_option("--target", target, "targeted example as: instance label")->expected(2);
  app.add_option("--p", p, "tampering probability");
  app.add_option("--k", k, "corrupted party count");
  app.add_option("--m", m, "party count (must match the protocol)");
  app.add_option("--eps", eps, "attack precision");
  app.add_option("--alpha", alpha, "risk threshold for confidence");
  app.add_option("--mode", mode, "exact | montecarlo | auto");
  app.add_option("--trials", trials, "Monte Carlo trial count");
  auto* seed_opt = app.add_option("--seed", seed, "master seed (default 0)");
  app.add_option("--support-cap", support_cap, "exact-enumeration cap");
  app.add_option("--out", out_path, "output path (default stdout)");
  app.add_option("--format", format, "json | csv");

  CLI11_PARSE(app, argc, argv);
  seed_given = seed_opt->count() > 0;

  try {
    nlohmann::json config_json = nlohmann::json::object();
    if (!config_path.empty()) config_json = read_json_file(config_path);

    tampersim::ExperimentConfig config = tampersim::ExperimentConfig::from_json(config_json);
    if (!command.empty()) config.command = command;
    if (!process_path.empty()) config.process = process_path;
    if (!covering_path.empty()) config.covering = covering_path;
    if (!protocol_path.empty()) config.protocol = protocol_path;
    if (!preset.empty()) config.preset = preset;
    if (!objective.empty()) config.objective = objective;
    if (!mode.empty()) config.mode = mode;
    if (target.size() == 2) config.target = std::make_pair(target[0], target[1]);
    if (p >= 0.0) config.p = p;
    if (eps >= 0.0) config.eps = eps;
    if (alpha >= 0.0) config.alpha = alpha;
    if (k >= 0) config.k = static_cast<int>(k);
    if (m >= 0) config.m = static_cast<int>(m);
    if (trials >= 0) config.trials = trials;
    if (seed_given) config.master_seed = seed;
    if (support_cap > 0) config.support_cap = support_cap;
    if (!out_path.empty()) config.out_path = out_path;
    if (!format.empty()) config.format = format;

    const tampersim::RunManifest manifest = tampersim::run(config);

    // One human-readable line per check on stderr; the manifest goes to the
    // selected output in the selected format.
    for (const auto& check : manifest.checks) {
      std::cerr << check.status << "  " << check.name;
      if (!check.detail.empty()) std::cerr << "  (" << check.detail << ")";
      std::cerr << "\n";
    }

    const std::string payload =
        config.format == "csv" ? manifest.to_csv() : manifest.to_json().dump(2) + "\n";
    if (config.out_path.empty()) {
      std::cout << payload;
    } else {
      std::ofstream out(config.out_path);
      if (!out) throw tampersim::ValidationError("cannot open output file: " + config.out_path);
      out << payload;
    }
    return manifest.exit_code();
  } catch (const tampersim::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
