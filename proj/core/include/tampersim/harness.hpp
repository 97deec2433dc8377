#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tampersim/covering.hpp"

namespace tampersim {

/// One experiment invocation: which command to run, where its inputs live,
/// and the knobs that apply. Flags override config-file values.
struct ExperimentConfig {
  std::string command;  // bias-exact | bias-sim | bounds-check | covering-verify | mpp-attack | suite

  // Inputs: either paths or inline JSON definitions.
  nlohmann::json process;   // string path or inline object
  nlohmann::json covering;  // string path or inline object
  nlohmann::json protocol;  // string path or inline object
  std::string preset;
  nlohmann::json objective;  // bias-* objective name/object; mpp: confidence|risk|targeted

  std::optional<double> p;
  std::optional<int> k;
  std::optional<int> m;
  std::optional<double> eps;
  std::optional<double> alpha;
  std::optional<std::pair<int, int>> target;
  std::string mode = "auto";  // exact | montecarlo | auto

  long long trials = 10000;
  std::uint64_t master_seed = 0;  // documented default seed
  std::size_t support_cap = kDefaultSupportCap;
  std::string out_path;        // empty: stdout
  std::string format = "json";  // json | csv

  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  void validate() const;
};

struct CheckResult {
  std::string name;
  std::string status;  // pass | fail | degenerate | info
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string detail;

  nlohmann::json to_json() const;
};

/// Everything one run produced: the echoed config, per-check results, the
/// command-specific payload, seed derivations, and timing. Reruns with the
/// same config reproduce every value; timing is reported separately and is
/// the only field excluded from that guarantee.
struct RunManifest {
  nlohmann::json config;
  std::string version;
  std::vector<CheckResult> checks;
  nlohmann::json results;
  std::vector<std::string> seed_records;
  double wall_ms = 0.0;

  /// 0 when all checks pass, 1 when any failed; validation problems throw
  /// ValidationError before a manifest exists (exit code 2).
  int exit_code() const;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

RunManifest run(const ExperimentConfig& config);

/// Reads a JSON value that is either an inline object or a path to one.
nlohmann::json resolve_input(const nlohmann::json& value);

}  // namespace tampersim
