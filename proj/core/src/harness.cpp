#include "tampersim/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "tampersim/bounds.hpp"
#include "tampersim/errors.hpp"
#include "tampersim/mpplearn.hpp"
#include "tampersim/oracle.hpp"
#include "tampersim/process.hpp"
#include "tampersim/suite.hpp"
#include "tampersim/tamper.hpp"
#include "tampersim/text.hpp"
#include "tampersim/version.hpp"

namespace tampersim {

namespace {

const char* kCommands[] = {"bias-exact", "bias-sim",   "bounds-check",
                           "covering-verify", "mpp-attack", "suite"};

CheckResult make_check(std::string name, bool pass, double value, double expected,
                       double tolerance, std::string detail = "") {
  return {std::move(name), pass ? "pass" : "fail", value, expected, tolerance,
          std::move(detail)};
}

CheckResult make_info(std::string name, double value, std::string detail) {
  return {std::move(name), "info", value, 0.0, 0.0, std::move(detail)};
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig c;
    c.command = j.value("command", std::string());
    if (j.contains("process")) c.process = j.at("process");
    if (j.contains("covering")) c.covering = j.at("covering");
    if (j.contains("protocol")) c.protocol = j.at("protocol");
    c.preset = j.value("preset", std::string());
    if (j.contains("objective")) c.objective = j.at("objective");
    if (j.contains("p")) c.p = j.at("p").get<double>();
    if (j.contains("k")) c.k = j.at("k").get<int>();
    if (j.contains("m")) c.m = j.at("m").get<int>();
    if (j.contains("eps")) c.eps = j.at("eps").get<double>();
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
    if (j.contains("target")) {
      c.target = std::make_pair(j.at("target").at(0).get<int>(), j.at("target").at(1).get<int>());
    }
    c.mode = j.value("mode", std::string("auto"));
    c.trials = j.value("trials", static_cast<long long>(10000));
    c.master_seed = j.value("seed", static_cast<std::uint64_t>(0));
    c.support_cap = j.value("support_cap", kDefaultSupportCap);
    c.out_path = j.value("out", std::string());
    c.format = j.value("format", std::string("json"));
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("experiment config: ") + e.what());
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["command"] = command;
  if (!process.is_null()) j["process"] = process;
  if (!covering.is_null()) j["covering"] = covering;
  if (!protocol.is_null()) j["protocol"] = protocol;
  if (!preset.empty()) j["preset"] = preset;
  if (!objective.is_null()) j["objective"] = objective;
  if (p) j["p"] = *p;
  if (k) j["k"] = *k;
  if (m) j["m"] = *m;
  if (eps) j["eps"] = *eps;
  if (alpha) j["alpha"] = *alpha;
  if (target) j["target"] = {target->first, target->second};
  j["mode"] = mode;
  j["trials"] = trials;
  j["seed"] = master_seed;
  j["support_cap"] = support_cap;
  if (!out_path.empty()) j["out"] = out_path;
  j["format"] = format;
  return j;
}

void ExperimentConfig::validate() const {
  if (std::find(std::begin(kCommands), std::end(kCommands), command) == std::end(kCommands)) {
    throw ValidationError("unknown command: '" + command + "'");
  }
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (eps && !(*eps > 0.0 && *eps <= 1.0)) throw ValidationError("eps must lie in (0,1]");
  if (format != "json" && format != "csv") throw ValidationError("format must be json or csv");
  if (mode != "auto" && mode != "exact" && mode != "montecarlo") {
    throw ValidationError("mode must be auto, exact, or montecarlo");
  }
}

nlohmann::json CheckResult::to_json() const {
  return {{"name", name},         {"status", status}, {"value", value},
          {"expected", expected}, {"tolerance", tolerance}, {"detail", detail}};
}

int RunManifest::exit_code() const {
  for (const auto& check : checks) {
    if (check.status == "fail") return 1;
  }
  return 0;
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const auto& check : checks) checks_json.push_back(check.to_json());
  return {{"config", config},
          {"version", version},
          {"checks", checks_json},
          {"results", results},
          {"seeds", seed_records},
          {"timing", {{"wall_ms", wall_ms}}}};
}

std::string RunManifest::to_csv() const {
  if (results.contains("csv")) return results.at("csv").get<std::string>();
  std::string out = "check,status,value,expected,tolerance\n";
  for (const auto& check : checks) {
    out += check.name + "," + check.status + "," + format_double(check.value) + "," +
           format_double(check.expected) + "," + format_double(check.tolerance) + "\n";
  }
  return out;
}

nlohmann::json resolve_input(const nlohmann::json& value) {
  if (value.is_null()) throw ValidationError("missing input definition");
  if (!value.is_string()) return value;
  const std::string path = value.get<std::string>();
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open input file: " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("cannot parse " + path + ": " + e.what());
  }
}

namespace {

bool objective_is_boolean(const RandomProcess& proc, const ObjectiveFunction& f,
                          std::size_t cap) {
  const ExactLaw law = exact_law(proc, cap);
  for (const auto& seq : law.sequences) {
    const double v = f(seq);
    if (std::abs(v) > 1e-12 && std::abs(v - 1.0) > 1e-12) return false;
  }
  return true;
}

CoveringDistribution covering_for(const ExperimentConfig& config, int n) {
  if (!config.covering.is_null()) return load_covering(resolve_input(config.covering));
  if (config.p) return CoveringDistribution::iid(n, *config.p);
  throw ValidationError("no covering given: provide a covering definition or --p");
}

void run_bias_exact(const ExperimentConfig& config, RunManifest& manifest) {
  const RandomProcess proc = load_process(resolve_input(config.process));
  if (config.objective.is_null()) throw ValidationError("bias-exact needs an objective");
  const ObjectiveFunction f = objective_from_json(config.objective, proc);
  const CoveringDistribution cov = covering_for(config, proc.block_count());
  const std::size_t cap = config.support_cap;

  const double q = cov.target_p();
  const Moments mm = moments(proc, f, q, cap);
  const AttackedExpectation avg = exact_covering_average(proc, f, cov, cap);

  nlohmann::json results;
  results["mu"] = mm.mu;
  results["nu"] = mm.nu;
  results["moment_1p"] = mm.moment_1p;
  results["q"] = q;
  results["covering_average"] = avg.value;
  results["zero_prefix_fallback"] = avg.zero_prefix_fallback;
  results["covering"] = cov.describe();

  if (mm.mu > 0.0) {
    const double bound = tampering_bound(mm.mu, mm.moment_1p, q);
    results["bound"] = bound;
    manifest.checks.push_back(make_check("covering_average_vs_bound", avg.value >= bound - 1e-9,
                                         avg.value, bound, 1e-9));
    if (objective_is_boolean(proc, f, cap)) {
      const double bbound = boolean_bound(mm.mu, q);
      results["boolean_bound"] = bbound;
      manifest.checks.push_back(make_check("covering_average_vs_boolean_bound",
                                           avg.value >= bbound - 1e-9, avg.value, bbound, 1e-9));
    }
    const double residual = verify_likelihood_ratio(proc, f, cap);
    results["likelihood_ratio_residual"] = residual;
    manifest.checks.push_back(
        make_check("likelihood_ratio_residual", residual <= 1e-9, residual, 1e-9, 1e-9));

    const ExactLaw law = exact_law(proc, cap);
    double max_identity_residual = 0.0;
    long long degenerate = 0;
    for (const auto& y : law.sequences) {
      const IdentityCheck check = verify_covering_identity(proc, f, cov, y, cap);
      if (check.degenerate) {
        ++degenerate;
      } else {
        max_identity_residual = std::max(max_identity_residual, check.residual);
      }
    }
    results["covering_identity_max_residual"] = max_identity_residual;
    results["covering_identity_degenerate"] = degenerate;
    manifest.checks.push_back(make_check("covering_identity_residual",
                                         max_identity_residual <= 1e-8, max_identity_residual,
                                         1e-8, 1e-8));
  } else {
    manifest.checks.push_back(
        make_info("degenerate_mu", mm.mu, "honest expectation is zero; bounds are vacuous"));
  }
  manifest.results = results;
}

void run_bias_sim(const ExperimentConfig& config, RunManifest& manifest) {
  const RandomProcess proc = load_process(resolve_input(config.process));
  if (config.objective.is_null()) throw ValidationError("bias-sim needs an objective");
  const ObjectiveFunction f = objective_from_json(config.objective, proc);
  const CoveringDistribution cov = covering_for(config, proc.block_count());
  const double eps = config.eps.value_or(0.1);
  const std::size_t cap = config.support_cap;
  const long long trials = config.trials;

  nlohmann::json results;
  results["covering"] = cov.describe();
  results["eps"] = eps;
  results["trials"] = trials;

  // Exact moments when the process is enumerable; Monte Carlo estimate
  // otherwise. The budget formula needs mu either way.
  bool exact_moments = false;
  double mu = 0.0;
  double moment_1p = 0.0;
  const double q = cov.target_p();
  try {
    const Moments mm = moments(proc, f, q, cap);
    mu = mm.mu;
    moment_1p = mm.moment_1p;
    exact_moments = true;
  } catch (const Error&) {
    RandomSource rng(derive_seed(config.master_seed, {"bias-sim", "mu-estimate"}));
    mu = partial_expectation_mc(proc, f, {}, trials, rng);
    manifest.seed_records.push_back("mu estimate: derive(seed, [\"bias-sim\",\"mu-estimate\"])");
  }
  results["mu"] = mu;
  results["mu_exact"] = exact_moments;
  if (mu <= 0.0) {
    manifest.checks.push_back(make_check("nonzero_mu", false, mu, 0.0, 0.0,
                                         "objective mean is zero; the budget diverges"));
    manifest.results = results;
    return;
  }

  const std::uint64_t budget = required_iterations(proc.block_count(), eps, mu);
  results["budget"] = budget;

  std::vector<double> values(static_cast<std::size_t>(trials), 0.0);
  std::uint64_t max_iterations = 0;
  const TamperStrategy strategy = TamperStrategy::iterated(budget);
  for (long long t = 0; t < trials; ++t) {
    RandomSource rng(derive_seed(config.master_seed, {"bias-sim-trial", t}));
    const TamperPlan plan = cov.sample_plan(rng);
    const TamperedExecution exec = run_tampered_execution(proc, f, strategy, plan, rng);
    values[static_cast<std::size_t>(t)] = exec.objective_value;
    for (const auto& b : exec.provenance) {
      max_iterations = std::max(max_iterations, b.iterations_used);
    }
  }
  manifest.seed_records.push_back("trial t: derive(seed, [\"bias-sim-trial\", t])");

  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(trials);
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double se =
      trials > 1 ? std::sqrt(ss / (static_cast<double>(trials) * (static_cast<double>(trials) - 1.0)))
                 : 0.0;
  results["mean"] = mean;
  results["se"] = se;
  results["max_iterations_used"] = max_iterations;

  manifest.checks.push_back(make_check("iterations_within_budget",
                                       max_iterations <= budget,
                                       static_cast<double>(max_iterations),
                                       static_cast<double>(budget), 0.0));
  if (exact_moments) {
    const double bound = tampering_bound(mu, moment_1p, q);
    results["bound"] = bound;
    manifest.checks.push_back(make_check("mc_mean_vs_bound",
                                         mean >= bound - eps - 4.0 * se, mean,
                                         bound - eps, 4.0 * se));
  } else {
    manifest.checks.push_back(
        make_info("mc_mean", mean, "no exact moments; bound comparison skipped"));
  }
  manifest.results = results;
}

void run_bounds_check(const ExperimentConfig& config, RunManifest& manifest) {
  const long long laws = config.trials;
  long long chain_failures = 0;
  long long generic_failures = 0;
  double min_chain_slack = std::numeric_limits<double>::infinity();
  double min_generic_slack = std::numeric_limits<double>::infinity();
  std::string detail;

  RandomSource rng(derive_seed(config.master_seed, {"bounds-check"}));
  manifest.seed_records.push_back("laws: derive(seed, [\"bounds-check\"])");
  for (long long i = 0; i < laws; ++i) {
    // Random finite law on [0,1] with a random exponent.
    ValueLaw law;
    const int size = 1 + static_cast<int>(rng.below(6));
    double total = 0.0;
    for (int v = 0; v < size; ++v) {
      law.values.push_back(rng.uniform01());
      const double w = rng.uniform01() + 1e-3;
      law.probs.push_back(w);
      total += w;
    }
    for (double& w : law.probs) w /= total;
    const double p = rng.uniform01();
    const double mu = law_mean(law);
    if (mu <= 1e-12) continue;
    const double nu = law_variance(law);
    const double gap = law_power_moment(law, 1.0 + p) * std::pow(mu, -p) - mu;
    const double strong = jensen_gap_bound(mu, nu, p);
    const double weak = jensen_gap_bound_weak(nu, p);
    min_chain_slack = std::min({min_chain_slack, gap - strong, strong - weak});
    if (gap < strong - 1e-9 || strong < weak - 1e-9) {
      ++chain_failures;
      if (detail.empty()) {
        detail = "chain failure at law " + std::to_string(i) + ": gap=" + format_double(gap) +
                 " strong=" + format_double(strong) + " weak=" + format_double(weak);
      }
    }
    const JensenGapResult jg = jensen_gap_generic(
        [p](double x) { return std::pow(x, 1.0 + p); },
        [p](double x) { return (1.0 + p) * std::pow(x, p); }, law,
        [p](double x) { return p * (1.0 + p) * std::pow(x, p - 1.0); });
    min_generic_slack = std::min(min_generic_slack, jg.gap - jg.lower_bound);
    if (jg.gap < jg.lower_bound - 1e-9) ++generic_failures;
  }

  manifest.checks.push_back(make_check("variance_gap_chain", chain_failures == 0,
                                       static_cast<double>(chain_failures), 0.0, 0.0, detail));
  manifest.checks.push_back(make_check("jensen_gap_generic", generic_failures == 0,
                                       static_cast<double>(generic_failures), 0.0, 0.0));
  manifest.results = {{"laws", laws},
                      {"chain_failures", chain_failures},
                      {"generic_failures", generic_failures},
                      {"min_chain_slack", min_chain_slack},
                      {"min_generic_slack", min_generic_slack}};
}

void run_covering_verify(const ExperimentConfig& config, RunManifest& manifest) {
  CoveringDistribution cov = [&] {
    if (!config.covering.is_null()) return load_covering(resolve_input(config.covering));
    throw ValidationError("covering-verify needs a covering definition");
  }();

  RandomSource rng(derive_seed(config.master_seed, {"covering-verify"}));
  manifest.seed_records.push_back("plans: derive(seed, [\"covering-verify\"])");
  const CoveringVerification report = cov.verify(config.trials, rng);
  manifest.checks.push_back(make_check("marginals_within_4se", !report.any_flagged,
                                       report.any_flagged ? 1.0 : 0.0, 0.0, 0.0));

  nlohmann::json results = report.to_json();
  results["covering"] = cov.describe();
  try {
    const auto support = cov.enumerate_support(config.support_cap);
    double total = 0.0;
    double max_marginal_err = 0.0;
    for (const auto& atom : support) total += atom.weight;
    for (int i = 0; i < cov.index_count(); ++i) {
      double weight_sum = 0.0;
      for (const auto& atom : support) {
        if (std::binary_search(atom.subset.begin(), atom.subset.end(), i)) {
          weight_sum += atom.weight;
        }
      }
      max_marginal_err = std::max(max_marginal_err, std::abs(weight_sum - cov.marginal(i)));
    }
    results["support_atoms"] = support.size();
    manifest.checks.push_back(
        make_check("support_weights_sum", std::abs(total - 1.0) <= 1e-12, total, 1.0, 1e-12));
    manifest.checks.push_back(make_check("support_marginal_consistency",
                                         max_marginal_err <= 1e-12, max_marginal_err, 0.0,
                                         1e-12));
  } catch (const SupportTooLarge&) {
    manifest.checks.push_back(
        make_info("support_enumeration", 0.0, "support exceeds cap; exact checks skipped"));
  }

  std::string csv = "index,analytic,empirical,z,flagged\n";
  for (const auto& row : report.rows) {
    csv += std::to_string(row.index) + "," + format_double(row.analytic) + "," +
           format_double(row.empirical) + "," + format_double(row.z) + "," +
           (row.flagged ? "1" : "0") + "\n";
  }
  results["csv"] = csv;
  manifest.results = results;
}

void run_mpp_attack(const ExperimentConfig& config, RunManifest& manifest) {
  ProtocolSpec spec = config.preset.empty() ? load_protocol(resolve_input(config.protocol))
                                            : make_preset(config.preset);
  if (config.alpha) spec.alpha = *config.alpha;
  if (config.m && *config.m != spec.parties) {
    throw ValidationError("m override disagrees with the protocol's party count");
  }

  std::string objective_name = "targeted";
  if (config.objective.is_string()) objective_name = config.objective.get<std::string>();
  AdversaryObjective objective = [&] {
    if (objective_name == "confidence") return AdversaryObjective::confidence(spec.alpha);
    if (objective_name == "risk") return AdversaryObjective::risk();
    if (objective_name == "targeted") {
      if (config.target) return AdversaryObjective::targeted({config.target->first,
                                                              config.target->second});
      if (!config.preset.empty()) {
        return AdversaryObjective::targeted(preset_default_target(config.preset));
      }
      throw ValidationError("targeted objective needs --target or a preset default");
    }
    throw ValidationError("unknown attack objective: " + objective_name);
  }();

  const int k = config.k.value_or(1);
  const double p = config.p.value_or(1.0);
  const double eps = config.eps.value_or(0.05);
  const PoisonAdversary adversary =
      assemble_adversary(spec, objective, k, p, eps, config.support_cap);

  AttackMode mode = AttackMode::Exact;
  if (config.mode == "montecarlo") {
    mode = AttackMode::MonteCarlo;
  } else if (config.mode == "auto") {
    try {
      exact_law(protocol_as_process(spec), config.support_cap);
      mode = AttackMode::Exact;
    } catch (const SupportTooLarge&) {
      mode = AttackMode::MonteCarlo;
    }
  }

  const AttackReport report = run_attack(spec, adversary, mode, config.trials,
                                         config.master_seed, config.support_cap,
                                         default_thread_count());
  if (mode == AttackMode::MonteCarlo) {
    manifest.seed_records.push_back("trial t: derive(seed, [\"mpp-trial\", t])");
  }

  manifest.checks.push_back(make_check("attack_meets_stated_bound", report.pass,
                                       report.attacked_value, report.bound_value,
                                       mode == AttackMode::Exact ? 1e-9 : 4.0 * report.se));
  if (mode == AttackMode::Exact) {
    manifest.checks.push_back(make_check(
        "attack_meets_covering_bound",
        report.objective_attacked_mean >= report.bound_unbounded - 1e-9,
        report.objective_attacked_mean, report.bound_unbounded, 1e-9));
    manifest.checks.push_back(make_check("message_distance_within_p",
                                         report.max_message_distance <= p + 1e-12,
                                         report.max_message_distance, p, 1e-12));
  }

  nlohmann::json results = report.to_json();
  results["csv"] = AttackReport::csv_header() + "\n" + report.csv_row() + "\n";
  manifest.results = results;
}

void run_suite(const ExperimentConfig& config, RunManifest& manifest) {
  SuiteOptions options;
  options.master_seed = config.master_seed;
  options.support_cap = config.support_cap;
  options.threads = default_thread_count();
  const std::vector<CriterionResult> criteria = run_acceptance_suite(options);

  nlohmann::json rows = nlohmann::json::array();
  for (const auto& c : criteria) {
    manifest.checks.push_back(make_check("criterion_" + std::to_string(c.number) + "_" + c.name,
                                         c.pass, static_cast<double>(c.checks_failed),
                                         0.0, 0.0, c.detail));
    rows.push_back({{"number", c.number},
                    {"name", c.name},
                    {"pass", c.pass},
                    {"checks_run", c.checks_run},
                    {"checks_failed", c.checks_failed},
                    {"detail", c.detail},
                    {"wall_ms", c.wall_ms}});
  }
  manifest.results = {{"criteria", rows}};
}

}  // namespace

RunManifest run(const ExperimentConfig& config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  RunManifest manifest;
  manifest.config = config.to_json();
  manifest.version = kVersion;
  manifest.seed_records.push_back("master seed: " + std::to_string(config.master_seed));

  if (config.command == "bias-exact") {
    run_bias_exact(config, manifest);
  } else if (config.command == "bias-sim") {
    run_bias_sim(config, manifest);
  } else if (config.command == "bounds-check") {
    run_bounds_check(config, manifest);
  } else if (config.command == "covering-verify") {
    run_covering_verify(config, manifest);
  } else if (config.command == "mpp-attack") {
    run_mpp_attack(config, manifest);
  } else if (config.command == "suite") {
    run_suite(config, manifest);
  }

  manifest.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return manifest;
}

}  // namespace tampersim
