#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tampersim/covering.hpp"
#include "tampersim/process.hpp"

namespace tampersim {

struct LabeledExample {
  int instance = 0;
  int label = 0;

  bool operator==(const LabeledExample& other) const = default;
};

/// Finite distribution over labeled examples.
struct ExampleDist {
  std::vector<LabeledExample> examples;
  std::vector<double> probs;

  void validate() const;
};

struct Hypothesis {
  std::string name;
  std::function<int(int)> predict;  // instance -> label
};

/// The broadcast record of one protocol run: n labeled examples with owners.
struct Transcript {
  std::vector<LabeledExample> examples;
  std::vector<int> owners;
};

/// An m-party online learning protocol with a deterministic aggregator.
/// Round j is owned by party owner_map[j], which broadcasts one example from
/// its distribution; the aggregator maps the final transcript to a hypothesis.
struct ProtocolSpec {
  std::string name;
  int parties = 0;            // m
  std::vector<int> owner_map; // size n, values in [0, m)
  std::vector<ExampleDist> party_dists;
  ExampleDist test_dist;
  std::vector<Hypothesis> hypotheses;
  std::function<int(const ProtocolSpec&, const Transcript&)> aggregator;
  std::function<double(int, int)> loss;  // (predicted, true) -> [0,1]
  bool boolean_loss = true;
  double alpha = 0.5;

  int rounds() const { return static_cast<int>(owner_map.size()); }
  void validate() const;
};

/// What the adversary pushes on: the protocol's failure indicator at threshold
/// alpha, the real-valued risk of the output hypothesis, or the loss on one
/// fixed test example.
struct AdversaryObjective {
  enum class Kind { Confidence, Risk, Targeted };

  Kind kind = Kind::Risk;
  double alpha = 0.5;              // Confidence only
  LabeledExample target;           // Targeted only

  static AdversaryObjective confidence(double alpha);
  static AdversaryObjective risk();
  static AdversaryObjective targeted(LabeledExample d);

  std::string name() const;
};

/// The protocol's message sequence as a random process: independent blocks,
/// block j distributed as the owner's example distribution. Symbols index
/// into that party's example list.
RandomProcess protocol_as_process(const ProtocolSpec& spec);

/// Decodes a process sequence back into a transcript.
Transcript decode_transcript(const ProtocolSpec& spec, const Sequence& seq);

/// The adversary's objective as a function over process sequences.
ObjectiveFunction adversary_objective_fn(const ProtocolSpec& spec,
                                         const AdversaryObjective& objective);

/// Exact risk of one hypothesis over the finite test distribution.
double hypothesis_risk(const ProtocolSpec& spec, int hypothesis_index);

/// Honest protocol statistics, exact via enumeration up to `cap`.
double honest_confidence(const ProtocolSpec& spec, std::size_t cap = kDefaultSupportCap);
double honest_error(const ProtocolSpec& spec, std::size_t cap = kDefaultSupportCap);
double honest_error_at(const ProtocolSpec& spec, const LabeledExample& target,
                       std::size_t cap = kDefaultSupportCap);
/// Variance of the output hypothesis risk under the honest protocol.
double hypothesis_risk_variance(const ProtocolSpec& spec, std::size_t cap = kDefaultSupportCap);

/// Monte Carlo fallback for protocols too large to enumerate.
double honest_objective_mc(const ProtocolSpec& spec, const AdversaryObjective& objective,
                           long long trials, RandomSource& rng);

/// A fully assembled poisoning adversary: a party covering with marginal
/// p*k/m plus a budgeted rejection-sampling strategy sized for `eps`.
struct PoisonAdversary {
  AdversaryObjective objective;
  CoveringDistribution covering;
  int corrupted = 0;       // k
  double inner_p = 0.0;    // per-message tampering probability
  double eps = 0.0;
  double honest_mu = 0.0;  // honest expectation of the objective
  std::uint64_t budget = 0;
};

PoisonAdversary assemble_adversary(const ProtocolSpec& spec, const AdversaryObjective& objective,
                                   int k, double p, double eps,
                                   std::size_t cap = kDefaultSupportCap);

enum class AttackMode { Exact, MonteCarlo };

struct AttackReport {
  std::string preset;
  std::string objective;
  int k = 0;
  int m = 0;
  double p = 0.0;
  double eps = 0.0;
  std::string mode;
  double honest_value = 0.0;    // objective scale: Conf or Err
  double attacked_value = 0.0;  // objective scale
  double objective_honest_mean = 0.0;    // E[f] honest
  double objective_attacked_mean = 0.0;  // E[f] attacked
  double bound_value = 0.0;      // stated multi-party target, objective scale
  double bound_unbounded = 0.0;  // covering-attack value bound on E[f(Y)]
  double se = 0.0;               // standard error (0 when exact)
  long long trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t k_budget = 0;
  double wall_ms = 0.0;
  bool pass = false;
  bool zero_prefix_fallback = false;
  double max_message_distance = 0.0;  // exact mode: max per-message mixture distance
  std::uint64_t max_iterations_used = 0;

  nlohmann::json to_json() const;
  static std::string csv_header();
  std::string csv_row() const;
};

/// Measures the attacked objective. Exact mode enumerates the covering and the
/// prefix tree under the ideal strategy, checks the per-message statistical
/// distance budget, and reports exact values; Monte Carlo mode runs the
/// budgeted strategy over `trials` sampled plans with per-trial derived seeds.
AttackReport run_attack(const ProtocolSpec& spec, const PoisonAdversary& adversary,
                        AttackMode mode, long long trials, std::uint64_t master_seed,
                        std::size_t cap = kDefaultSupportCap, int threads = 1);

struct BestCorruption {
  std::vector<int> parties;
  AttackReport report;
  std::vector<std::pair<std::vector<int>, double>> per_subset;  // attacked mean per fixed C

  nlohmann::json to_json() const;
};

/// Evaluates the fixed-corruption attack for every k-subset of parties and
/// returns the best one (ties broken toward the lexicographically smallest
/// subset). Its value is never below the covering average.
BestCorruption best_fixed_corruption(const ProtocolSpec& spec,
                                     const AdversaryObjective& objective, int k, double p,
                                     AttackMode mode, double eps = 0.05, long long trials = 10000,
                                     std::uint64_t master_seed = 0,
                                     std::size_t cap = kDefaultSupportCap, int threads = 1,
                                     std::size_t max_subsets = 100000);

/// Built-in protocols: "majority", "threshold-erm", "noisy-majority".
ProtocolSpec make_preset(const std::string& name);
LabeledExample preset_default_target(const std::string& name);

ProtocolSpec load_protocol(const nlohmann::json& spec);

}  // namespace tampersim
