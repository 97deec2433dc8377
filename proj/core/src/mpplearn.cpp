#include "tampersim/mpplearn.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <numeric>

#include <nlohmann/json.hpp>

#include "tampersim/bounds.hpp"
#include "tampersim/errors.hpp"
#include "tampersim/oracle.hpp"
#include "tampersim/tamper.hpp"
#include "tampersim/text.hpp"

namespace tampersim {

void ExampleDist::validate() const {
  if (examples.empty() || examples.size() != probs.size()) {
    throw ValidationError("example distribution needs matching nonempty examples and probs");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (probs[i] < 0.0) throw OutOfRange("example distribution has a negative probability");
    total += probs[i];
    for (std::size_t j = i + 1; j < examples.size(); ++j) {
      if (examples[i] == examples[j]) throw ValidationError("duplicate example in distribution");
    }
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("example distribution sums to " + std::to_string(total));
  }
}

void ProtocolSpec::validate() const {
  if (parties < 1) throw ValidationError("protocol needs at least one party");
  if (owner_map.empty()) throw ValidationError("protocol needs at least one round");
  for (int owner : owner_map) {
    if (owner < 0 || owner >= parties) throw ValidationError("owner_map references a bad party");
  }
  if (static_cast<int>(party_dists.size()) != parties) {
    throw ValidationError("party_dists size must equal the party count");
  }
  for (const auto& d : party_dists) d.validate();
  test_dist.validate();
  if (hypotheses.empty()) throw ValidationError("protocol needs a nonempty hypothesis class");
  for (const auto& h : hypotheses) {
    if (!h.predict) throw ValidationError("hypothesis " + h.name + " has no predictor");
  }
  if (!aggregator) throw ValidationError("protocol needs an aggregator");
  if (!loss) throw ValidationError("protocol needs a loss function");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0,1]");
}

AdversaryObjective AdversaryObjective::confidence(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw OutOfRange("alpha must lie in [0,1]");
  AdversaryObjective o;
  o.kind = Kind::Confidence;
  o.alpha = alpha;
  return o;
}

AdversaryObjective AdversaryObjective::risk() {
  AdversaryObjective o;
  o.kind = Kind::Risk;
  return o;
}

AdversaryObjective AdversaryObjective::targeted(LabeledExample d) {
  AdversaryObjective o;
  o.kind = Kind::Targeted;
  o.target = d;
  return o;
}

std::string AdversaryObjective::name() const {
  switch (kind) {
    case Kind::Confidence:
      return "confidence(alpha=" + format_double(alpha) + ")";
    case Kind::Risk:
      return "risk";
    case Kind::Targeted:
      return "targeted(" + std::to_string(target.instance) + "," +
             std::to_string(target.label) + ")";
  }
  return "objective";
}

RandomProcess protocol_as_process(const ProtocolSpec& spec) {
  spec.validate();
  std::vector<Distribution> block_laws;
  block_laws.reserve(spec.owner_map.size());
  for (int owner : spec.owner_map) {
    const ExampleDist& d = spec.party_dists[static_cast<std::size_t>(owner)];
    std::vector<std::pair<Symbol, double>> items;
    for (std::size_t i = 0; i < d.examples.size(); ++i) {
      items.emplace_back(static_cast<Symbol>(i), d.probs[i]);
    }
    block_laws.push_back(Distribution::from_pairs(std::move(items), 1e-12));
  }
  return RandomProcess::product(std::move(block_laws));
}

Transcript decode_transcript(const ProtocolSpec& spec, const Sequence& seq) {
  if (seq.size() != spec.owner_map.size()) {
    throw InvalidPrefix("transcript length does not match the round count");
  }
  Transcript tr;
  tr.owners = spec.owner_map;
  tr.examples.reserve(seq.size());
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const ExampleDist& d = spec.party_dists[static_cast<std::size_t>(spec.owner_map[j])];
    const auto idx = static_cast<std::size_t>(seq[j]);
    if (idx >= d.examples.size()) throw InvalidPrefix("transcript symbol outside example list");
    tr.examples.push_back(d.examples[idx]);
  }
  return tr;
}

double hypothesis_risk(const ProtocolSpec& spec, int hypothesis_index) {
  if (hypothesis_index < 0 || hypothesis_index >= static_cast<int>(spec.hypotheses.size())) {
    throw IndexOutOfRange("hypothesis index out of range");
  }
  const Hypothesis& h = spec.hypotheses[static_cast<std::size_t>(hypothesis_index)];
  double acc = 0.0;
  for (std::size_t i = 0; i < spec.test_dist.examples.size(); ++i) {
    const LabeledExample& d = spec.test_dist.examples[i];
    const double l = spec.loss(h.predict(d.instance), d.label);
    if (!(l >= 0.0 && l <= 1.0)) throw OutOfRange("loss value outside [0,1]");
    acc += spec.test_dist.probs[i] * l;
  }
  return acc;
}

namespace {

std::shared_ptr<std::vector<double>> all_risks(const ProtocolSpec& spec) {
  auto risks = std::make_shared<std::vector<double>>();
  risks->reserve(spec.hypotheses.size());
  for (int h = 0; h < static_cast<int>(spec.hypotheses.size()); ++h) {
    risks->push_back(hypothesis_risk(spec, h));
  }
  return risks;
}

int aggregate_checked(const ProtocolSpec& spec, const Transcript& tr) {
  const int h = spec.aggregator(spec, tr);
  if (h < 0 || h >= static_cast<int>(spec.hypotheses.size())) {
    throw IndexOutOfRange("aggregator returned a bad hypothesis index");
  }
  return h;
}

}  // namespace

ObjectiveFunction adversary_objective_fn(const ProtocolSpec& spec,
                                         const AdversaryObjective& objective) {
  spec.validate();
  auto spec_copy = std::make_shared<const ProtocolSpec>(spec);
  switch (objective.kind) {
    case AdversaryObjective::Kind::Confidence: {
      auto risks = all_risks(spec);
      const double alpha = objective.alpha;
      return ObjectiveFunction(objective.name(), [spec_copy, risks, alpha](const Sequence& seq) {
        const int h = aggregate_checked(*spec_copy, decode_transcript(*spec_copy, seq));
        return (*risks)[static_cast<std::size_t>(h)] > alpha ? 1.0 : 0.0;
      });
    }
    case AdversaryObjective::Kind::Risk: {
      auto risks = all_risks(spec);
      return ObjectiveFunction(objective.name(), [spec_copy, risks](const Sequence& seq) {
        const int h = aggregate_checked(*spec_copy, decode_transcript(*spec_copy, seq));
        return (*risks)[static_cast<std::size_t>(h)];
      });
    }
    case AdversaryObjective::Kind::Targeted: {
      const LabeledExample d = objective.target;
      return ObjectiveFunction(objective.name(), [spec_copy, d](const Sequence& seq) {
        const int h = aggregate_checked(*spec_copy, decode_transcript(*spec_copy, seq));
        return spec_copy->loss(spec_copy->hypotheses[static_cast<std::size_t>(h)].predict(d.instance),
                               d.label);
      });
    }
  }
  throw Error("unreachable");
}

double honest_confidence(const ProtocolSpec& spec, std::size_t cap) {
  const RandomProcess proc = protocol_as_process(spec);
  const ObjectiveFunction f1 =
      adversary_objective_fn(spec, AdversaryObjective::confidence(spec.alpha));
  return 1.0 - moments(proc, f1, 0.0, cap).mu;
}

double honest_error(const ProtocolSpec& spec, std::size_t cap) {
  const RandomProcess proc = protocol_as_process(spec);
  return moments(proc, adversary_objective_fn(spec, AdversaryObjective::risk()), 0.0, cap).mu;
}

double honest_error_at(const ProtocolSpec& spec, const LabeledExample& target, std::size_t cap) {
  const RandomProcess proc = protocol_as_process(spec);
  return moments(proc, adversary_objective_fn(spec, AdversaryObjective::targeted(target)), 0.0,
                 cap)
      .mu;
}

double hypothesis_risk_variance(const ProtocolSpec& spec, std::size_t cap) {
  const RandomProcess proc = protocol_as_process(spec);
  return moments(proc, adversary_objective_fn(spec, AdversaryObjective::risk()), 0.0, cap).nu;
}

double honest_objective_mc(const ProtocolSpec& spec, const AdversaryObjective& objective,
                           long long trials, RandomSource& rng) {
  if (trials < 1) throw OutOfRange("honest_objective_mc: trials must be >= 1");
  const RandomProcess proc = protocol_as_process(spec);
  const ObjectiveFunction f = adversary_objective_fn(spec, objective);
  double acc = 0.0;
  for (long long t = 0; t < trials; ++t) acc += f(proc.sample_continuation({}, rng));
  return acc / static_cast<double>(trials);
}

PoisonAdversary assemble_adversary(const ProtocolSpec& spec, const AdversaryObjective& objective,
                                   int k, double p, double eps, std::size_t cap) {
  spec.validate();
  if (k < 1 || k > spec.parties) throw OutOfRange("assemble_adversary: k must lie in [1, m]");
  if (!(p >= 0.0 && p <= 1.0)) throw OutOfRange("assemble_adversary: p must lie in [0,1]");
  if (!(eps > 0.0 && eps <= 1.0)) throw OutOfRange("assemble_adversary: eps must lie in (0,1]");

  const RandomProcess proc = protocol_as_process(spec);
  const ObjectiveFunction f = adversary_objective_fn(spec, objective);
  const double mu = moments(proc, f, 0.0, cap).mu;
  if (mu <= 0.0) {
    throw ZeroMu("honest expectation of the objective is zero; nothing to amplify");
  }

  PoisonAdversary adv{objective, CoveringDistribution::party_bion(spec.owner_map, k, p), k, p,
                      eps, mu, required_iterations(spec.rounds(), eps, mu)};
  return adv;
}

namespace {

// Exact per-message distance budget check: at every reachable prefix, the
// corrupted-party message is the mixture (1-p)*honest + p*tilted, whose
// statistical distance from honest is p times the distance of the tilt.
double max_mixture_distance(const RandomProcess& proc, const ObjectiveFunction& f,
                            double inner_p) {
  const int n = proc.block_count();
  double max_dist = 0.0;
  Sequence buf;
  const std::function<void()> walk = [&] {
    if (static_cast<int>(buf.size()) == n) return;
    const Distribution honest = proc.conditional_next(buf);
    if (partial_expectation(proc, f, buf) > 0.0) {
      const Distribution tilted = rejsam_exact_conditional(proc, f, buf);
      max_dist = std::max(max_dist, inner_p * statistical_distance(tilted, honest));
    }
    for (Symbol s : honest.symbols()) {
      buf.push_back(s);
      walk();
      buf.pop_back();
    }
  };
  walk();
  return max_dist;
}

struct ObjectiveScale {
  double honest = 0.0;
  double attacked = 0.0;
  double bound = 0.0;
  bool pass = false;
};

// Converts objective-mean values to the reported scale (confidence flips the
// direction) and compares against the stated multi-party target.
ObjectiveScale to_report_scale(const AdversaryObjective& objective, double honest_mu,
                               double attacked_mu, double nu, double p, int k, int m, double eps,
                               double margin) {
  ObjectiveScale s;
  switch (objective.kind) {
    case AdversaryObjective::Kind::Confidence:
      s.honest = 1.0 - honest_mu;
      s.attacked = 1.0 - attacked_mu;
      s.bound = mpp_confidence_bound(s.honest, p, k, m, eps);
      s.pass = s.attacked <= s.bound + margin;
      return s;
    case AdversaryObjective::Kind::Risk:
      s.honest = honest_mu;
      s.attacked = attacked_mu;
      s.bound = mpp_error_bound(s.honest, nu, p, k, m, eps);
      s.pass = s.attacked >= s.bound - margin;
      return s;
    case AdversaryObjective::Kind::Targeted:
      s.honest = honest_mu;
      s.attacked = attacked_mu;
      s.bound = mpp_targeted_bound(s.honest, p, k, m, eps);
      s.pass = s.attacked >= s.bound - margin;
      return s;
  }
  throw Error("unreachable");
}

AttackReport run_attack_with_covering(const ProtocolSpec& spec, const PoisonAdversary& adversary,
                                      const CoveringDistribution& covering, AttackMode mode,
                                      long long trials, std::uint64_t master_seed,
                                      std::size_t cap, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  spec.validate();
  const RandomProcess proc = protocol_as_process(spec);
  const ObjectiveFunction f = adversary_objective_fn(spec, adversary.objective);
  // The exponent for the covering-attack bound is the covering's marginal for
  // uniform coverings; a fixed-party variant is measured but not bound-checked
  // against the uniform-marginal theorem.
  const bool uniform_marginal = !covering.has_fixed_parties();
  const double q = uniform_marginal
                       ? covering.target_p()
                       : covering.inner_p() * static_cast<double>(adversary.corrupted) /
                             static_cast<double>(spec.parties);

  AttackReport report;
  report.preset = spec.name;
  report.objective = adversary.objective.name();
  report.k = adversary.corrupted;
  report.m = spec.parties;
  report.p = adversary.inner_p;
  report.eps = mode == AttackMode::Exact ? 0.0 : adversary.eps;
  report.mode = mode == AttackMode::Exact ? "exact" : "montecarlo";
  report.seed = master_seed;
  report.k_budget = adversary.budget;

  const Moments hm = moments(proc, f, q, cap);
  report.objective_honest_mean = hm.mu;
  if (hm.mu > 0.0) {
    report.bound_unbounded = tampering_bound(hm.mu, hm.moment_1p, q);
  }
  const double nu_risk = hypothesis_risk_variance(spec, cap);

  if (mode == AttackMode::Exact) {
    const AttackedExpectation attacked = exact_covering_average(proc, f, covering, cap);
    report.objective_attacked_mean = attacked.value;
    report.zero_prefix_fallback = attacked.zero_prefix_fallback;
    report.max_message_distance = max_mixture_distance(proc, f, adversary.inner_p);
    if (report.max_message_distance > adversary.inner_p + 1e-12) {
      throw DistanceBudgetViolation("per-message mixture distance exceeds p");
    }
    const ObjectiveScale s = to_report_scale(adversary.objective, hm.mu, attacked.value, nu_risk,
                                             adversary.inner_p, adversary.corrupted,
                                             spec.parties, 0.0, 1e-9);
    report.honest_value = s.honest;
    report.attacked_value = s.attacked;
    report.bound_value = s.bound;
    report.pass = s.pass;
  } else {
    if (trials < 1) throw OutOfRange("run_attack: trials must be >= 1");
    report.trials = trials;
    std::vector<double> values(static_cast<std::size_t>(trials), 0.0);
    std::vector<std::uint64_t> iters(static_cast<std::size_t>(trials), 0);
    const TamperStrategy strategy = TamperStrategy::iterated(adversary.budget);
    parallel_for(trials, threads, [&](long long t) {
      RandomSource rng(derive_seed(master_seed, {"mpp-trial", t}));
      const TamperPlan plan = covering.sample_plan(rng);
      const TamperedExecution exec = run_tampered_execution(proc, f, strategy, plan, rng);
      values[static_cast<std::size_t>(t)] = exec.objective_value;
      std::uint64_t max_it = 0;
      for (const auto& b : exec.provenance) max_it = std::max(max_it, b.iterations_used);
      iters[static_cast<std::size_t>(t)] = max_it;
    });
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(trials);
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    report.se = trials > 1
                    ? std::sqrt(ss / (static_cast<double>(trials) * (static_cast<double>(trials) - 1.0)))
                    : 0.0;
    report.max_iterations_used = *std::max_element(iters.begin(), iters.end());
    report.objective_attacked_mean = mean;
    const ObjectiveScale s = to_report_scale(adversary.objective, hm.mu, mean, nu_risk,
                                             adversary.inner_p, adversary.corrupted,
                                             spec.parties, adversary.eps, 4.0 * report.se);
    report.honest_value = s.honest;
    report.attacked_value = s.attacked;
    report.bound_value = s.bound;
    report.pass = s.pass;
  }

  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return report;
}

}  // namespace

AttackReport run_attack(const ProtocolSpec& spec, const PoisonAdversary& adversary,
                        AttackMode mode, long long trials, std::uint64_t master_seed,
                        std::size_t cap, int threads) {
  return run_attack_with_covering(spec, adversary, adversary.covering, mode, trials, master_seed,
                                  cap, threads);
}

BestCorruption best_fixed_corruption(const ProtocolSpec& spec,
                                     const AdversaryObjective& objective, int k, double p,
                                     AttackMode mode, double eps, long long trials,
                                     std::uint64_t master_seed, std::size_t cap, int threads,
                                     std::size_t max_subsets) {
  const PoisonAdversary adversary = assemble_adversary(spec, objective, k, p, eps, cap);
  const int m = spec.parties;

  // All k-subsets of [m], lexicographic.
  std::vector<std::vector<int>> subsets;
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    subsets.push_back(idx);
    if (subsets.size() > max_subsets) {
      throw TooManySubsets("party subset enumeration exceeds cap");
    }
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int j = pos + 1; j < k; ++j) {
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
  }

  BestCorruption best;
  bool have_best = false;
  for (const auto& parties : subsets) {
    const CoveringDistribution fixed = adversary.covering.condition_on_parties(parties);
    const AttackReport report = run_attack_with_covering(spec, adversary, fixed, mode, trials,
                                                         master_seed, cap, threads);
    best.per_subset.emplace_back(parties, report.objective_attacked_mean);
    // Strict improvement keeps the lexicographically smallest subset on ties.
    if (!have_best || report.objective_attacked_mean >
                          best.report.objective_attacked_mean + 1e-15) {
      best.parties = parties;
      best.report = report;
      have_best = true;
    }
  }
  return best;
}

nlohmann::json AttackReport::to_json() const {
  return {{"preset", preset},
          {"objective", objective},
          {"k", k},
          {"m", m},
          {"p", p},
          {"eps", eps},
          {"mode", mode},
          {"honest", honest_value},
          {"attacked", attacked_value},
          {"objective_honest_mean", objective_honest_mean},
          {"objective_attacked_mean", objective_attacked_mean},
          {"bound", bound_value},
          {"bound_unbounded", bound_unbounded},
          {"se", se},
          {"trials", trials},
          {"seed", seed},
          {"k_budget", k_budget},
          {"wall_ms", wall_ms},
          {"pass", pass},
          {"zero_prefix_fallback", zero_prefix_fallback},
          {"max_message_distance", max_message_distance},
          {"max_iterations_used", max_iterations_used}};
}

std::string AttackReport::csv_header() {
  return "preset,objective,k,p,eps,mode,honest,attacked,bound,se,trials,seed";
}

std::string AttackReport::csv_row() const {
  std::string row;
  row += preset + ",";
  row += objective + ",";
  row += std::to_string(k) + ",";
  row += format_double(p) + ",";
  row += format_double(eps) + ",";
  row += mode + ",";
  row += format_double(honest_value) + ",";
  row += format_double(attacked_value) + ",";
  row += format_double(bound_value) + ",";
  row += format_double(se) + ",";
  row += std::to_string(trials) + ",";
  row += std::to_string(seed);
  return row;
}

nlohmann::json BestCorruption::to_json() const {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& [subset, value] : per_subset) {
    per.push_back({{"parties", subset}, {"attacked_mean", value}});
  }
  return {{"parties", parties}, {"report", report.to_json()}, {"per_subset", per}};
}

// ---------------------------------------------------------------------------
// Registries and presets
// ---------------------------------------------------------------------------

namespace {

Hypothesis make_hypothesis(const std::string& name) {
  if (name.rfind("const:", 0) == 0) {
    const int label = std::stoi(name.substr(6));
    return {name, [label](int) { return label; }};
  }
  if (name.rfind("threshold:", 0) == 0) {
    const int t = std::stoi(name.substr(10));
    return {name, [t](int a) { return a >= t ? 1 : 0; }};
  }
  throw ValidationError("unknown hypothesis: " + name);
}

int majority_label_aggregator(const ProtocolSpec& spec, const Transcript& tr) {
  // Most frequent label; ties go to the smallest label. Output is the
  // hypothesis named const:<label>.
  std::vector<std::pair<int, int>> counts;  // (label, count)
  for (const auto& ex : tr.examples) {
    bool found = false;
    for (auto& [label, count] : counts) {
      if (label == ex.label) {
        ++count;
        found = true;
      }
    }
    if (!found) counts.emplace_back(ex.label, 1);
  }
  std::sort(counts.begin(), counts.end());
  int best_label = counts.front().first;
  int best_count = counts.front().second;
  for (const auto& [label, count] : counts) {
    if (count > best_count) {
      best_label = label;
      best_count = count;
    }
  }
  const std::string want = "const:" + std::to_string(best_label);
  for (int h = 0; h < static_cast<int>(spec.hypotheses.size()); ++h) {
    if (spec.hypotheses[static_cast<std::size_t>(h)].name == want) return h;
  }
  throw ValidationError("majority aggregator: hypothesis " + want + " not in the class");
}

int erm_aggregator(const ProtocolSpec& spec, const Transcript& tr) {
  // Empirical risk minimizer over the declared class; ties go to the first
  // hypothesis in the list.
  int best = 0;
  double best_loss = std::numeric_limits<double>::infinity();
  for (int h = 0; h < static_cast<int>(spec.hypotheses.size()); ++h) {
    const auto& hyp = spec.hypotheses[static_cast<std::size_t>(h)];
    double acc = 0.0;
    for (const auto& ex : tr.examples) acc += spec.loss(hyp.predict(ex.instance), ex.label);
    if (acc < best_loss - 1e-15) {
      best = h;
      best_loss = acc;
    }
  }
  return best;
}

std::function<int(const ProtocolSpec&, const Transcript&)> make_aggregator(
    const std::string& name) {
  if (name == "majority_label") return majority_label_aggregator;
  if (name == "erm") return erm_aggregator;
  throw ValidationError("unknown aggregator: " + name);
}

double zero_one_loss(int predicted, int truth) { return predicted == truth ? 0.0 : 1.0; }

ExampleDist coin_dist(double p_one) {
  return {{{0, 0}, {0, 1}}, {1.0 - p_one, p_one}};
}

std::string normalize_preset_name(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return name;
}

}  // namespace

ProtocolSpec make_preset(const std::string& raw_name) {
  const std::string name = normalize_preset_name(raw_name);
  ProtocolSpec spec;
  spec.name = name;
  spec.loss = zero_one_loss;
  spec.boolean_loss = true;

  if (name == "majority" || name == "noisy-majority") {
    // Three parties, one biased labeled coin each; the aggregator outputs the
    // constant hypothesis matching the majority label. The noisy variant flips
    // each label with probability 0.1, which keeps both labels in support.
    const double p_one = name == "majority" ? 0.7 : 0.7 * 0.9 + 0.3 * 0.1;
    spec.parties = 3;
    spec.owner_map = {0, 1, 2};
    spec.party_dists.assign(3, coin_dist(p_one));
    spec.test_dist = {{{0, 1}}, {1.0}};
    spec.hypotheses = {make_hypothesis("const:0"), make_hypothesis("const:1")};
    spec.aggregator = majority_label_aggregator;
    spec.alpha = 0.5;
    return spec;
  }
  if (name == "threshold-erm") {
    // Ten instances labeled by a fixed threshold at 5; eleven threshold
    // hypotheses; ERM aggregation with lowest-threshold tie-break.
    spec.parties = 3;
    spec.owner_map = {0, 1, 2};
    ExampleDist uniform;
    for (int a = 0; a < 10; ++a) {
      uniform.examples.push_back({a, a >= 5 ? 1 : 0});
      uniform.probs.push_back(0.1);
    }
    spec.party_dists.assign(3, uniform);
    spec.test_dist = uniform;
    for (int t = 0; t <= 10; ++t) {
      spec.hypotheses.push_back(make_hypothesis("threshold:" + std::to_string(t)));
    }
    spec.aggregator = erm_aggregator;
    spec.alpha = 0.2;
    return spec;
  }
  throw ValidationError("unknown preset: " + raw_name);
}

LabeledExample preset_default_target(const std::string& raw_name) {
  const std::string name = normalize_preset_name(raw_name);
  if (name == "majority" || name == "noisy-majority") return {0, 1};
  if (name == "threshold-erm") return {4, 0};
  throw ValidationError("unknown preset: " + raw_name);
}

namespace {

ExampleDist example_dist_from_json(const nlohmann::json& j) {
  ExampleDist d;
  for (const auto& ex : j.at("examples")) {
    d.examples.push_back({ex.at(0).get<int>(), ex.at(1).get<int>()});
  }
  d.probs = j.at("probs").get<std::vector<double>>();
  d.validate();
  return d;
}

}  // namespace

ProtocolSpec load_protocol(const nlohmann::json& j) {
  try {
    ProtocolSpec spec;
    spec.name = j.value("name", std::string("protocol"));
    spec.parties = j.at("m").get<int>();
    spec.owner_map = j.at("owner_map").get<std::vector<int>>();
    for (const auto& d : j.at("party_dists")) spec.party_dists.push_back(example_dist_from_json(d));
    spec.test_dist = example_dist_from_json(j.at("test_dist"));
    for (const auto& h : j.at("hypotheses")) {
      spec.hypotheses.push_back(make_hypothesis(h.get<std::string>()));
    }
    spec.aggregator = make_aggregator(j.at("aggregator").get<std::string>());
    const auto& loss = j.at("loss");
    if (loss.is_string() && loss.get<std::string>() == "zero_one") {
      spec.loss = zero_one_loss;
      spec.boolean_loss = true;
    } else if (loss.is_object() && loss.at("kind").get<std::string>() == "table") {
      auto table = std::make_shared<std::map<std::pair<int, int>, double>>();
      for (const auto& row : loss.at("rows")) {
        (*table)[{row.at(0).get<int>(), row.at(1).get<int>()}] = row.at(2).get<double>();
      }
      spec.loss = [table](int predicted, int truth) {
        const auto it = table->find({predicted, truth});
        if (it == table->end()) throw OutOfRange("loss table has no entry for label pair");
        return it->second;
      };
      spec.boolean_loss = loss.value("boolean", false);
    } else {
      throw ValidationError("unknown loss definition");
    }
    spec.alpha = j.value("alpha", 0.5);
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("protocol definition: ") + e.what());
  }
}

}  // namespace tampersim
