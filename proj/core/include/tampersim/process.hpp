#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tampersim/distribution.hpp"
#include "tampersim/random.hpp"

namespace tampersim {

/// Bounded objective over full sequences: a total map Supp(X) -> [0, 1].
class ObjectiveFunction {
 public:
  using Fn = std::function<double(const Sequence&)>;

  ObjectiveFunction(std::string name, Fn fn);

  /// Evaluates on a full sequence; rejects values outside [0, 1].
  double operator()(const Sequence& full) const;

  const std::string& name() const { return name_; }

  static ObjectiveFunction constant(double c);
  static ObjectiveFunction table(std::string name,
                                 std::vector<std::pair<Sequence, double>> values);

 private:
  std::string name_;
  Fn fn_;
};

/// A finite discrete random process (x_1, ..., x_n), exposed block by block
/// through conditional next-block distributions.
///
/// Explicit processes carry exact conditionals for every valid prefix, either
/// as a stored probability tree or as a closed-form rule (iid, Markov,
/// per-position product). Generative processes carry an online sampler and,
/// optionally, an exact conditional procedure. Instances are immutable after
/// construction and cheap to copy.
class RandomProcess {
 public:
  enum class Flavor { Explicit, Generative };

  using SamplerFn = std::function<Symbol(const Sequence& prefix, RandomSource& rng)>;
  using ConditionalFn = std::function<Distribution(const Sequence& prefix)>;

  /// Probability tree keyed by prefix: one node (next-block distribution) per
  /// valid prefix of length < n. Validates normalization, alphabet membership,
  /// and that every positive branch leads to another node or a full sequence.
  static RandomProcess explicit_tree(std::vector<std::vector<Symbol>> alphabet,
                                     std::vector<std::pair<Sequence, Distribution>> nodes);

  /// n iid Bernoulli(p) bits over alphabet {0, 1}.
  static RandomProcess bernoulli_iid(int n, double p);

  /// Homogeneous Markov chain over states {0, .., S-1}.
  static RandomProcess markov(int n, std::vector<double> initial,
                              std::vector<std::vector<double>> transition);

  /// Independent blocks with per-position laws (not necessarily identical).
  static RandomProcess product(std::vector<Distribution> block_laws);

  /// Sampler-backed process. When `exact` is provided the process supports
  /// exact queries just like an Explicit one.
  static RandomProcess generative(std::vector<std::vector<Symbol>> alphabet, SamplerFn sampler,
                                  ConditionalFn exact = nullptr);

  int block_count() const;
  Flavor flavor() const;
  bool has_exact_conditionals() const;
  const std::vector<std::vector<Symbol>>& alphabet() const;

  /// True iff some continuation of `pfx` reaches a full support sequence. For
  /// sampler-only processes truth is relative to the declared alphabet.
  bool is_valid_prefix(const Sequence& pfx) const;

  /// Exact law of the next block given a valid prefix of length < n.
  Distribution conditional_next(const Sequence& pfx) const;

  /// One honest draw of the next block.
  Symbol sample_next(const Sequence& pfx, RandomSource& rng) const;

  /// Honest completion of `pfx` to a full sequence.
  Sequence sample_continuation(const Sequence& pfx, RandomSource& rng) const;

 private:
  struct Impl;
  explicit RandomProcess(std::shared_ptr<const Impl> impl);
  std::shared_ptr<const Impl> impl_;
};

/// Exact partial expectation fhat(pfx) = E[f(X) | pfx], by recursion over the
/// probability tree. At full length this is f(pfx) itself.
double partial_expectation(const RandomProcess& proc, const ObjectiveFunction& f,
                           const Sequence& pfx);

/// Monte Carlo estimate of the partial expectation from honest continuations.
double partial_expectation_mc(const RandomProcess& proc, const ObjectiveFunction& f,
                              const Sequence& pfx, long long trials, RandomSource& rng);

/// Builds a process from its JSON definition:
///   {"kind": "explicit"|"bernoulli_iid"|"markov", "n": int, ...}
RandomProcess load_process(const nlohmann::json& spec);

/// Objective registry for definition files: "and", "or", "parity", "mean",
/// "threshold:<t>", or a {"kind": "table"|"constant", ...} object.
ObjectiveFunction make_objective(const std::string& name, const RandomProcess& proc);
ObjectiveFunction objective_from_json(const nlohmann::json& spec, const RandomProcess& proc);

}  // namespace tampersim
