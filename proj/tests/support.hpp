// Test-side oracles, kept deliberately independent of the DP implementations
// they check: everything here works from raw conditional products and direct
// sums over enumerated atoms.
#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "tampersim/covering.hpp"
#include "tampersim/distribution.hpp"
#include "tampersim/process.hpp"
#include "tampersim/random.hpp"

namespace testsupport {

using tampersim::Distribution;
using tampersim::ObjectiveFunction;
using tampersim::RandomProcess;
using tampersim::RandomSource;
using tampersim::Sequence;
using tampersim::Symbol;

// Honest law as explicit atoms, by multiplying conditionals along each path.
inline std::map<Sequence, double> brute_law(const RandomProcess& proc) {
  std::map<Sequence, double> atoms;
  const int n = proc.block_count();
  const std::function<void(Sequence, double)> walk = [&](Sequence pfx, double prob) {
    if (static_cast<int>(pfx.size()) == n) {
      atoms[pfx] += prob;
      return;
    }
    const Distribution d = proc.conditional_next(pfx);
    for (std::size_t i = 0; i < d.size(); ++i) {
      Sequence next = pfx;
      next.push_back(d.symbols()[i]);
      walk(std::move(next), prob * d.probs()[i]);
    }
  };
  walk({}, 1.0);
  return atoms;
}

// Partial expectation from the joint atoms: sum of P(y) f(y) over extensions
// of pfx, divided by the prefix mass.
inline double brute_partial_expectation(const RandomProcess& proc, const ObjectiveFunction& f,
                                        const Sequence& pfx) {
  double mass = 0.0;
  double weighted = 0.0;
  for (const auto& [seq, prob] : brute_law(proc)) {
    if (seq.size() < pfx.size()) continue;
    if (!std::equal(pfx.begin(), pfx.end(), seq.begin())) continue;
    mass += prob;
    weighted += prob * f(seq);
  }
  return weighted / mass;
}

// Exact conditional of the budget-k rejection sampler: a mixture of the
// tilted conditional (weight 1 - (1-fhat)^k) and the honest one.
inline Distribution truncated_conditional(const RandomProcess& proc, const ObjectiveFunction& f,
                                          const Sequence& pfx, std::uint64_t k) {
  const Distribution honest = proc.conditional_next(pfx);
  const double fhat = brute_partial_expectation(proc, f, pfx);
  std::vector<std::pair<Symbol, double>> items;
  if (fhat <= 0.0) {
    for (std::size_t i = 0; i < honest.size(); ++i) {
      items.emplace_back(honest.symbols()[i], honest.probs()[i]);
    }
  } else {
    const double miss = std::pow(1.0 - fhat, static_cast<double>(k));
    const double accept = 1.0 - miss;
    for (std::size_t i = 0; i < honest.size(); ++i) {
      Sequence child = pfx;
      child.push_back(honest.symbols()[i]);
      const double tilt = brute_partial_expectation(proc, f, child) / fhat;
      items.emplace_back(honest.symbols()[i],
                         honest.probs()[i] * (accept * tilt + miss));
    }
  }
  return Distribution::from_pairs(std::move(items), 1e-6);
}

// E[f] when blocks in `plan` are drawn from the budget-k sampler and the rest
// honestly, by recursion over conditional mixtures.
inline double truncated_attacked_expectation(const RandomProcess& proc,
                                             const ObjectiveFunction& f,
                                             const std::vector<int>& plan, std::uint64_t k) {
  const int n = proc.block_count();
  const std::function<double(const Sequence&)> rec = [&](const Sequence& pfx) -> double {
    if (static_cast<int>(pfx.size()) == n) return f(pfx);
    const bool tampered =
        std::find(plan.begin(), plan.end(), static_cast<int>(pfx.size())) != plan.end();
    const Distribution d =
        tampered ? truncated_conditional(proc, f, pfx, k) : proc.conditional_next(pfx);
    double acc = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      Sequence child = pfx;
      child.push_back(d.symbols()[i]);
      acc += d.probs()[i] * rec(child);
    }
    return acc;
  };
  return rec({});
}

// Small random explicit instance for property tests.
inline RandomProcess random_process(RandomSource& rng, int max_n = 4) {
  const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_n)));
  std::vector<std::vector<Symbol>> alphabet;
  for (int i = 0; i < n; ++i) {
    const int size = 1 + static_cast<int>(rng.below(3));
    std::vector<Symbol> pos;
    for (int s = 0; s < size; ++s) pos.push_back(s);
    alphabet.push_back(pos);
  }
  alphabet[0] = {0, 1};

  std::vector<std::pair<Sequence, Distribution>> nodes;
  const std::function<void(const Sequence&)> build = [&](const Sequence& pfx) {
    if (static_cast<int>(pfx.size()) == n) return;
    const auto& pos = alphabet[pfx.size()];
    std::vector<double> weights;
    for (std::size_t s = 0; s < pos.size(); ++s) weights.push_back(0.05 + rng.uniform01());
    if (pos.size() >= 2 && rng.uniform01() < 0.2) weights[rng.below(pos.size())] = 0.0;
    double total = 0.0;
    for (double w : weights) total += w;
    std::vector<std::pair<Symbol, double>> items;
    for (std::size_t s = 0; s < pos.size(); ++s) items.emplace_back(pos[s], weights[s] / total);
    nodes.emplace_back(pfx, Distribution::from_pairs(items, 1e-9));
    for (const auto& [sym, w] : items) {
      if (w <= 0.0) continue;
      Sequence child = pfx;
      child.push_back(sym);
      build(child);
    }
  };
  build({});
  return RandomProcess::explicit_tree(std::move(alphabet), std::move(nodes));
}

inline ObjectiveFunction random_objective(const RandomProcess& proc, RandomSource& rng,
                                          bool boolean) {
  std::vector<std::pair<Sequence, double>> values;
  for (const auto& [seq, prob] : brute_law(proc)) {
    (void)prob;
    const double v = boolean ? (rng.uniform01() < 0.5 ? 1.0 : 0.0) : rng.uniform01();
    values.emplace_back(seq, v);
  }
  return ObjectiveFunction::table("random", std::move(values));
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

inline MeanSe mean_se(const std::vector<double>& values) {
  MeanSe out;
  for (double v : values) out.mean += v;
  out.mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - out.mean) * (v - out.mean);
  if (values.size() > 1) {
    out.se = std::sqrt(ss / (static_cast<double>(values.size()) *
                             (static_cast<double>(values.size()) - 1.0)));
  }
  return out;
}

}  // namespace testsupport
