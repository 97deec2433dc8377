#include "tampersim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <unordered_map>

#include "tampersim/errors.hpp"

namespace tampersim {

namespace {

// One pass over the prefix tree: leaf atoms plus fhat for every valid prefix.
// All the exact operations below share this walk.
struct Enumeration {
  ExactLaw law;
  std::vector<double> objective;  // aligned with law.sequences (empty if no f)
  std::unordered_map<Sequence, double, SequenceHash> fhat;

  Enumeration(const RandomProcess& proc, const ObjectiveFunction* f, std::size_t cap) {
    if (!proc.has_exact_conditionals()) {
      throw UnsupportedFlavor("exact inference needs exact conditionals");
    }
    const int n = proc.block_count();
    Sequence buf;
    const std::function<double(double)> walk = [&](double prob) -> double {
      if (static_cast<int>(buf.size()) == n) {
        if (law.size() >= cap) throw SupportTooLarge("process support exceeds cap");
        law.sequences.push_back(buf);
        law.probs.push_back(prob);
        double value = 0.0;
        if (f) {
          value = (*f)(buf);
          objective.push_back(value);
        }
        if (f) fhat.emplace(buf, value);
        return value;
      }
      const Distribution d = proc.conditional_next(buf);
      double expect = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        buf.push_back(d.symbols()[i]);
        expect += d.probs()[i] * walk(prob * d.probs()[i]);
        buf.pop_back();
      }
      if (f) fhat.emplace(buf, expect);
      return expect;
    };
    walk(1.0);
  }

  double fhat_at(const Sequence& pfx) const {
    const auto it = fhat.find(pfx);
    if (it == fhat.end()) throw InvalidPrefix("prefix outside the enumerated support");
    return it->second;
  }
};

bool contains_index(const std::vector<int>& sorted_set, int i) {
  return std::binary_search(sorted_set.begin(), sorted_set.end(), i);
}

std::vector<int> sorted_plan(std::vector<int> plan_set, int n) {
  std::sort(plan_set.begin(), plan_set.end());
  plan_set.erase(std::unique(plan_set.begin(), plan_set.end()), plan_set.end());
  for (int i : plan_set) {
    if (i < 0 || i >= n) throw IndexOutOfRange("plan index out of [0,n)");
  }
  return plan_set;
}

// E[f(Y^S)] over the enumerated tree, tilting tampered blocks by fhat ratios.
double attacked_value(const RandomProcess& proc, const Enumeration& en,
                      const std::vector<int>& plan, bool* zero_fallback) {
  const int n = proc.block_count();
  Sequence buf;
  const std::function<double()> rec = [&]() -> double {
    if (static_cast<int>(buf.size()) == n) return en.fhat_at(buf);
    const int i = static_cast<int>(buf.size());
    const Distribution d = proc.conditional_next(buf);
    const bool tampered = contains_index(plan, i);
    double denom = 1.0;
    if (tampered) {
      denom = en.fhat_at(buf);
      if (denom <= 0.0 && zero_fallback) *zero_fallback = true;
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
      buf.push_back(d.symbols()[j]);
      double w = d.probs()[j];
      if (tampered && denom > 0.0) w *= en.fhat_at(buf) / denom;
      if (w > 0.0) acc += w * rec();
      buf.pop_back();
    }
    return acc;
  };
  return rec();
}

// log Pr[Y^S = y] - log Pr[X = y] along the single path y.
// Returns false when a tampered step has zero probability (zero branch).
bool log_path_ratio(const Enumeration& en, const std::vector<int>& plan, const Sequence& y,
                    double* out) {
  double acc = 0.0;
  Sequence buf;
  for (int i = 0; i < static_cast<int>(y.size()); ++i) {
    if (contains_index(plan, i)) {
      const double denom = en.fhat_at(buf);
      buf.push_back(y[static_cast<std::size_t>(i)]);
      const double numer = en.fhat_at(buf);
      if (denom <= 0.0) {
        // Tilt undefined; the strategy falls back to honest, ratio 1.
        continue;
      }
      if (numer <= 0.0) return false;
      acc += std::log(numer) - std::log(denom);
    } else {
      buf.push_back(y[static_cast<std::size_t>(i)]);
    }
  }
  *out = acc;
  return true;
}

}  // namespace

ExactLaw exact_law(const RandomProcess& proc, std::size_t cap) {
  return Enumeration(proc, nullptr, cap).law;
}

Moments moments(const RandomProcess& proc, const ObjectiveFunction& f, double p,
                std::size_t cap) {
  if (p < 0.0) throw OutOfRange("moments: exponent must be nonnegative");
  const Enumeration en(proc, &f, cap);
  Moments m;
  m.exponent = p;
  double second = 0.0;
  for (std::size_t i = 0; i < en.law.size(); ++i) {
    const double pr = en.law.probs[i];
    const double v = en.objective[i];
    m.mu += pr * v;
    second += pr * v * v;
    m.moment_1p += pr * std::pow(v, 1.0 + p);
  }
  m.nu = std::max(0.0, second - m.mu * m.mu);
  return m;
}

AttackedExpectation exact_attacked_expectation(const RandomProcess& proc,
                                               const ObjectiveFunction& f,
                                               const std::vector<int>& plan_set,
                                               std::size_t cap) {
  const Enumeration en(proc, &f, cap);
  const std::vector<int> plan = sorted_plan(plan_set, proc.block_count());
  AttackedExpectation out;
  out.value = attacked_value(proc, en, plan, &out.zero_prefix_fallback);
  return out;
}

ExactLaw exact_attacked_law(const RandomProcess& proc, const ObjectiveFunction& f,
                            const std::vector<int>& plan_set, std::size_t cap) {
  const Enumeration en(proc, &f, cap);
  const std::vector<int> plan = sorted_plan(plan_set, proc.block_count());
  const int n = proc.block_count();
  ExactLaw law;
  Sequence buf;
  const std::function<void(double)> rec = [&](double prob) {
    if (static_cast<int>(buf.size()) == n) {
      law.sequences.push_back(buf);
      law.probs.push_back(prob);
      return;
    }
    const int i = static_cast<int>(buf.size());
    const Distribution d = proc.conditional_next(buf);
    const bool tampered = contains_index(plan, i);
    const double denom = tampered ? en.fhat_at(buf) : 1.0;
    for (std::size_t j = 0; j < d.size(); ++j) {
      buf.push_back(d.symbols()[j]);
      double w = d.probs()[j];
      if (tampered && denom > 0.0) w *= en.fhat_at(buf) / denom;
      if (w > 0.0) rec(prob * w);
      buf.pop_back();
    }
  };
  rec(1.0);
  return law;
}

AttackedExpectation exact_covering_average(const RandomProcess& proc, const ObjectiveFunction& f,
                                           const CoveringDistribution& cov, std::size_t cap) {
  if (cov.index_count() != proc.block_count()) {
    throw OutOfRange("covering and process disagree on n");
  }
  const Enumeration en(proc, &f, cap);
  AttackedExpectation out;
  for (const SupportAtom& atom : cov.enumerate_support(cap)) {
    bool zero = false;
    out.value += atom.weight * attacked_value(proc, en, atom.subset, &zero);
    out.zero_prefix_fallback = out.zero_prefix_fallback || zero;
  }
  return out;
}

double verify_likelihood_ratio(const RandomProcess& proc, const ObjectiveFunction& f,
                               std::size_t cap) {
  const Enumeration en(proc, &f, cap);
  const double mu = en.fhat_at({});
  if (mu <= 0.0) throw ZeroMu("likelihood ratio check needs mu > 0");

  const int n = proc.block_count();
  double max_residual = 0.0;
  Sequence buf;
  // honest_prob and tampered_prob track Pr[X<=i = buf] and Pr[Y<=i = buf]
  // under full-set ideal tampering.
  const std::function<void(double, double)> rec = [&](double honest_prob, double tampered_prob) {
    max_residual = std::max(max_residual,
                            std::abs(tampered_prob / honest_prob - en.fhat_at(buf) / mu));
    if (static_cast<int>(buf.size()) == n) return;
    const Distribution d = proc.conditional_next(buf);
    const double denom = en.fhat_at(buf);
    for (std::size_t j = 0; j < d.size(); ++j) {
      buf.push_back(d.symbols()[j]);
      const double tilt = denom > 0.0 ? en.fhat_at(buf) / denom : 1.0;
      rec(honest_prob * d.probs()[j], tampered_prob * d.probs()[j] * tilt);
      buf.pop_back();
    }
  };
  rec(1.0, 1.0);
  return max_residual;
}

IdentityCheck verify_covering_identity(const RandomProcess& proc, const ObjectiveFunction& f,
                                       const CoveringDistribution& cov, const Sequence& y,
                                       std::size_t cap) {
  if (cov.index_count() != proc.block_count()) {
    throw OutOfRange("covering and process disagree on n");
  }
  if (static_cast<int>(y.size()) != proc.block_count() || !proc.is_valid_prefix(y)) {
    throw InvalidPrefix("identity check needs a full support sequence");
  }
  const double p = cov.target_p();
  const Enumeration en(proc, &f, cap);

  IdentityCheck check;
  const double fy = en.fhat_at(y);
  const double mu = en.fhat_at({});
  if (fy <= 0.0 || mu <= 0.0) {
    check.degenerate = true;
    check.note = "zero branch: f(y) or mu vanishes, identity is vacuous";
    return check;
  }

  std::vector<int> full(static_cast<std::size_t>(proc.block_count()));
  for (std::size_t i = 0; i < full.size(); ++i) full[i] = static_cast<int>(i);
  double rhs_base = 0.0;
  if (!log_path_ratio(en, full, y, &rhs_base)) {
    check.degenerate = true;
    check.note = "zero branch on the full-tampering path";
    return check;
  }

  double lhs = 0.0;
  for (const SupportAtom& atom : cov.enumerate_support(cap)) {
    double log_ratio = 0.0;
    if (!log_path_ratio(en, atom.subset, y, &log_ratio)) {
      check.degenerate = true;
      check.note = "zero branch under subset tampering";
      return check;
    }
    lhs += atom.weight * log_ratio;
  }
  check.residual = std::abs(lhs - p * rhs_base);
  return check;
}

double statistical_distance(const Distribution& a, const Distribution& b) {
  double acc = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j >= b.size() || (i < a.size() && a.symbols()[i] < b.symbols()[j])) {
      acc += a.probs()[i];
      ++i;
    } else if (i >= a.size() || b.symbols()[j] < a.symbols()[i]) {
      acc += b.probs()[j];
      ++j;
    } else {
      acc += std::abs(a.probs()[i] - b.probs()[j]);
      ++i;
      ++j;
    }
  }
  return 0.5 * acc;
}

}  // namespace tampersim
