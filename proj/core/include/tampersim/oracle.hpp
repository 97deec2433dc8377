#pragma once

#include <string>
#include <vector>

#include "tampersim/covering.hpp"
#include "tampersim/distribution.hpp"
#include "tampersim/process.hpp"

namespace tampersim {

/// Fully enumerated law: one (sequence, probability) atom per support element.
struct ExactLaw {
  std::vector<Sequence> sequences;
  std::vector<double> probs;

  std::size_t size() const { return sequences.size(); }
};

struct Moments {
  double mu = 0.0;         // E[f]
  double nu = 0.0;         // Var[f]
  double moment_1p = 0.0;  // E[f^(1+p)]
  double exponent = 0.0;   // the p used for moment_1p
};

struct AttackedExpectation {
  double value = 0.0;
  /// True when the walk touched a prefix with fhat = 0 at a tampered index,
  /// where the strategy falls back to the honest conditional.
  bool zero_prefix_fallback = false;
};

struct IdentityCheck {
  double residual = 0.0;
  bool degenerate = false;  // a zero branch makes the identity vacuous
  std::string note;
};

/// Brute-force enumeration of the full law. Throws SupportTooLarge past `cap`
/// support sequences, and UnsupportedFlavor without exact conditionals.
ExactLaw exact_law(const RandomProcess& proc, std::size_t cap = kDefaultSupportCap);

/// Exact mean, variance, and (1+p)-th moment of f under the honest law.
Moments moments(const RandomProcess& proc, const ObjectiveFunction& f, double p,
                std::size_t cap = kDefaultSupportCap);

/// Exact E[f] when the ideal strategy tampers exactly the blocks in plan_set,
/// by dynamic programming over the prefix tree.
AttackedExpectation exact_attacked_expectation(const RandomProcess& proc,
                                               const ObjectiveFunction& f,
                                               const std::vector<int>& plan_set,
                                               std::size_t cap = kDefaultSupportCap);

/// Full law of the tampered process for a fixed plan (ideal strategy).
ExactLaw exact_attacked_law(const RandomProcess& proc, const ObjectiveFunction& f,
                            const std::vector<int>& plan_set,
                            std::size_t cap = kDefaultSupportCap);

/// Covering-averaged attacked expectation: the weight-sum of the per-subset
/// exact values over the covering's enumerated support.
AttackedExpectation exact_covering_average(const RandomProcess& proc, const ObjectiveFunction& f,
                                           const CoveringDistribution& cov,
                                           std::size_t cap = kDefaultSupportCap);

/// Max over valid prefixes of |Pr[Y<=i = y]/Pr[X<=i = y] - fhat(y)/mu| under
/// full-set ideal tampering. The launchpad identity for everything else; the
/// contract is a residual below 1e-9.
double verify_likelihood_ratio(const RandomProcess& proc, const ObjectiveFunction& f,
                               std::size_t cap = kDefaultSupportCap);

/// Log-domain check of the covering product identity at a support sequence y:
/// sum_S Pr[S]*log(Pr[Y^S=y]/Pr[X=y]) against p*log(Pr[Y^[n]=y]/Pr[X=y]).
/// Zero branches are reported as degenerate rather than failed.
IdentityCheck verify_covering_identity(const RandomProcess& proc, const ObjectiveFunction& f,
                                       const CoveringDistribution& cov, const Sequence& y,
                                       std::size_t cap = kDefaultSupportCap);

/// Half L1 distance between two finite distributions over the same universe.
double statistical_distance(const Distribution& a, const Distribution& b);

}  // namespace tampersim
