#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "tampersim/covering.hpp"
#include "tampersim/distribution.hpp"
#include "tampersim/process.hpp"

namespace tampersim {

/// Which tampering algorithm a run uses. The ideal strategy samples each
/// tampered block from the exact objective-tilted conditional; the iterated
/// strategy retries honest continuations under an acceptance budget and falls
/// back to an honest draw when the budget is exhausted.
struct TamperStrategy {
  enum class Kind { IdealRejSam, IterRejSam };

  Kind kind = Kind::IdealRejSam;
  std::uint64_t budget = 0;  // IterRejSam only

  static TamperStrategy ideal() { return {Kind::IdealRejSam, 0}; }
  static TamperStrategy iterated(std::uint64_t budget) { return {Kind::IterRejSam, budget}; }

  std::string name() const;
};

struct BlockProvenance {
  bool tampered = false;
  std::uint64_t iterations_used = 0;
  bool fell_back = false;
};

/// One tampered run: the produced sequence, the plan it was run under, what
/// happened at each block, and the objective value of the result.
struct TamperedExecution {
  Sequence sequence;
  TamperPlan plan;
  std::vector<BlockProvenance> provenance;
  double objective_value = 0.0;

  nlohmann::json to_json() const;
};

/// Exact conditional law of the ideal rejection-sampling strategy at `pfx`:
/// each symbol's honest probability reweighted by the ratio of partial
/// expectations fhat(pfx+s) / fhat(pfx). Throws ZeroPartialExpectation when
/// fhat(pfx) = 0, where the tilt is undefined.
Distribution rejsam_exact_conditional(const RandomProcess& proc, const ObjectiveFunction& f,
                                      const Sequence& pfx);

struct RejSamKResult {
  Symbol symbol;
  std::uint64_t iterations_used;
  bool fell_back;
};

/// One budgeted rejection-sampling draw: up to `budget` rounds of sampling an
/// honest continuation and accepting its next block with probability equal to
/// the objective of the full continuation; an honest fresh draw on exhaustion.
/// Needs only continuation sampling and objective evaluation, so it works on
/// sampler-only processes.
RejSamKResult rejsam_k_sample(const RandomProcess& proc, const ObjectiveFunction& f,
                              const Sequence& pfx, std::uint64_t budget, RandomSource& rng);

/// Acceptance budget sufficient for the iterated strategy to come within eps
/// of the ideal attack value: ceil(16 * ln(2n/eps) / (eps^2 * mu^2)).
std::uint64_t required_iterations(int n, double eps, double mu);

/// Runs one full tampered execution: blocks outside the plan are drawn from
/// the honest conditional, blocks inside it from the strategy. Asserts the
/// result stays inside the honest support.
TamperedExecution run_tampered_execution(const RandomProcess& proc, const ObjectiveFunction& f,
                                         const TamperStrategy& strategy, const TamperPlan& plan,
                                         RandomSource& rng);

}  // namespace tampersim
