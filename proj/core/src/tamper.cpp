#include "tampersim/tamper.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "tampersim/errors.hpp"

namespace tampersim {

std::string TamperStrategy::name() const {
  switch (kind) {
    case Kind::IdealRejSam:
      return "ideal";
    case Kind::IterRejSam:
      return "iterated(k=" + std::to_string(budget) + ")";
  }
  return "strategy";
}

nlohmann::json TamperedExecution::to_json() const {
  nlohmann::json prov = nlohmann::json::array();
  for (const auto& b : provenance) {
    prov.push_back({{"tampered", b.tampered},
                    {"iterations_used", b.iterations_used},
                    {"fell_back", b.fell_back}});
  }
  return {{"sequence", sequence},
          {"tamper_set", plan.tamper_set},
          {"plan_source", plan.source},
          {"provenance", prov},
          {"objective_value", objective_value}};
}

Distribution rejsam_exact_conditional(const RandomProcess& proc, const ObjectiveFunction& f,
                                      const Sequence& pfx) {
  if (!proc.has_exact_conditionals()) {
    throw UnsupportedFlavor("ideal tampering needs exact conditionals");
  }
  const double denom = partial_expectation(proc, f, pfx);  // also validates pfx
  if (static_cast<int>(pfx.size()) >= proc.block_count()) {
    throw InvalidPrefix("rejsam_exact_conditional: prefix is already full length");
  }
  if (denom <= 0.0) {
    throw ZeroPartialExpectation("tilted conditional undefined: fhat(prefix) = 0");
  }
  const Distribution honest = proc.conditional_next(pfx);
  std::vector<std::pair<Symbol, double>> items;
  items.reserve(honest.size());
  double total = 0.0;
  Sequence child = pfx;
  for (std::size_t i = 0; i < honest.size(); ++i) {
    child.push_back(honest.symbols()[i]);
    const double w = honest.probs()[i] * partial_expectation(proc, f, child) / denom;
    child.pop_back();
    total += w;
    items.emplace_back(honest.symbols()[i], w);
  }
  // The weights sum to 1 by the tower property; renormalize away fp drift.
  for (auto& [sym, w] : items) w /= total;
  return Distribution::from_pairs(std::move(items), 1e-9);
}

RejSamKResult rejsam_k_sample(const RandomProcess& proc, const ObjectiveFunction& f,
                              const Sequence& pfx, std::uint64_t budget, RandomSource& rng) {
  if (budget < 1) throw OutOfRange("rejsam_k_sample: budget must be >= 1");
  if (static_cast<int>(pfx.size()) >= proc.block_count() || !proc.is_valid_prefix(pfx)) {
    throw InvalidPrefix("rejsam_k_sample: invalid or full-length prefix");
  }
  const std::size_t pos = pfx.size();
  for (std::uint64_t t = 1; t <= budget; ++t) {
    const Sequence continuation = proc.sample_continuation(pfx, rng);
    const double s = f(continuation);
    if (rng.uniform01() < s) {
      return {continuation[pos], t, false};
    }
  }
  // Budget exhausted: one honest fresh draw of this block only.
  return {proc.sample_next(pfx, rng), budget, true};
}

std::uint64_t required_iterations(int n, double eps, double mu) {
  if (n < 1) throw OutOfRange("required_iterations: n must be >= 1");
  if (!(eps > 0.0 && eps <= 1.0)) throw OutOfRange("required_iterations: eps must lie in (0,1]");
  if (!(mu > 0.0 && mu <= 1.0)) {
    throw OutOfRange("required_iterations: mu must lie in (0,1]; the budget diverges at mu=0");
  }
  const double k = 16.0 * std::log(2.0 * static_cast<double>(n) / eps) / (eps * eps * mu * mu);
  return static_cast<std::uint64_t>(std::ceil(k));
}

TamperedExecution run_tampered_execution(const RandomProcess& proc, const ObjectiveFunction& f,
                                         const TamperStrategy& strategy, const TamperPlan& plan,
                                         RandomSource& rng) {
  const int n = proc.block_count();
  for (int i : plan.tamper_set) {
    if (i < 0 || i >= n) throw IndexOutOfRange("tamper plan index out of [0,n)");
  }
  if (strategy.kind == TamperStrategy::Kind::IdealRejSam && !proc.has_exact_conditionals()) {
    throw UnsupportedFlavor("ideal strategy needs exact conditionals");
  }

  TamperedExecution exec;
  exec.plan = plan;
  exec.provenance.assign(static_cast<std::size_t>(n), BlockProvenance{});
  exec.sequence.reserve(static_cast<std::size_t>(n));

  for (int i = 0; i < n; ++i) {
    auto& prov = exec.provenance[static_cast<std::size_t>(i)];
    if (!plan.contains(i)) {
      exec.sequence.push_back(proc.sample_next(exec.sequence, rng));
      continue;
    }
    prov.tampered = true;
    if (strategy.kind == TamperStrategy::Kind::IdealRejSam) {
      // Undefined tilt at fhat = 0: fall through to the honest conditional.
      if (partial_expectation(proc, f, exec.sequence) > 0.0) {
        exec.sequence.push_back(rejsam_exact_conditional(proc, f, exec.sequence).sample(rng));
      } else {
        exec.sequence.push_back(proc.sample_next(exec.sequence, rng));
      }
    } else {
      const RejSamKResult r = rejsam_k_sample(proc, f, exec.sequence, strategy.budget, rng);
      exec.sequence.push_back(r.symbol);
      prov.iterations_used = r.iterations_used;
      prov.fell_back = r.fell_back;
    }
  }

  if (!proc.is_valid_prefix(exec.sequence)) {
    throw PlausibilityViolation("tampered sequence left the honest support");
  }
  exec.objective_value = f(exec.sequence);
  return exec;
}

}  // namespace tampersim
