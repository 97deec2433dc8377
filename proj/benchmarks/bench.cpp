#include <benchmark/benchmark.h>

#include "tampersim/covering.hpp"
#include "tampersim/mpplearn.hpp"
#include "tampersim/oracle.hpp"
#include "tampersim/process.hpp"
#include "tampersim/tamper.hpp"

namespace {

using namespace tampersim;

RandomProcess bench_process() { return RandomProcess::bernoulli_iid(10, 0.7); }

ObjectiveFunction bench_objective(const RandomProcess& proc) {
  return make_objective("mean", proc);
}

void BM_PartialExpectation(benchmark::State& state) {
  const RandomProcess proc = bench_process();
  const ObjectiveFunction f = bench_objective(proc);
  for (auto _ : state) {
    benchmark::DoNotOptimize(partial_expectation(proc, f, {}));
  }
}
BENCHMARK(BM_PartialExpectation);

void BM_ExactCoveringAverage(benchmark::State& state) {
  const RandomProcess proc = RandomProcess::bernoulli_iid(static_cast<int>(state.range(0)), 0.7);
  const ObjectiveFunction f = bench_objective(proc);
  const CoveringDistribution cov =
      CoveringDistribution::iid(proc.block_count(), 0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_covering_average(proc, f, cov));
  }
}
BENCHMARK(BM_ExactCoveringAverage)->Arg(4)->Arg(6)->Arg(8);

void BM_RejSamKSample(benchmark::State& state) {
  const RandomProcess proc = bench_process();
  const ObjectiveFunction f = bench_objective(proc);
  RandomSource rng(17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rejsam_k_sample(proc, f, {}, 64, rng));
  }
}
BENCHMARK(BM_RejSamKSample);

void BM_SamplePlanPartyBion(benchmark::State& state) {
  std::vector<int> owners;
  for (int i = 0; i < 32; ++i) owners.push_back(i % 8);
  const CoveringDistribution cov = CoveringDistribution::party_bion(owners, 3, 0.5);
  RandomSource rng(17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cov.sample_plan(rng));
  }
}
BENCHMARK(BM_SamplePlanPartyBion);

void BM_MppExactAttack(benchmark::State& state) {
  const ProtocolSpec spec = make_preset("threshold-erm");
  const PoisonAdversary adversary = assemble_adversary(
      spec, AdversaryObjective::targeted(preset_default_target("threshold-erm")), 1, 1.0, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_attack(spec, adversary, AttackMode::Exact, 1, 0));
  }
}
BENCHMARK(BM_MppExactAttack);

}  // namespace

BENCHMARK_MAIN();
