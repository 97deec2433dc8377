#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "support.hpp"
#include "tampersim/errors.hpp"
#include "tampersim/process.hpp"

using namespace tampersim;

namespace {

RandomProcess uniform_bits(int n) { return RandomProcess::bernoulli_iid(n, 0.5); }

RandomProcess two_block_correlated() {
  // Pr[x2=1 | x1=1] = 0.9, Pr[x2=1 | x1=0] = 0.5.
  return RandomProcess::explicit_tree(
      {{0, 1}, {0, 1}},
      {{{}, Distribution::from_pairs({{0, 0.5}, {1, 0.5}})},
       {{0}, Distribution::from_pairs({{0, 0.5}, {1, 0.5}})},
       {{1}, Distribution::from_pairs({{0, 0.1}, {1, 0.9}})}});
}

RandomProcess zero_branch_process() {
  // Pr[x1=0] = 0, so [0] is not a valid prefix.
  return RandomProcess::explicit_tree(
      {{0, 1}, {0, 1}},
      {{{}, Distribution::from_pairs({{0, 0.0}, {1, 1.0}})},
       {{1}, Distribution::from_pairs({{0, 0.5}, {1, 0.5}})}});
}

}  // namespace

TEST_CASE("valid prefixes") {
  const RandomProcess proc = uniform_bits(2);
  CHECK(proc.is_valid_prefix({}));
  CHECK(proc.is_valid_prefix({0, 1}));
  CHECK_FALSE(proc.is_valid_prefix({0, 1, 0}));
  CHECK_FALSE(proc.is_valid_prefix({2}));
  CHECK_FALSE(zero_branch_process().is_valid_prefix({0}));
  CHECK(zero_branch_process().is_valid_prefix({1}));
}

TEST_CASE("conditional_next reads the tree") {
  const Distribution d = uniform_bits(2).conditional_next({1});
  CHECK(d.prob_of(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.prob_of(1) == doctest::Approx(0.5).epsilon(1e-12));

  const Distribution b = RandomProcess::bernoulli_iid(3, 0.7).conditional_next({});
  CHECK(b.prob_of(0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(b.prob_of(1) == doctest::Approx(0.7).epsilon(1e-12));

  const Distribution c = two_block_correlated().conditional_next({1});
  CHECK(c.prob_of(1) == doctest::Approx(0.9).epsilon(1e-12));

  CHECK_THROWS_AS((void)uniform_bits(2).conditional_next({0, 1}), InvalidPrefix);
  CHECK_THROWS_AS((void)zero_branch_process().conditional_next({0}), InvalidPrefix);
}

TEST_CASE("sampler-only processes refuse exact queries") {
  const RandomProcess gen = RandomProcess::generative(
      {{0, 1}, {0, 1}},
      [](const Sequence&, RandomSource& rng) { return rng.bernoulli(0.5) ? 1 : 0; });
  CHECK(gen.flavor() == RandomProcess::Flavor::Generative);
  CHECK_FALSE(gen.has_exact_conditionals());
  CHECK_THROWS_AS((void)gen.conditional_next({}), UnsupportedFlavor);
  CHECK_THROWS_AS((void)partial_expectation(gen, ObjectiveFunction::constant(1.0), {}),
                  UnsupportedFlavor);
  // Validity is relative to the declared alphabet.
  CHECK(gen.is_valid_prefix({0, 1}));
  CHECK_FALSE(gen.is_valid_prefix({2}));
}

TEST_CASE("generative sampler must respect its alphabet") {
  const RandomProcess bad = RandomProcess::generative(
      {{0, 1}}, [](const Sequence&, RandomSource&) { return Symbol{7}; });
  RandomSource rng(1);
  CHECK_THROWS_AS((void)bad.sample_continuation({}, rng), SamplerContractViolation);
}

TEST_CASE("sample_continuation extends honestly") {
  const RandomProcess proc = uniform_bits(2);
  RandomSource rng(42);

  const Sequence full = {1, 0};
  CHECK(proc.sample_continuation(full, rng) == full);

  int counts[4] = {0, 0, 0, 0};
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) {
    const Sequence s = proc.sample_continuation({}, rng);
    ++counts[2 * s[0] + s[1]];
  }
  const double sigma = std::sqrt(0.25 * 0.75 / trials);
  for (int cell = 0; cell < 4; ++cell) {
    CHECK(std::abs(counts[cell] / double(trials) - 0.25) <= 3 * sigma);
  }

  const RandomProcess bern = RandomProcess::bernoulli_iid(3, 0.7);
  double acc = 0.0;
  for (int t = 0; t < trials; ++t) {
    const Sequence s = bern.sample_continuation({0}, rng);
    CHECK(s[0] == 0);
    acc += s[1] + s[2];
  }
  const double mean = acc / (2.0 * trials);
  CHECK(std::abs(mean - 0.7) <= 3 * std::sqrt(0.7 * 0.3 / (2.0 * trials)));

  CHECK_THROWS_AS((void)proc.sample_continuation({3}, rng), InvalidPrefix);
}

TEST_CASE("partial expectation on the uniform pair") {
  const RandomProcess proc = uniform_bits(2);
  const ObjectiveFunction f = make_objective("and", proc);
  CHECK(partial_expectation(proc, f, {}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(partial_expectation(proc, f, {1}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(partial_expectation(proc, f, {1, 1}) == 1.0);
  CHECK(partial_expectation(proc, f, {0, 1}) == 0.0);
}

TEST_CASE("partial expectation matches the brute-force law and the tower property") {
  RandomSource rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const RandomProcess proc = testsupport::random_process(rng);
    const ObjectiveFunction f = testsupport::random_objective(proc, rng, trial % 2 == 0);
    const int n = proc.block_count();

    std::vector<Sequence> prefixes = {{}};
    for (std::size_t at = 0; at < prefixes.size(); ++at) {
      const Sequence pfx = prefixes[at];
      const double fhat = partial_expectation(proc, f, pfx);
      CHECK(fhat >= 0.0);
      CHECK(fhat <= 1.0 + 1e-12);
      CHECK(fhat ==
            doctest::Approx(testsupport::brute_partial_expectation(proc, f, pfx)).epsilon(1e-9));
      if (static_cast<int>(pfx.size()) == n) continue;
      const Distribution d = proc.conditional_next(pfx);
      double tower = 0.0;
      for (std::size_t i = 0; i < d.size(); ++i) {
        Sequence child = pfx;
        child.push_back(d.symbols()[i]);
        tower += d.probs()[i] * partial_expectation(proc, f, child);
        if (prefixes.size() < 200) prefixes.push_back(child);
      }
      CHECK(std::abs(tower - fhat) <= 1e-9);
    }
  }
}

TEST_CASE("monte carlo partial expectation converges") {
  RandomSource rng(11);
  const RandomProcess proc = RandomProcess::bernoulli_iid(5, 0.6);
  const ObjectiveFunction f = make_objective("mean", proc);
  const double exact = partial_expectation(proc, f, {});
  const double estimate = partial_expectation_mc(proc, f, {}, 10000, rng);
  CHECK(std::abs(estimate - exact) <= 4.0 * std::sqrt(0.25 / 10000.0));
}

TEST_CASE("explicit tree construction is validated") {
  // Missing node for a reachable prefix.
  CHECK_THROWS_AS((void)RandomProcess::explicit_tree(
                      {{0, 1}, {0, 1}},
                      {{{}, Distribution::from_pairs({{0, 0.5}, {1, 0.5}})},
                       {{0}, Distribution::from_pairs({{0, 1.0}})}}),
                  ValidationError);
  // Conditional that does not sum to one.
  CHECK_THROWS_AS((void)Distribution::from_pairs({{0, 0.5}, {1, 0.4}}), ValidationError);
  // Symbol outside the declared alphabet.
  CHECK_THROWS_AS((void)RandomProcess::explicit_tree(
                      {{0, 1}},
                      {{{}, Distribution::from_pairs({{0, 0.5}, {2, 0.5}})}}),
                  ValidationError);
  CHECK_THROWS_AS((void)RandomProcess::bernoulli_iid(0, 0.5), OutOfRange);
  CHECK_THROWS_AS((void)RandomProcess::bernoulli_iid(2, 1.5), OutOfRange);
}

TEST_CASE("objective registry") {
  const RandomProcess proc = uniform_bits(3);
  CHECK(make_objective("and", proc)({1, 1, 1}) == 1.0);
  CHECK(make_objective("and", proc)({1, 0, 1}) == 0.0);
  CHECK(make_objective("or", proc)({0, 0, 0}) == 0.0);
  CHECK(make_objective("or", proc)({0, 1, 0}) == 1.0);
  CHECK(make_objective("parity", proc)({1, 1, 0}) == 0.0);
  CHECK(make_objective("parity", proc)({1, 1, 1}) == 1.0);
  CHECK(make_objective("mean", proc)({1, 0, 1}) == doctest::Approx(2.0 / 3.0));
  CHECK(make_objective("threshold:0.5", proc)({1, 0, 1}) == 1.0);
  CHECK(make_objective("threshold:0.7", proc)({1, 0, 1}) == 0.0);
  CHECK_THROWS_AS((void)make_objective("nope", proc), ValidationError);

  const ObjectiveFunction table =
      ObjectiveFunction::table("t", {{{0, 0, 0}, 0.25}, {{1, 1, 1}, 1.0}});
  CHECK(table({0, 0, 0}) == 0.25);
  CHECK_THROWS_AS((void)table({0, 1, 0}), OutOfRange);

  const ObjectiveFunction bad("bad", [](const Sequence&) { return 1.5; });
  CHECK_THROWS_AS((void)bad({0}), OutOfRange);
}

TEST_CASE("process definition files") {
  const nlohmann::json bern = {{"kind", "bernoulli_iid"}, {"n", 3}, {"p", 0.7}};
  const RandomProcess b = load_process(bern);
  CHECK(b.block_count() == 3);
  CHECK(b.conditional_next({}).prob_of(1) == doctest::Approx(0.7));

  const nlohmann::json markov = {
      {"kind", "markov"},
      {"n", 2},
      {"initial", {0.5, 0.5}},
      {"transition", {{0.9, 0.1}, {0.2, 0.8}}}};
  const RandomProcess m = load_process(markov);
  CHECK(m.conditional_next({1}).prob_of(1) == doctest::Approx(0.8));
  CHECK(m.conditional_next({0}).prob_of(0) == doctest::Approx(0.9));

  const nlohmann::json expl = {
      {"kind", "explicit"},
      {"alphabet", {{0, 1}, {0, 1}}},
      {"nodes",
       {{{"prefix", nlohmann::json::array()}, {"next", {{0, 0.5}, {1, 0.5}}}},
        {{"prefix", {0}}, {"next", {{0, 0.5}, {1, 0.5}}}},
        {{"prefix", {1}}, {"next", {{0, 0.1}, {1, 0.9}}}}}}};
  const RandomProcess e = load_process(expl);
  CHECK(e.conditional_next({1}).prob_of(1) == doctest::Approx(0.9));

  CHECK_THROWS_AS((void)load_process(nlohmann::json{{"kind", "mystery"}}), ValidationError);
  CHECK_THROWS_AS((void)load_process(nlohmann::json{{"kind", "bernoulli_iid"}, {"n", 2}}),
                  ValidationError);
}

TEST_CASE("generative process with exact conditionals behaves like its explicit twin") {
  const double p = 0.6;
  const Distribution law = Distribution::from_pairs({{0, 1.0 - p}, {1, p}});
  const RandomProcess gen = RandomProcess::generative(
      {{0, 1}, {0, 1}, {0, 1}},
      [p](const Sequence&, RandomSource& rng) { return rng.bernoulli(p) ? 1 : 0; },
      [law](const Sequence&) { return law; });
  const RandomProcess expl = RandomProcess::bernoulli_iid(3, p);
  const ObjectiveFunction f = make_objective("mean", gen);
  CHECK(partial_expectation(gen, f, {}) ==
        doctest::Approx(partial_expectation(expl, f, {})).epsilon(1e-12));
  RandomSource rng(5);
  const double estimate = partial_expectation_mc(gen, f, {}, 20000, rng);
  CHECK(std::abs(estimate - p) <= 4.0 * std::sqrt(0.25 / 20000.0));
}
