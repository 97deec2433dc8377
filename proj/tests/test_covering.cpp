#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "support.hpp"
#include "tampersim/covering.hpp"
#include "tampersim/errors.hpp"

using namespace tampersim;

namespace {

double support_weight(const std::vector<SupportAtom>& atoms, const std::vector<int>& subset) {
  for (const auto& atom : atoms) {
    if (atom.subset == subset) return atom.weight;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("iid covering basics") {
  RandomSource rng(3);
  const CoveringDistribution empty = CoveringDistribution::iid(5, 0.0);
  const CoveringDistribution full = CoveringDistribution::iid(5, 1.0);
  for (int t = 0; t < 50; ++t) {
    CHECK(empty.sample_plan(rng).tamper_set.empty());
    CHECK(full.sample_plan(rng).tamper_set.size() == 5);
  }
  CHECK(CoveringDistribution::iid(7, 0.3).marginal(2) == 0.3);
  CHECK(empty.target_p() == 0.0);

  const auto atoms = CoveringDistribution::iid(3, 0.5).enumerate_support();
  CHECK(atoms.size() == 8);
  CHECK(support_weight(atoms, {0, 2}) == doctest::Approx(0.125).epsilon(1e-12));

  const auto single = CoveringDistribution::iid(1, 0.25).enumerate_support();
  CHECK(single.size() == 2);
  CHECK(support_weight(single, {}) == doctest::Approx(0.75));
  CHECK(support_weight(single, {0}) == doctest::Approx(0.25));

  const auto all = CoveringDistribution::iid(2, 1.0).enumerate_support();
  CHECK(all.size() == 1);
  CHECK(support_weight(all, {0, 1}) == doctest::Approx(1.0));

  CHECK_THROWS_AS((void)CoveringDistribution::iid(3, -0.1), OutOfRange);
  CHECK_THROWS_AS((void)CoveringDistribution::iid(0, 0.5), OutOfRange);
}

TEST_CASE("iid sampling matches the product law") {
  RandomSource rng(11);
  const CoveringDistribution cov = CoveringDistribution::iid(2, 0.5);
  std::map<std::vector<int>, int> counts;
  const int trials = 100000;
  for (int t = 0; t < trials; ++t) ++counts[cov.sample_plan(rng).tamper_set];
  const double sigma = std::sqrt(0.25 * 0.75 / trials);
  for (const auto& subset :
       std::vector<std::vector<int>>{{}, {0}, {1}, {0, 1}}) {
    CHECK(std::abs(counts[subset] / double(trials) - 0.25) <= 3 * sigma);
  }
}

TEST_CASE("party covering marginals and support") {
  // Three parties, one round each.
  const CoveringDistribution one_each = CoveringDistribution::party_bion({0, 1, 2}, 1, 0.5);
  for (int i = 0; i < 3; ++i) {
    CHECK(one_each.marginal(i) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  }
  CHECK(one_each.target_p() == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(CoveringDistribution::party_bion({0, 1, 2, 3}, 2, 0.6).marginal(1) ==
        doctest::Approx(0.3).epsilon(1e-12));

  // Full corruption at p=1 always tampers everything.
  RandomSource rng(4);
  const CoveringDistribution all = CoveringDistribution::party_bion({0, 1, 2}, 3, 1.0);
  for (int t = 0; t < 20; ++t) {
    CHECK(all.sample_plan(rng).tamper_set == std::vector<int>{0, 1, 2});
  }

  // Two parties owning {0,1} and {2,3}: k=1, p=1 gives each block pair w.p. 1/2.
  const CoveringDistribution pairs = CoveringDistribution::party_bion({0, 0, 1, 1}, 1, 1.0);
  const auto atoms = pairs.enumerate_support();
  CHECK(atoms.size() == 2);
  CHECK(support_weight(atoms, {0, 1}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(support_weight(atoms, {2, 3}) == doctest::Approx(0.5).epsilon(1e-12));
  for (int t = 0; t < 50; ++t) {
    const auto plan = pairs.sample_plan(rng).tamper_set;
    CHECK((plan == std::vector<int>{0, 1} || plan == std::vector<int>{2, 3}));
  }

  // k=1 never picks rounds of two different parties.
  const CoveringDistribution singles = CoveringDistribution::party_bion({0, 1}, 1, 1.0);
  for (int t = 0; t < 50; ++t) {
    CHECK(singles.sample_plan(rng).tamper_set.size() == 1);
  }

  CHECK_THROWS_AS((void)CoveringDistribution::party_bion({}, 1, 0.5), EmptySchedule);
  CHECK_THROWS_AS((void)CoveringDistribution::party_bion({0, 1}, 3, 0.5), OutOfRange);
  CHECK_THROWS_AS((void)one_each.marginal(3), IndexOutOfRange);
}

TEST_CASE("fixed-party conditioning") {
  const CoveringDistribution cov = CoveringDistribution::party_bion({0, 1, 1, 2}, 2, 0.25);
  const CoveringDistribution fixed = cov.condition_on_parties({1});
  CHECK(fixed.marginal(0) == 0.0);
  CHECK(fixed.marginal(1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(fixed.marginal(2) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(fixed.marginal(3) == 0.0);
  CHECK_THROWS_AS((void)fixed.target_p(), UnsupportedFlavor);

  // The untampered mass of the corrupted rounds is (1-p)^{|R_C|}.
  const auto atoms = fixed.enumerate_support();
  CHECK(support_weight(atoms, {}) == doctest::Approx(0.75 * 0.75).epsilon(1e-12));

  CHECK_THROWS_AS((void)fixed.condition_on_parties({5}), IndexOutOfRange);
  CHECK_THROWS_AS((void)CoveringDistribution::iid(3, 0.5).condition_on_parties({0}),
                  UnsupportedFlavor);
}

TEST_CASE("explicit weighted covering") {
  const CoveringDistribution cov = CoveringDistribution::explicit_weighted(
      2, {{{}, 0.5}, {{0}, 0.25}, {{0}, 0.25}});
  CHECK(cov.marginal(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cov.marginal(1) == 0.0);
  const auto atoms = cov.enumerate_support();
  CHECK(atoms.size() == 2);  // duplicates merged
  CHECK(support_weight(atoms, {0}) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(
      (void)CoveringDistribution::explicit_weighted(2, {{{}, 0.5}, {{0}, 0.4}}),
      ValidationError);
  CHECK_THROWS_AS(
      (void)CoveringDistribution::explicit_weighted(2, {{{7}, 1.0}}),
      IndexOutOfRange);
}

TEST_CASE("support enumeration is consistent with the analytic marginals") {
  RandomSource rng(9);
  const std::vector<CoveringDistribution> coverings = {
      CoveringDistribution::iid(4, 0.3),
      CoveringDistribution::party_bion({0, 1, 0, 1, 2}, 2, 0.7),
      CoveringDistribution::party_bion({0, 0, 1}, 1, 0.4).condition_on_parties({0}),
      CoveringDistribution::explicit_weighted(3, {{{0, 1}, 0.5}, {{2}, 0.3}, {{}, 0.2}}),
  };
  for (const auto& cov : coverings) {
    const auto atoms = cov.enumerate_support();
    double total = 0.0;
    for (const auto& atom : atoms) total += atom.weight;
    CHECK(std::abs(total - 1.0) <= 1e-12);
    for (int i = 0; i < cov.index_count(); ++i) {
      double inc = 0.0;
      for (const auto& atom : atoms) {
        if (std::binary_search(atom.subset.begin(), atom.subset.end(), i)) inc += atom.weight;
      }
      CHECK(inc == doctest::Approx(cov.marginal(i)).epsilon(1e-12));
    }
  }
}

TEST_CASE("support cap") {
  CHECK_THROWS_AS((void)CoveringDistribution::iid(12, 0.5).enumerate_support(100),
                  SupportTooLarge);
}

TEST_CASE("empirical verification") {
  RandomSource rng(21);
  const CoveringDistribution sure = CoveringDistribution::iid(4, 1.0);
  const CoveringVerification exact = sure.verify(100, rng);
  CHECK_FALSE(exact.any_flagged);
  for (const auto& row : exact.rows) CHECK(row.empirical == 1.0);

  const CoveringDistribution party = CoveringDistribution::party_bion({0, 1, 2}, 1, 0.5);
  const CoveringVerification report = party.verify(100000, rng);
  CHECK_FALSE(report.any_flagged);
  for (const auto& row : report.rows) {
    CHECK(std::abs(row.empirical - 1.0 / 6.0) <= 0.01);
  }

  const CoveringDistribution none = CoveringDistribution::explicit_weighted(3, {{{}, 1.0}});
  const CoveringVerification zeros = none.verify(10, rng);
  CHECK_FALSE(zeros.any_flagged);
  for (const auto& row : zeros.rows) CHECK(row.empirical == 0.0);
}
