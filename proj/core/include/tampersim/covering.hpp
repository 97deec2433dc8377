#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tampersim/random.hpp"

namespace tampersim {

inline constexpr std::size_t kDefaultSupportCap = std::size_t{1} << 20;

/// A sampled set of tamperable block indices (0-based).
struct TamperPlan {
  std::vector<int> tamper_set;  // sorted, distinct
  std::string source;           // description of the covering it was drawn from

  bool contains(int i) const;
};

struct SupportAtom {
  std::vector<int> subset;  // sorted
  double weight;
};

struct CoveringIndexCheck {
  int index;
  double analytic;
  double empirical;
  double z;
  bool flagged;
};

/// Result of an empirical marginal check, one row per index.
struct CoveringVerification {
  std::vector<CoveringIndexCheck> rows;
  long long trials = 0;
  bool any_flagged = false;

  nlohmann::json to_json() const;
};

/// A distribution over subsets of {0, .., n-1} whose per-index inclusion
/// marginal is the same value p for every index.
///
/// Three kinds are provided: independent per-index inclusion (IID), the
/// party-corruption construction (draw a uniform k-subset of the m parties,
/// then include each round they own independently with an inner probability),
/// and an explicit weighted list of subsets. Immutable after construction.
class CoveringDistribution {
 public:
  enum class Kind { IID, PartyBion, ExplicitWeighted };

  static CoveringDistribution iid(int n, double p);

  /// owner_map[j] is the party owning round j (parties 0..m-1, m = max+1).
  static CoveringDistribution party_bion(std::vector<int> owner_map, int k, double p);

  static CoveringDistribution explicit_weighted(int n, std::vector<SupportAtom> atoms);

  /// Fixed-corruption variant of a party covering: the party subset is pinned
  /// instead of resampled per plan. Marginals are inner_p on rounds owned by
  /// `parties` and zero elsewhere, so this is not a uniform-marginal covering;
  /// it is the per-subset term of the averaging argument.
  CoveringDistribution condition_on_parties(std::vector<int> parties) const;

  Kind kind() const { return kind_; }
  int index_count() const { return n_; }

  /// The common per-index marginal. Throws for fixed-party variants, whose
  /// marginals are not constant.
  double target_p() const;

  bool has_fixed_parties() const { return fixed_parties_.has_value(); }
  const std::vector<int>& fixed_parties() const;
  int party_count() const;
  int corrupted_count() const;
  double inner_p() const;
  const std::vector<int>& owner_map() const;

  /// Exact analytic inclusion marginal of index i.
  double marginal(int i) const;

  TamperPlan sample_plan(RandomSource& rng) const;

  /// Full support as (subset, weight) atoms, merged and sorted canonically.
  std::vector<SupportAtom> enumerate_support(std::size_t cap = kDefaultSupportCap) const;

  /// Empirical per-index marginal check over `trials` sampled plans. Flags an
  /// index when the empirical frequency sits more than four binomial standard
  /// errors from the analytic marginal.
  CoveringVerification verify(long long trials, RandomSource& rng) const;

  std::string describe() const;

 private:
  CoveringDistribution() = default;

  Kind kind_ = Kind::IID;
  int n_ = 0;
  double p_ = 0.0;  // IID marginal, or the inner per-round probability for PartyBion
  // PartyBion only:
  std::vector<int> owner_map_;
  int parties_ = 0;
  int corrupted_ = 0;
  std::optional<std::vector<int>> fixed_parties_;
  // ExplicitWeighted only:
  std::vector<SupportAtom> atoms_;
};

CoveringDistribution load_covering(const nlohmann::json& spec);

}  // namespace tampersim
