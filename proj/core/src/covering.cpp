#include "tampersim/covering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include <nlohmann/json.hpp>

#include "tampersim/errors.hpp"

namespace tampersim {

bool TamperPlan::contains(int i) const {
  return std::binary_search(tamper_set.begin(), tamper_set.end(), i);
}

nlohmann::json CoveringVerification::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"index", r.index},
                         {"analytic", r.analytic},
                         {"empirical", r.empirical},
                         {"z", r.z},
                         {"flagged", r.flagged}});
  }
  return {{"trials", trials}, {"any_flagged", any_flagged}, {"rows", rows_json}};
}

CoveringDistribution CoveringDistribution::iid(int n, double p) {
  if (n < 1) throw OutOfRange("iid covering: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw OutOfRange("iid covering: p must lie in [0,1]");
  CoveringDistribution cov;
  cov.kind_ = Kind::IID;
  cov.n_ = n;
  cov.p_ = p;
  return cov;
}

CoveringDistribution CoveringDistribution::party_bion(std::vector<int> owner_map, int k,
                                                      double p) {
  if (owner_map.empty()) throw EmptySchedule("party covering: empty round schedule");
  int m = 0;
  for (int owner : owner_map) {
    if (owner < 0) throw OutOfRange("party covering: negative party index");
    m = std::max(m, owner + 1);
  }
  if (k < 1 || k > m) throw OutOfRange("party covering: k must lie in [1, m]");
  if (!(p >= 0.0 && p <= 1.0)) throw OutOfRange("party covering: p must lie in [0,1]");
  CoveringDistribution cov;
  cov.kind_ = Kind::PartyBion;
  cov.n_ = static_cast<int>(owner_map.size());
  cov.p_ = p;
  cov.owner_map_ = std::move(owner_map);
  cov.parties_ = m;
  cov.corrupted_ = k;
  return cov;
}

CoveringDistribution CoveringDistribution::explicit_weighted(int n,
                                                             std::vector<SupportAtom> atoms) {
  if (n < 1) throw OutOfRange("explicit covering: n must be >= 1");
  std::map<std::vector<int>, double> merged;
  double total = 0.0;
  for (auto& atom : atoms) {
    std::sort(atom.subset.begin(), atom.subset.end());
    atom.subset.erase(std::unique(atom.subset.begin(), atom.subset.end()), atom.subset.end());
    for (int i : atom.subset) {
      if (i < 0 || i >= n) throw IndexOutOfRange("explicit covering: subset index out of [0,n)");
    }
    if (atom.weight < 0.0) throw OutOfRange("explicit covering: negative weight");
    total += atom.weight;
    if (atom.weight > 0.0) merged[atom.subset] += atom.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ValidationError("explicit covering weights sum to " + std::to_string(total));
  }
  CoveringDistribution cov;
  cov.kind_ = Kind::ExplicitWeighted;
  cov.n_ = n;
  for (auto& [subset, weight] : merged) cov.atoms_.push_back({subset, weight});
  // The common marginal, if there is one; marginal() recomputes per index.
  cov.p_ = cov.atoms_.empty() ? 0.0 : cov.marginal(0);
  return cov;
}

CoveringDistribution CoveringDistribution::condition_on_parties(std::vector<int> parties) const {
  if (kind_ != Kind::PartyBion) {
    throw UnsupportedFlavor("condition_on_parties applies to party coverings only");
  }
  std::sort(parties.begin(), parties.end());
  parties.erase(std::unique(parties.begin(), parties.end()), parties.end());
  if (parties.empty()) throw OutOfRange("condition_on_parties: empty party set");
  for (int c : parties) {
    if (c < 0 || c >= parties_) throw IndexOutOfRange("condition_on_parties: bad party index");
  }
  CoveringDistribution cov = *this;
  cov.corrupted_ = static_cast<int>(parties.size());
  cov.fixed_parties_ = std::move(parties);
  return cov;
}

double CoveringDistribution::target_p() const {
  switch (kind_) {
    case Kind::IID:
      return p_;
    case Kind::PartyBion:
      if (fixed_parties_) {
        throw UnsupportedFlavor("fixed-party covering has no uniform marginal");
      }
      return p_ * static_cast<double>(corrupted_) / static_cast<double>(parties_);
    case Kind::ExplicitWeighted: {
      const double first = marginal(0);
      for (int i = 1; i < n_; ++i) {
        if (std::abs(marginal(i) - first) > 1e-12) {
          throw UnsupportedFlavor("explicit covering marginals are not uniform");
        }
      }
      return first;
    }
  }
  throw Error("unreachable");
}

const std::vector<int>& CoveringDistribution::fixed_parties() const {
  if (!fixed_parties_) throw Error("covering has no fixed party set");
  return *fixed_parties_;
}

int CoveringDistribution::party_count() const {
  if (kind_ != Kind::PartyBion) throw UnsupportedFlavor("not a party covering");
  return parties_;
}

int CoveringDistribution::corrupted_count() const {
  if (kind_ != Kind::PartyBion) throw UnsupportedFlavor("not a party covering");
  return corrupted_;
}

double CoveringDistribution::inner_p() const {
  if (kind_ != Kind::PartyBion) throw UnsupportedFlavor("not a party covering");
  return p_;
}

const std::vector<int>& CoveringDistribution::owner_map() const {
  if (kind_ != Kind::PartyBion) throw UnsupportedFlavor("not a party covering");
  return owner_map_;
}

double CoveringDistribution::marginal(int i) const {
  if (i < 0 || i >= n_) throw IndexOutOfRange("marginal: index out of [0,n)");
  switch (kind_) {
    case Kind::IID:
      return p_;
    case Kind::PartyBion:
      if (fixed_parties_) {
        const bool owned = std::binary_search(fixed_parties_->begin(), fixed_parties_->end(),
                                              owner_map_[static_cast<std::size_t>(i)]);
        return owned ? p_ : 0.0;
      }
      // Pr[owner corrupted] = k/m, then inner inclusion with probability p.
      return p_ * static_cast<double>(corrupted_) / static_cast<double>(parties_);
    case Kind::ExplicitWeighted: {
      double acc = 0.0;
      for (const auto& atom : atoms_) {
        if (std::binary_search(atom.subset.begin(), atom.subset.end(), i)) acc += atom.weight;
      }
      return acc;
    }
  }
  throw Error("unreachable");
}

namespace {

std::vector<int> sample_party_subset(int m, int k, RandomSource& rng) {
  std::vector<int> pool(static_cast<std::size_t>(m));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(i) +
                   static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(m - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  std::vector<int> chosen(pool.begin(), pool.begin() + k);
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

}  // namespace

TamperPlan CoveringDistribution::sample_plan(RandomSource& rng) const {
  TamperPlan plan;
  plan.source = describe();
  switch (kind_) {
    case Kind::IID: {
      for (int i = 0; i < n_; ++i) {
        if (rng.bernoulli(p_)) plan.tamper_set.push_back(i);
      }
      return plan;
    }
    case Kind::PartyBion: {
      const std::vector<int> chosen =
          fixed_parties_ ? *fixed_parties_ : sample_party_subset(parties_, corrupted_, rng);
      for (int i = 0; i < n_; ++i) {
        if (std::binary_search(chosen.begin(), chosen.end(),
                               owner_map_[static_cast<std::size_t>(i)]) &&
            rng.bernoulli(p_)) {
          plan.tamper_set.push_back(i);
        }
      }
      return plan;
    }
    case Kind::ExplicitWeighted: {
      const double u = rng.uniform01();
      double acc = 0.0;
      for (const auto& atom : atoms_) {
        acc += atom.weight;
        if (u < acc) {
          plan.tamper_set = atom.subset;
          return plan;
        }
      }
      plan.tamper_set = atoms_.back().subset;
      return plan;
    }
  }
  throw Error("unreachable");
}

std::vector<SupportAtom> CoveringDistribution::enumerate_support(std::size_t cap) const {
  std::map<std::vector<int>, double> merged;

  const auto add_bion_atoms = [&](const std::vector<int>& rounds, double base_weight) {
    // Subsets of `rounds`, each index included with probability p_.
    std::vector<int> free;
    std::vector<int> forced;
    for (int r : rounds) {
      if (p_ >= 1.0) {
        forced.push_back(r);
      } else if (p_ > 0.0) {
        free.push_back(r);
      }
    }
    if (free.size() >= 63 || (std::size_t{1} << free.size()) > cap) {
      throw SupportTooLarge("covering support exceeds cap");
    }
    const std::size_t count = std::size_t{1} << free.size();
    for (std::size_t mask = 0; mask < count; ++mask) {
      std::vector<int> subset = forced;
      double w = base_weight;
      for (std::size_t b = 0; b < free.size(); ++b) {
        if (mask & (std::size_t{1} << b)) {
          subset.push_back(free[b]);
          w *= p_;
        } else {
          w *= 1.0 - p_;
        }
      }
      if (w <= 0.0) continue;
      std::sort(subset.begin(), subset.end());
      merged[subset] += w;
      if (merged.size() > cap) throw SupportTooLarge("covering support exceeds cap");
    }
  };

  switch (kind_) {
    case Kind::IID: {
      std::vector<int> all(static_cast<std::size_t>(n_));
      std::iota(all.begin(), all.end(), 0);
      add_bion_atoms(all, 1.0);
      break;
    }
    case Kind::PartyBion: {
      std::vector<std::vector<int>> party_subsets;
      if (fixed_parties_) {
        party_subsets.push_back(*fixed_parties_);
      } else {
        // All k-subsets of [m], lexicographic.
        std::vector<int> idx(static_cast<std::size_t>(corrupted_));
        std::iota(idx.begin(), idx.end(), 0);
        for (;;) {
          party_subsets.push_back(idx);
          int pos = corrupted_ - 1;
          while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == parties_ - corrupted_ + pos) {
            --pos;
          }
          if (pos < 0) break;
          ++idx[static_cast<std::size_t>(pos)];
          for (int j = pos + 1; j < corrupted_; ++j) {
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
          }
          if (party_subsets.size() > cap) throw SupportTooLarge("covering support exceeds cap");
        }
      }
      const double base = 1.0 / static_cast<double>(party_subsets.size());
      for (const auto& chosen : party_subsets) {
        std::vector<int> rounds;
        for (int i = 0; i < n_; ++i) {
          if (std::binary_search(chosen.begin(), chosen.end(),
                                 owner_map_[static_cast<std::size_t>(i)])) {
            rounds.push_back(i);
          }
        }
        add_bion_atoms(rounds, base);
      }
      break;
    }
    case Kind::ExplicitWeighted:
      for (const auto& atom : atoms_) merged[atom.subset] += atom.weight;
      break;
  }

  std::vector<SupportAtom> out;
  out.reserve(merged.size());
  for (auto& [subset, weight] : merged) out.push_back({subset, weight});
  return out;
}

CoveringVerification CoveringDistribution::verify(long long trials, RandomSource& rng) const {
  if (trials < 1) throw OutOfRange("verify: trials must be >= 1");
  std::vector<long long> counts(static_cast<std::size_t>(n_), 0);
  for (long long t = 0; t < trials; ++t) {
    const TamperPlan plan = sample_plan(rng);
    for (int i : plan.tamper_set) ++counts[static_cast<std::size_t>(i)];
  }
  CoveringVerification report;
  report.trials = trials;
  for (int i = 0; i < n_; ++i) {
    const double analytic = marginal(i);
    const double empirical =
        static_cast<double>(counts[static_cast<std::size_t>(i)]) / static_cast<double>(trials);
    const double sigma = std::sqrt(analytic * (1.0 - analytic) / static_cast<double>(trials));
    const double diff = empirical - analytic;
    double z = 0.0;
    if (sigma > 0.0) {
      z = diff / sigma;
    } else if (diff != 0.0) {
      z = std::numeric_limits<double>::infinity();
    }
    const bool flagged = std::abs(diff) > 4.0 * sigma;
    report.rows.push_back({i, analytic, empirical, z, flagged});
    report.any_flagged = report.any_flagged || flagged;
  }
  return report;
}

std::string CoveringDistribution::describe() const {
  switch (kind_) {
    case Kind::IID:
      return "iid(n=" + std::to_string(n_) + ",p=" + std::to_string(p_) + ")";
    case Kind::PartyBion: {
      std::string s = "party_bion(m=" + std::to_string(parties_) +
                      ",k=" + std::to_string(corrupted_) + ",p=" + std::to_string(p_);
      if (fixed_parties_) {
        s += ",C={";
        for (std::size_t i = 0; i < fixed_parties_->size(); ++i) {
          if (i) s += ",";
          s += std::to_string((*fixed_parties_)[i]);
        }
        s += "}";
      }
      return s + ")";
    }
    case Kind::ExplicitWeighted:
      return "explicit(" + std::to_string(atoms_.size()) + " atoms)";
  }
  return "covering";
}

CoveringDistribution load_covering(const nlohmann::json& spec) {
  try {
    const std::string kind = spec.at("kind").get<std::string>();
    if (kind == "iid") {
      return CoveringDistribution::iid(spec.at("n").get<int>(), spec.at("p").get<double>());
    }
    if (kind == "party_bion") {
      auto cov = CoveringDistribution::party_bion(spec.at("owner_map").get<std::vector<int>>(),
                                                  spec.at("k").get<int>(),
                                                  spec.at("p").get<double>());
      if (spec.contains("parties")) {
        cov = cov.condition_on_parties(spec.at("parties").get<std::vector<int>>());
      }
      return cov;
    }
    if (kind == "explicit") {
      std::vector<SupportAtom> atoms;
      for (const auto& entry : spec.at("atoms")) {
        atoms.push_back({entry.at(0).get<std::vector<int>>(), entry.at(1).get<double>()});
      }
      return CoveringDistribution::explicit_weighted(spec.at("n").get<int>(), std::move(atoms));
    }
    throw ValidationError("unknown covering kind: " + kind);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("covering definition: ") + e.what());
  }
}

}  // namespace tampersim
