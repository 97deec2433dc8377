#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tampersim/random.hpp"

namespace tampersim {

/// One block of a random process. Symbols are opaque tokens; any meaning
/// (bit, Markov state, labeled-example id) is assigned by the caller.
using Symbol = std::int32_t;

/// A full sequence or a prefix of one; length distinguishes the two.
using Sequence = std::vector<Symbol>;

struct SequenceHash {
  std::size_t operator()(const Sequence& s) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (Symbol v : s) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 0x100000001b3ull;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Finite distribution over symbols. Stores only the positive-probability
/// support, sorted by symbol for deterministic iteration.
class Distribution {
 public:
  Distribution() = default;

  /// Builds from (symbol, probability) pairs. Drops zero entries, rejects
  /// negatives and duplicate symbols, and requires the total to be 1 within
  /// `tol`.
  static Distribution from_pairs(std::vector<std::pair<Symbol, double>> items,
                                 double tol = 1e-9);

  std::size_t size() const { return symbols_.size(); }
  bool empty() const { return symbols_.empty(); }
  const std::vector<Symbol>& symbols() const { return symbols_; }
  const std::vector<double>& probs() const { return probs_; }

  /// Probability of `s`; zero when `s` is outside the support.
  double prob_of(Symbol s) const;

  Symbol sample(RandomSource& rng) const;

 private:
  std::vector<Symbol> symbols_;
  std::vector<double> probs_;
};

}  // namespace tampersim
