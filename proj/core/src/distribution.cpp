#include "tampersim/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tampersim/errors.hpp"

namespace tampersim {

Distribution Distribution::from_pairs(std::vector<std::pair<Symbol, double>> items, double tol) {
  std::sort(items.begin(), items.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  Distribution d;
  double total = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& [sym, p] = items[i];
    if (i > 0 && sym == items[i - 1].first) {
      throw ValidationError("duplicate symbol in distribution: " + std::to_string(sym));
    }
    if (p < -tol) {
      throw OutOfRange("negative probability for symbol " + std::to_string(sym));
    }
    total += p;
    if (p > 0.0) {
      d.symbols_.push_back(sym);
      d.probs_.push_back(p);
    }
  }
  if (std::abs(total - 1.0) > tol) {
    throw ValidationError("distribution does not sum to 1: total=" + std::to_string(total));
  }
  if (d.symbols_.empty()) {
    throw ValidationError("distribution has empty support");
  }
  return d;
}

double Distribution::prob_of(Symbol s) const {
  const auto it = std::lower_bound(symbols_.begin(), symbols_.end(), s);
  if (it == symbols_.end() || *it != s) return 0.0;
  return probs_[static_cast<std::size_t>(it - symbols_.begin())];
}

Symbol Distribution::sample(RandomSource& rng) const {
  const double total = std::accumulate(probs_.begin(), probs_.end(), 0.0);
  const double u = rng.uniform01() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    acc += probs_[i];
    if (u < acc) return symbols_[i];
  }
  return symbols_.back();
}

}  // namespace tampersim
