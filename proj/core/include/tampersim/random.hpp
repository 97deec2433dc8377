#pragma once

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>
#include <string_view>
#include <vector>

namespace tampersim {

/// One component of a seed-derivation path, e.g. {"trial", 17}.
struct SeedLabel {
  std::uint64_t hash;

  SeedLabel(std::uint64_t v);
  SeedLabel(int v);
  SeedLabel(long long v);
  SeedLabel(std::string_view s);
  SeedLabel(const std::string& s);
  SeedLabel(const char* s);
};

/// Deterministic, collision-resistant seed derivation. Labels are folded into
/// the master seed one at a time through a splitmix64 finalizer, so distinct
/// label paths yield independent streams and identical paths reproduce exactly.
std::uint64_t derive_seed(std::uint64_t master_seed, std::initializer_list<SeedLabel> labels);
std::uint64_t derive_seed(std::uint64_t master_seed, const std::vector<SeedLabel>& labels);

std::uint64_t splitmix64(std::uint64_t x);

/// Seeded random stream. All randomized operations in the library take one of
/// these explicitly; there is no hidden global generator. The uniform and
/// discrete draws below are implemented by hand so sample paths are identical
/// across platforms and standard libraries.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01();

  /// Unbiased uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p);

  /// Child stream for a labelled sub-experiment; independent of the parent.
  RandomSource derive(std::initializer_list<SeedLabel> labels) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Runs body(0..count-1) across `threads` workers. Results must be written to
/// per-index slots by the caller; the first exception thrown by any worker is
/// rethrown after all workers join.
void parallel_for(long long count, int threads, const std::function<void(long long)>& body);

/// Worker count from the TAMPERSIM_THREADS environment variable, defaulting to
/// the hardware concurrency (clamped to [1, 16]).
int default_thread_count();

}  // namespace tampersim
