#include "tampersim/random.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "tampersim/errors.hpp"

namespace tampersim {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace

SeedLabel::SeedLabel(std::uint64_t v) : hash(splitmix64(v ^ 0xd1b54a32d192ed03ull)) {}
SeedLabel::SeedLabel(int v) : SeedLabel(static_cast<std::uint64_t>(static_cast<std::int64_t>(v))) {}
SeedLabel::SeedLabel(long long v) : SeedLabel(static_cast<std::uint64_t>(v)) {}
SeedLabel::SeedLabel(std::string_view s) : hash(fnv1a64(s)) {}
SeedLabel::SeedLabel(const std::string& s) : SeedLabel(std::string_view(s)) {}
SeedLabel::SeedLabel(const char* s) : SeedLabel(std::string_view(s)) {}

std::uint64_t derive_seed(std::uint64_t master_seed, const std::vector<SeedLabel>& labels) {
  std::uint64_t state = splitmix64(master_seed ^ 0x6a09e667f3bcc908ull);
  for (const SeedLabel& label : labels) {
    state = splitmix64(state ^ label.hash);
  }
  return state;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::initializer_list<SeedLabel> labels) {
  return derive_seed(master_seed, std::vector<SeedLabel>(labels));
}

RandomSource::RandomSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

std::uint64_t RandomSource::next_u64() { return engine_(); }

double RandomSource::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t RandomSource::below(std::uint64_t n) {
  if (n == 0) throw OutOfRange("RandomSource::below: n must be positive");
  const std::uint64_t rem = std::uint64_t(-n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x >= rem) return x % n;
  }
}

bool RandomSource::bernoulli(double p) { return uniform01() < p; }

RandomSource RandomSource::derive(std::initializer_list<SeedLabel> labels) const {
  return RandomSource(derive_seed(seed_, labels));
}

void parallel_for(long long count, int threads, const std::function<void(long long)>& body) {
  if (count <= 0) return;
  if (threads <= 1 || count == 1) {
    for (long long i = 0; i < count; ++i) body(i);
    return;
  }
  const int workers = static_cast<int>(std::min<long long>(threads, count));
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::atomic<long long> next{0};
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const long long i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

int default_thread_count() {
  if (const char* env = std::getenv("TAMPERSIM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(std::min<long>(v, 64));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) return 1;
  return static_cast<int>(std::min(hw, 16u));
}

}  // namespace tampersim
