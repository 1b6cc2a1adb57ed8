#pragma once

// Reproducible random streams.
//
// Every stochastic kernel draws from std::mt19937_64, whose output sequence is
// fixed by the C++ standard. Work is cut into fixed-size batches; batch `b`
// of a run with master seed `s` is seeded with splitmix64(s ^ splitmix64(b)),
// so results do not depend on how batches are scheduled across threads.
// Doubles are formed from the top 53 bits, never through
// std::uniform_real_distribution (whose algorithm is implementation-defined).

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>

namespace farey {

inline constexpr std::string_view kRngName = "mt19937_64/splitmix64-batch-v1";

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

class BatchRng {
 public:
  BatchRng(std::uint64_t master_seed, std::uint64_t batch)
      : engine_(splitmix64(master_seed ^ splitmix64(batch))) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], by rejection (no modulo bias).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(engine_());
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return lo + static_cast<std::int64_t>(v % span);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace farey
