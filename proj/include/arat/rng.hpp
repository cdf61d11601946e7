#pragma once

#include <cstdint>
#include <random>

namespace arat {

// The single seeded stream a run draws from. Every draw goes through one of
// the three primitives below so consumption order can be replayed exactly:
//   next_u64      one raw engine output
//   uniform_int   rejection sampling over raw outputs (unbiased)
//   uniform_real  top 53 bits of one raw output, in [0, 1)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform over the closed range [lo, hi]. Requires lo <= hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform over [0, 1).
  double uniform_real();

  /// Uniform index in [0, n). Requires n > 0.
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1));
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace arat
