#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace conewalk {

// Counter-based random stream: output i is a pure function of (key, i).
// Streams keyed by (master_seed, run index, purpose) are independent and
// replay identically regardless of thread count or query order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key) {}

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a = 0,
                                  std::uint64_t b = 0) {
    std::uint64_t h = mix(seed ^ 0x8f3b1c9d2e5a7f41ULL);
    h = mix(h ^ mix(a ^ 0x5851f42d4c957f2dULL));
    h = mix(h ^ mix(b ^ 0x14057b7ef767814fULL));
    return h;
  }

  std::uint64_t next_u64() { return at(counter_++); }

  // Uniform on [0,1).
  double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on {0,...,n-1} without modulo bias.
  std::uint64_t next_below(std::uint64_t n) {
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  std::uint64_t counter() const { return counter_; }
  void seek(std::uint64_t counter) { counter_ = counter; }

  // UniformRandomBitGenerator interface.
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return next_u64(); }

 private:
  std::uint64_t at(std::uint64_t i) const {
    return mix(key_ + i * 0x9e3779b97f4a7c15ULL);
  }

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Uniform sample from the probability simplex {y >= 0, sum y = 1} via
// normalized exponentials.
std::vector<double> inline sample_simplex(int d, RngStream& rng) {
  std::vector<double> y(d);
  double total = 0.0;
  for (int i = 0; i < d; ++i) {
    double u = rng.next_double();
    // avoid log(0)
    if (u <= 0.0) u = 0x1.0p-53;
    y[i] = -std::log(u);
    total += y[i];
  }
  for (int i = 0; i < d; ++i) y[i] /= total;
  return y;
}

}  // namespace conewalk
