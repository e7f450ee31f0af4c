#pragma once

#include <cmath>
#include <cstdint>

namespace bstar {

// SplitMix64 (Steele-Lea-Vigna). The state is a counter advanced by a fixed
// odd constant and each output is a bijective hash of the counter, so a seed
// reproduces the same stream on every platform. substream(key) hashes
// (seed, key) into the seed of an independent stream; per-replication and
// per-cell streams in the simulation drivers are derived that way and do not
// overlap. Normal deviates use Box-Muller instead of std::normal_distribution,
// whose output is implementation defined.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : seed_(seed), state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return finalize(state_ += 0x9e3779b97f4a7c15ULL); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool coin() { return uniform() < 0.5; }

  // Uniform on {0, 1, ..., n - 1}.
  int pick(int n) {
    const int v = static_cast<int>(uniform() * n);
    return v < n ? v : n - 1;
  }

  // Standard normal; the second deviate of each Box-Muller pair is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log1p(-u1));
    const double t = 2.0 * 3.14159265358979323846 * u2;
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  SplitMix64 substream(std::uint64_t key) const {
    return SplitMix64(finalize(seed_ ^ finalize(key + 0x6a09e667f3bcc909ULL)));
  }

  std::uint64_t seed() const { return seed_; }

 private:
  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bstar
