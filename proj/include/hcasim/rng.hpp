#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace hcasim {

// splitmix64, used for seed derivation and stateless hashing. The mixing
// constants are the reference ones from Steele et al.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Derives an independent stream seed from a base seed and stream tags.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag_a,
                                 std::uint64_t tag_b = 0) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64(s);
  s ^= tag_a + 0x9e3779b97f4a7c15ULL;
  h ^= splitmix64(s);
  s ^= tag_b + 0xc2b2ae3d27d4eb4fULL;
  h ^= splitmix64(s);
  return h;
}

// Seeded RNG with hand-rolled distribution transforms. std::*_distribution
// implementations differ between standard libraries; these transforms keep
// every draw a pure function of the engine state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  int uniform_int(int n) {  // uniform on {0, ..., n-1}
    return static_cast<int>(uniform01() * static_cast<double>(n));
  }

  // Standard normal via Box-Muller. Draws two uniforms per call.
  double normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return r * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  // Knuth's product method; adequate for the means used here (<= ~500).
  int poisson(double mean) {
    const double limit = std::exp(-mean);
    double prod = 1.0;
    int k = -1;
    do {
      prod *= uniform01();
      ++k;
    } while (prod > limit);
    return k;
  }

  double exponential(double rate) {
    double u = uniform01();
    while (u <= 0.0) u = uniform01();
    return -std::log(u) / rate;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hcasim
