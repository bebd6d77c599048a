#pragma once

#include <cstdint>
#include <cmath>
#include <random>

namespace sbe {

// Seed derivation for independent ensemble streams: member k draws from a
// generator seeded by splitmix64(seed ^ golden*k), so results do not depend
// on scheduling order.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  return splitmix64(seed ^ (0x9e3779b97f4a7c15ULL * (stream + 1)));
}

// Gaussian stream with an explicit Box-Muller so draws are reproducible
// across standard library implementations.
class GaussianStream {
 public:
  explicit GaussianStream(uint64_t seed) : gen_(seed) {}

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform_open();
    double u2 = uniform_open();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  double uniform_open() {
    // (0,1): never returns 0 so log() is safe
    uint64_t v = gen_();
    return (static_cast<double>(v >> 11) + 0.5) * 0x1.0p-53;
  }

  uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sbe
