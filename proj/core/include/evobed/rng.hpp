#ifndef EVOBED_RNG_HPP
#define EVOBED_RNG_HPP

#include <cmath>
#include <cstdint>

namespace evobed {

// Deterministic, platform-independent random streams.
//
// Every stochastic decision in the testbed draws from a stream derived from
// the master seed through Seed::child(tag), so any trial, repeat or sweep
// cell can be reproduced in isolation. No std:: distributions are used;
// their output is implementation-defined and would break byte-stable logs.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform in (lo, hi]; used for gain envelopes that exclude zero.
  double uniform_open_low(double lo, double hi) {
    return hi - (hi - lo) * uniform();
  }

  // Uniform integer in [0, n).
  std::uint32_t uniform_index(std::uint32_t n) {
    return static_cast<std::uint32_t>(next_u64() % n);
  }

  // Standard normal via Box-Muller; two uniforms per draw, no cached spare.
  double normal() {
    double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0,1]
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

 private:
  std::uint64_t state_;
};

// A stream identity. child(tag) derives an independent sub-stream; rng()
// materialises a generator. Tags are small ints chosen by the caller
// (slot index, trial index, purpose constants).
struct Seed {
  std::uint64_t value = 0;

  Seed child(std::uint64_t tag) const {
    return Seed{splitmix64(value ^ (0x9e3779b97f4a7c15ull * (tag + 1)))};
  }

  Rng rng() const { return Rng(value); }
};

}  // namespace evobed

#endif
