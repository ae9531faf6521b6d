// SPDX-License-Identifier: Apache-2.0
//
// Counter-based splittable random numbers: every draw is a pure
// function of (seed, stream, event index, draw counter), so event
// generation is reproducible independent of scheduling and thread
// count.  The generator chains 64-bit avalanche mixers (murmur3
// finalizer); statistical quality is ample for Monte Carlo sampling.
#pragma once

#include <cstdint>

namespace nly::rng {

inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

inline std::uint64_t counter_word(std::uint64_t seed, std::uint64_t stream,
                                  std::uint64_t event, std::uint64_t counter) {
  std::uint64_t z = mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1));
  z = mix64(z ^ (0xbf58476d1ce4e5b9ULL * (event + 1)));
  z = mix64(z ^ (0x94d049bb133111ebULL * (counter + 1)));
  return z;
}

// Per-event draw cursor.
class EventRng {
 public:
  EventRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t event)
      : seed_(seed), stream_(stream), event_(event) {}

  // Uniform in [0, 1).
  double uniform() {
    const std::uint64_t w = counter_word(seed_, stream_, event_, counter_++);
    return static_cast<double>(w >> 11) * 0x1.0p-53;
  }

  // Uniform in (0, 1] (for logs).
  double uniform_pos() {
    const std::uint64_t w = counter_word(seed_, stream_, event_, counter_++);
    return (static_cast<double>(w >> 11) + 1.0) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; consumes exactly two draws.
  double gauss();

  std::uint64_t draws() const { return counter_; }

 private:
  std::uint64_t seed_, stream_, event_;
  std::uint64_t counter_ = 0;
};

}  // namespace nly::rng
