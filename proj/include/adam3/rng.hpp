#pragma once

#include <cstdint>

namespace adam3 {

/// SplitMix64: a 64-bit counter-based generator. The state advances by a
/// fixed odd constant and each output is a bijective mix of the state, so the
/// i-th output is a pure function of (initial state, i). All arithmetic is
/// integer, which makes streams reproducible bit-for-bit on any platform.
///
/// Stream layout used by the experiment runner: the minibatch of iteration k
/// (1-based) is drawn from a fresh generator seeded with
/// `splitmix64_mix(seed + k * 0x9E3779B97F4A7C15)`, one substream per
/// iteration. Uniform doubles are `(next_u64() >> 11) * 2^-53`.
inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t state) : state_(state) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return splitmix64_mix(state_);
  }

  /// Uniform in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// The per-iteration substream of a run (see class comment above).
inline SplitMix64 iteration_stream(std::uint64_t seed, std::uint64_t iteration) {
  return SplitMix64(splitmix64_mix(seed + iteration * 0x9E3779B97F4A7C15ull));
}

}  // namespace adam3
