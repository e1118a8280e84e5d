#pragma once

#include <cstdint>

namespace gossip {

// Finalizer of the splitmix64 generator: a fixed-point-free avalanche mix.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Seed of an independent draw stream. Streams are derived from the master
// seed and a stream index alone, so per-iteration results never depend on
// which worker thread ran them or in what order.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(master ^ mix64(index + 0x9E3779B97F4A7C15ull));
}

// splitmix64: Weyl-sequence counter plus avalanche output. Small, fast, and
// exactly reproducible across platforms.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  // 53-bit uniform draw in [0, 1).
  double uniform01() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double prob) { return uniform01() < prob; }

 private:
  std::uint64_t state_;
};

}  // namespace gossip
