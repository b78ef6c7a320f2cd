#pragma once

#include <cstdint>

namespace adjrobust {

// Counter-based generator built on the SplitMix64 finalizer: the i-th draw of
// a stream is mix64(key + (i+1)*golden). Stateless per index, so any draw can
// be produced independently of the others — replications and purposes get
// their own keys and never share counters.
//
// Streams are keyed by chaining the finalizer over (base_seed, replication,
// purpose). Normal deviates use the Box-Muller cosine branch on the uniforms
// at counters (2i, 2i+1); this choice is fixed so results are reproducible
// across platforms and builds.
namespace rng {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t base_seed,
                                   std::uint64_t replication,
                                   std::uint64_t purpose) {
  std::uint64_t k = mix64(base_seed);
  k = mix64(k ^ mix64(replication + 0x243F6A8885A308D3ULL));
  k = mix64(k ^ mix64(purpose + 0x13198A2E03707344ULL));
  return k;
}

// Deterministic per-replication seed for simulation harnesses.
constexpr std::uint64_t replication_seed(std::uint64_t base_seed,
                                         std::uint64_t replication) {
  return mix64(mix64(base_seed) + replication);
}

}  // namespace rng

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  CounterRng(std::uint64_t base_seed, std::uint64_t replication,
             std::uint64_t purpose)
      : key_(rng::stream_key(base_seed, replication, purpose)) {}

  std::uint64_t bits(std::uint64_t i) const {
    return rng::mix64(key_ + (i + 1) * rng::kGolden);
  }

  // Uniform on (0,1); never returns an exact 0 or 1.
  double uniform(std::uint64_t i) const {
    return (static_cast<double>(bits(i) >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller (cosine branch), consuming the uniforms at
  // counters 2i and 2i+1.
  double normal(std::uint64_t i) const;

  // Uniform integer in [0, bound) by 128-bit multiply (Lemire reduction,
  // without the rejection step; bias is < bound/2^64 and irrelevant here).
  std::uint64_t below(std::uint64_t i, std::uint64_t bound) const {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(bits(i)) * bound) >> 64);
  }

  std::uint64_t key() const { return key_; }

 private:
  std::uint64_t key_;
};

}  // namespace adjrobust
