#pragma once

#include <cstdint>
#include <random>

namespace rtp {

// Seedable 64-bit stream with deterministic sub-streams.
//
// Sub-stream k is derived by hashing (base seed, k), so parallel consumers of
// substream(0), substream(1), ... see the same values regardless of the order
// in which they are created or used. Reproducibility is promised within one
// build of this library, not across platforms.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed);

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 random bits.
  double next_uniform();
  // Standard normal via the polar method (caches the spare deviate).
  double next_gaussian();

  SeededRng substream(std::uint64_t index) const;
  std::uint64_t seed() const { return base_seed_; }

 private:
  std::uint64_t base_seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// SplitMix64 step; used for seed scrambling and sub-stream derivation.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace rtp
