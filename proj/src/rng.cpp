#include "rtp/rng.hpp"

#include <cmath>

namespace rtp {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

std::uint64_t scramble(std::uint64_t seed) {
  std::uint64_t s = seed;
  std::uint64_t z = splitmix64(s);
  return splitmix64(s) ^ z;
}

}  // namespace

SeededRng::SeededRng(std::uint64_t seed) : base_seed_(seed), engine_(scramble(seed)) {}

std::uint64_t SeededRng::next_u64() { return engine_(); }

double SeededRng::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double SeededRng::next_gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * next_uniform() - 1.0;
    v = 2.0 * next_uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

SeededRng SeededRng::substream(std::uint64_t index) const {
  std::uint64_t s = base_seed_ ^ (0x632BE59BD9B4E019ull * (index + 1));
  std::uint64_t derived = splitmix64(s);
  derived ^= splitmix64(s);
  return SeededRng(derived);
}

}  // namespace rtp
