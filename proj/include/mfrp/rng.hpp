#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

namespace mfrp {

constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Stream purposes keep derived seeds from colliding across subsystems.
enum class Stream : std::uint64_t {
  kModel = 1,       // synthetic model generation
  kProjection = 2,  // parity constraint draws, one child per trial
  kInit = 3,        // solver restarts, one child per (trial, restart)
  kWish = 4,        // constraint draws of the level estimator, per (level, trial)
};

// Deterministic child seed addressed by (purpose, indices...). Addressing is
// independent of evaluation order, so threaded runs reproduce serial results.
inline std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                 std::span<const std::uint64_t> path) {
  std::uint64_t h = splitmix64(master ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  for (std::uint64_t v : path) h = splitmix64(h ^ v);
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                 std::initializer_list<std::uint64_t> path = {}) {
  return derive_seed(master, stream,
                     std::span<const std::uint64_t>(path.begin(), path.size()));
}

inline std::mt19937_64 make_engine(std::uint64_t seed) { return std::mt19937_64(seed); }

// Uniform doubles built from raw engine words: identical on every platform,
// unlike std::uniform_real_distribution.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

}  // namespace mfrp
