#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dlr {

using Engine = std::mt19937_64;

/// Tags separating the independent streams that hang off one master seed.
enum class Purpose : std::uint64_t {
  data = 1,
  theta = 2,
  shuffle = 3,
  channel = 4,
  directions = 5,
  monte_carlo = 6,
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives a child seed from a master seed and an ordered list of indices.
/// The result depends on every element and on their order, so
/// (master, cell, trial, purpose) tuples map to unrelated streams.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept;

inline std::uint64_t derive_seed(std::uint64_t master, Purpose purpose,
                                 std::initializer_list<std::uint64_t> path = {}) noexcept {
  std::uint64_t s = derive_seed(master, {static_cast<std::uint64_t>(purpose)});
  return derive_seed(s, path);
}

inline Engine make_engine(std::uint64_t seed) { return Engine{seed}; }

/// Uniform double in [0, 1) from the top 53 bits of one engine draw.
inline double uniform01(Engine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace dlr
