#pragma once

#include <cmath>
#include <cstdint>

#include "lightatom/constants.hpp"

namespace lightatom::rng {

// Stateless counter-based randomness. Every draw is a pure function of
// (seed, stream, counter), so the value used for sample i does not depend on
// which thread evaluates it or in what order.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ stream);
  return splitmix64(h ^ counter);
}

/// Uniform in the open interval (0, 1).
constexpr double uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return (static_cast<double>(hash(seed, stream, counter) >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal pair via Box-Muller on two counter-indexed uniforms.
struct NormalPair {
  double first;
  double second;
};

inline NormalPair normal_pair(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const double u1 = uniform(seed, stream, 2 * counter);
  const double u2 = uniform(seed, stream, 2 * counter + 1);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = constants::two_pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

/// Seed for a conventional engine owned by one (seed, stream) work item.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return hash(seed, stream, 0x5eedULL);
}

}  // namespace lightatom::rng
