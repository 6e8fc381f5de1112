#pragma once

// Random streams. Boost distributions are used instead of <random> ones so a
// seed gives the same draws with every standard library.

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include <cstdint>

namespace bdg {

using Rng = boost::random::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Independent stream keyed by (master seed, chain id, draw counter).
inline Rng make_stream(std::uint64_t master, std::uint64_t chain = 0, std::uint64_t counter = 0) {
  const std::uint64_t s = splitmix64(splitmix64(splitmix64(master) ^ chain) ^ counter);
  return Rng(s);
}

inline double standard_normal(Rng& rng) {
  return boost::random::normal_distribution<double>(0.0, 1.0)(rng);
}

/// Chi-square with real-valued degrees of freedom.
inline double chi_squared(Rng& rng, double dof) {
  return 2.0 * boost::random::gamma_distribution<double>(dof / 2.0, 1.0)(rng);
}

/// Uniform on the open interval (0, 1).
inline double uniform_open(Rng& rng) {
  boost::random::uniform_01<double> u;
  double x = u(rng);
  while (x <= 0.0) x = u(rng);
  return x;
}

}  // namespace bdg
