#pragma once

#include <cstdint>
#include <random>

namespace mfedge {

// One seedable generator per run; every stochastic operation of a run draws
// from the same stream so results are reproducible given the seed.
using Rng = std::mt19937_64;

inline double exp_draw(Rng& rng, double rate) {
  return std::exponential_distribution<double>(rate)(rng);
}

inline double uniform_draw(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline int poisson_draw(Rng& rng, double mean) {
  return std::poisson_distribution<int>(mean)(rng);
}

inline bool coin(Rng& rng, double p_true = 0.5) {
  return std::bernoulli_distribution(p_true)(rng);
}

// Uniform index in [0, n).
inline std::size_t index_draw(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace mfedge
