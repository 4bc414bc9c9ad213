#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qanneal/error.hpp"
#include "qanneal/spin/ising_problem.hpp"

namespace qanneal {

inline constexpr int kMaxBruteForceSpins = 24;

struct GroundState {
  double energy = 0.0;
  std::vector<SpinConfig> optima;
};

/// Exhaustive minimum over all 2^N configurations, enumerated in Gray-code
/// order with incremental energy updates. Returns every configuration within
/// `degeneracy_tol` of the minimum (both members of a flip pair when h = 0).
inline GroundState brute_force_ground_state(const IsingProblem& problem, double degeneracy_tol = 1e-9) {
  const int n = problem.size();
  if (n > kMaxBruteForceSpins)
    throw OracleLimitError("brute_force_ground_state: N = " + std::to_string(n) + " exceeds " +
                           std::to_string(kMaxBruteForceSpins));

  SpinConfig config(static_cast<std::size_t>(n), 1);
  double e = energy(config, problem);
  const double scale = std::max(1.0, std::abs(e));

  GroundState best{e, {}};
  std::vector<std::uint64_t> optima_bits{0};
  const std::uint64_t total = std::uint64_t{1} << n;
  std::uint64_t gray = 0;
  for (std::uint64_t k = 1; k < total; ++k) {
    const int site = std::countr_zero(k);
    e += problem.flip_delta(config, site);
    config.flip(static_cast<std::size_t>(site));
    gray ^= (std::uint64_t{1} << site);
    if ((k & 0xFFF) == 0) e = energy(config, problem);
    const double tol = degeneracy_tol * scale;
    if (e < best.energy - tol) {
      best.energy = e;
      optima_bits.assign(1, gray);
    } else if (e <= best.energy + tol) {
      optima_bits.push_back(gray);
      if (e < best.energy) best.energy = e;
    }
  }
  std::sort(optima_bits.begin(), optima_bits.end());
  // Re-evaluate exactly to discard drift-induced near misses.
  for (auto bits : optima_bits) {
    auto c = SpinConfig::from_bits(bits, static_cast<std::size_t>(n));
    const double exact = energy(c, problem);
    if (exact <= best.energy + degeneracy_tol * scale) best.optima.push_back(std::move(c));
  }
  double emin = energy(best.optima.front(), problem);
  for (const auto& c : best.optima) emin = std::min(emin, energy(c, problem));
  best.energy = emin;
  return best;
}

}  // namespace qanneal
