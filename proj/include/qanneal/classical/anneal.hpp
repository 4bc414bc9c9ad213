#pragma once

// Single-spin Metropolis simulated annealing.

#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "qanneal/classical/schedule.hpp"
#include "qanneal/rng.hpp"
#include "qanneal/run_record.hpp"
#include "qanneal/spin/ising_problem.hpp"

namespace qanneal {

/// u < min{1, exp(-ΔE/T)}; at T = 0 only non-uphill moves pass.
inline bool metropolis_accept(double delta_e, double temperature, double u) noexcept {
  if (delta_e <= 0.0) return true;
  if (temperature <= 0.0) return false;
  return u < std::exp(-delta_e / temperature);
}

struct AnnealOptions {
  long trace_stride = 100;
  /// Visit sites in a fresh random permutation each sweep instead of 0..N-1.
  bool random_order = false;
  /// Start from this configuration instead of a random one.
  std::optional<SpinConfig> initial;
};

/// τ sweeps of Metropolis at T = schedule_value(t) for sweep t = 0..τ-1.
/// The trace holds the state after sweeps t with t % stride == 0 and after the
/// last sweep.
inline RunRecord anneal(const IsingProblem& problem, const Schedule& schedule, long sweeps, std::uint64_t seed,
                        const AnnealOptions& options = {}) {
  require(sweeps >= 1, "anneal: need at least one sweep");
  require(options.trace_stride >= 1, "anneal: trace stride must be positive");
  const int n = problem.size();
  Rng rng(seed);
  SpinConfig config = options.initial ? *options.initial : SpinConfig::random(static_cast<std::size_t>(n), rng);
  require(config.size() == static_cast<std::size_t>(n), "anneal: initial configuration has the wrong length");

  RunRecord record;
  record.seed = seed;
  record.method = "classical-annealing";
  record.schedule = describe(schedule);
  record.sweeps = sweeps;

  double e = energy(config, problem);
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  long accepted = 0;

  for (long t = 0; t < sweeps; ++t) {
    const double temperature = schedule_value(schedule, static_cast<double>(t));
    if (options.random_order) {
      for (int k = n - 1; k > 0; --k) std::swap(order[k], order[rng.below(static_cast<std::uint64_t>(k) + 1)]);
    }
    for (int k = 0; k < n; ++k) {
      const int i = order[k];
      const double de = problem.flip_delta(config, i);
      const double u = de > 0.0 && temperature > 0.0 ? rng.uniform() : 0.0;
      if (metropolis_accept(de, temperature, u)) {
        config.flip(static_cast<std::size_t>(i));
        e += de;
        ++accepted;
      }
    }
    if (t % options.trace_stride == 0 || t == sweeps - 1)
      record.trace.push_back({t, temperature, e, config.magnetization()});
  }

  record.final_energy = energy(config, problem);
  record.final_config = std::move(config);
  record.extras["acceptance_rate"] = static_cast<double>(accepted) / (static_cast<double>(sweeps) * n);
  return record;
}

/// Best of `restarts` independent anneals (restart r uses seed mix_seed(seed, r)).
inline RunRecord anneal_best_of(const IsingProblem& problem, const Schedule& schedule, long sweeps,
                                std::uint64_t seed, int restarts, const AnnealOptions& options = {}) {
  require(restarts >= 1, "anneal_best_of: need at least one restart");
  RunRecord best;
  for (int r = 0; r < restarts; ++r) {
    auto rec = anneal(problem, schedule, sweeps, mix_seed(seed, static_cast<std::uint64_t>(r)), options);
    if (r == 0 || rec.final_energy < best.final_energy) best = std::move(rec);
  }
  best.extras["restarts"] = restarts;
  return best;
}

}  // namespace qanneal
