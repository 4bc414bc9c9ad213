#pragma once

// Path-integral Monte Carlo quantum annealing and fixed-parameter
// equilibrium sampling on the Trotter lattice.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qanneal/classical/anneal.hpp"
#include "qanneal/classical/schedule.hpp"
#include "qanneal/pimc/trotter.hpp"
#include "qanneal/run_record.hpp"

namespace qanneal {

struct QaParams {
  int m = 20;
  double temperature = 0.05;
  Schedule gamma = schedule::Linear{2.5, 1000.0};
  long sweeps = 1000;
  double gamma_floor = 1e-8;
  long trace_stride = 100;
  /// One classical Metropolis sweep per slice at temperature T after the
  /// schedule ends.
  bool polish = true;

  /// Accepted range for the product M T.
  static constexpr double kMinMT = 0.1;
  static constexpr double kMaxMT = 10.0;

  void validate() const {
    require(m >= 2, "QaParams: need M >= 2");
    require(temperature > 0.0, "QaParams: T must be positive");
    require(sweeps >= 1, "QaParams: need at least one sweep");
    require(gamma_floor > 0.0, "QaParams: Gamma floor must be positive");
    require(trace_stride >= 1, "QaParams: trace stride must be positive");
    const double mt = m * temperature;
    require(mt >= kMinMT && mt <= kMaxMT, "QaParams: M*T outside the supported band [0.1, 10]");
  }
};

/// Defaults: M = 20, T = 0.05 (M T = 1), Gamma linear from 2.5 to zero over
/// the sweep budget.
inline QaParams default_qa_params(long sweeps) {
  QaParams p;
  p.sweeps = sweeps;
  p.gamma = schedule::Linear{2.5, static_cast<double>(sweeps)};
  return p;
}

struct PimcResult {
  RunRecord record;
  /// Final configuration of every slice.
  std::vector<SpinConfig> slices;
};

namespace detail {

inline int best_slice(const TrotterLattice& lattice, double& best_energy) {
  int best = 0;
  best_energy = std::numeric_limits<double>::infinity();
  for (int k = 0; k < lattice.slices(); ++k) {
    const double e = lattice.slice_energy(k);
    if (e < best_energy) {
      best_energy = e;
      best = k;
    }
  }
  return best;
}

inline void polish_slices(TrotterLattice& lattice, double temperature, Rng& rng) {
  for (int k = 0; k < lattice.slices(); ++k) {
    for (int i = 0; i < lattice.sites(); ++i) {
      const double de = 2.0 * lattice.spin(i, k) * lattice.local_field(i, k);
      const double u = de > 0.0 ? rng.uniform() : 0.0;
      if (metropolis_accept(de, temperature, u)) lattice.flip(i, k);
    }
  }
}

}  // namespace detail

/// PIMC quantum annealing: one sweep visits every (site, slice) pair once at
/// Gamma(t) = max(schedule(t), floor). The reported energy is that of the
/// best slice after the optional polish sweep.
inline PimcResult pimc_anneal_full(const IsingProblem& problem, const QaParams& params, std::uint64_t seed) {
  params.validate();
  Rng rng(seed);
  auto gamma_at = [&](long t) { return std::max(schedule_value(params.gamma, static_cast<double>(t)), params.gamma_floor); };
  TrotterLattice lattice(problem, params.m, params.temperature, gamma_at(0));
  lattice.randomize(rng);

  PimcResult out;
  RunRecord& record = out.record;
  record.seed = seed;
  record.method = "pimc-quantum-annealing";
  record.schedule = describe(params.gamma);
  record.sweeps = params.sweeps;

  long accepted = 0;
  for (long t = 0; t < params.sweeps; ++t) {
    const double g = gamma_at(t);
    if (g != lattice.gamma()) lattice.set_gamma(g);
    accepted += pimc_sweep(lattice, rng);
    if (t % params.trace_stride == 0 || t == params.sweeps - 1) {
      double e = 0.0;
      const int k = detail::best_slice(lattice, e);
      record.trace.push_back({t, g, e, lattice.slice(k).magnetization(), lattice.inter_coupling()});
    }
  }

  if (params.polish) {
    lattice.set_gamma(params.gamma_floor);
    detail::polish_slices(lattice, params.temperature, rng);
  }

  double best_energy = 0.0;
  const int best = detail::best_slice(lattice, best_energy);
  double mean_energy = 0.0;
  for (int k = 0; k < lattice.slices(); ++k) {
    out.slices.push_back(lattice.slice(k));
    mean_energy += lattice.slice_energy(k);
  }
  record.final_config = lattice.slice(best);
  record.final_energy = energy(record.final_config, problem);
  record.extras["best_slice"] = best;
  record.extras["mean_slice_energy"] = mean_energy / lattice.slices();
  record.extras["trotter_slices"] = params.m;
  record.extras["temperature"] = params.temperature;
  record.extras["acceptance_rate"] =
      static_cast<double>(accepted) / (static_cast<double>(params.sweeps) * params.m * problem.size());
  return out;
}

inline RunRecord pimc_anneal(const IsingProblem& problem, const QaParams& params, std::uint64_t seed) {
  return pimc_anneal_full(problem, params, seed).record;
}

/// Best of `restarts` independent PIMC anneals (restart r uses seed mix_seed(seed, r)).
inline RunRecord pimc_anneal_best_of(const IsingProblem& problem, const QaParams& params, std::uint64_t seed,
                                     int restarts) {
  require(restarts >= 1, "pimc_anneal_best_of: need at least one restart");
  RunRecord best;
  for (int r = 0; r < restarts; ++r) {
    auto rec = pimc_anneal(problem, params, mix_seed(seed, static_cast<std::uint64_t>(r)));
    if (r == 0 || rec.final_energy < best.final_energy) best = std::move(rec);
  }
  best.extras["restarts"] = restarts;
  return best;
}

struct Estimate {
  double mean = 0.0;
  double error = 0.0;
};

/// Mean and binned standard error of a correlated series.
inline Estimate binned_estimate(const std::vector<double>& series, int bins = 32) {
  require(bins >= 2 && series.size() >= static_cast<std::size_t>(bins),
          "binned_estimate: need at least one sample per bin");
  const std::size_t per = series.size() / static_cast<std::size_t>(bins);
  std::vector<double> means(static_cast<std::size_t>(bins), 0.0);
  double total = 0.0;
  for (int b = 0; b < bins; ++b) {
    double s = 0.0;
    for (std::size_t k = 0; k < per; ++k) s += series[b * per + k];
    means[static_cast<std::size_t>(b)] = s / static_cast<double>(per);
    total += means[static_cast<std::size_t>(b)];
  }
  const double mean = total / bins;
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= (bins - 1);
  return {mean, std::sqrt(var / bins)};
}

struct EquilibriumOptions {
  /// Sweeps discarded before measuring.
  long thermalization = 1000;
  int bins = 32;
  /// When above the target field, the first half of the thermalization
  /// sweeps ramps Gamma linearly down from this value. Needed at small Gamma,
  /// where the large inter-slice coupling freezes a random start.
  double anneal_from = 0.0;
};

struct EquilibriumEstimate {
  /// <H_C>, the classical energy averaged over slices.
  Estimate energy;
  /// Site-averaged transverse magnetization <s^x>.
  Estimate transverse;
  /// <S_i S_j> for each bond, in problem bond order.
  std::vector<Estimate> bond_correlations;
  /// Mean classical energy of each slice.
  std::vector<Estimate> slice_energies;
  long samples = 0;
};

/// Fixed-(Gamma, T, M) sampling of the Trotter lattice. `sweeps` counts
/// measured sweeps; thermalization sweeps come first.
inline EquilibriumEstimate pimc_equilibrium_estimate(const IsingProblem& problem, double gamma, double temperature,
                                                     int m, long sweeps, std::uint64_t seed,
                                                     const EquilibriumOptions& options = {}) {
  require(sweeps >= options.bins, "pimc_equilibrium_estimate: need at least one sweep per bin");
  Rng rng(seed);
  TrotterLattice lattice(problem, m, temperature, gamma);
  lattice.randomize(rng);
  const long ramp = options.anneal_from > gamma ? options.thermalization / 2 : 0;
  for (long t = 0; t < options.thermalization; ++t) {
    if (t < ramp) lattice.set_gamma(options.anneal_from + (gamma - options.anneal_from) * t / static_cast<double>(ramp));
    else if (t == ramp) lattice.set_gamma(gamma);
    pimc_sweep(lattice, rng);
  }
  lattice.set_gamma(gamma);

  const double x = gamma / (m * temperature);
  const double same = std::tanh(x);
  const double differ = 1.0 / std::tanh(x);
  const int n = problem.size();
  const auto& bonds = problem.bonds();

  std::vector<double> energies, transverse;
  std::vector<std::vector<double>> slice_series(static_cast<std::size_t>(m));
  std::vector<std::vector<double>> bond_series(bonds.size());
  energies.reserve(static_cast<std::size_t>(sweeps));
  transverse.reserve(static_cast<std::size_t>(sweeps));

  for (long t = 0; t < sweeps; ++t) {
    pimc_sweep(lattice, rng);
    double e = 0.0;
    for (int k = 0; k < m; ++k) {
      const double ek = lattice.slice_energy(k);
      slice_series[static_cast<std::size_t>(k)].push_back(ek);
      e += ek;
    }
    energies.push_back(e / m);

    double sx = 0.0;
    for (int k = 0; k < m; ++k) {
      const int up = k + 1 == m ? 0 : k + 1;
      for (int i = 0; i < n; ++i) sx += lattice.spin(i, k) == lattice.spin(i, up) ? same : differ;
    }
    transverse.push_back(sx / (static_cast<double>(m) * n));

    for (std::size_t b = 0; b < bonds.size(); ++b) {
      double c = 0.0;
      for (int k = 0; k < m; ++k) c += lattice.spin(bonds[b].i, k) * lattice.spin(bonds[b].j, k);
      bond_series[b].push_back(c / m);
    }
  }

  EquilibriumEstimate out;
  out.samples = sweeps;
  out.energy = binned_estimate(energies, options.bins);
  out.transverse = binned_estimate(transverse, options.bins);
  for (const auto& s : bond_series) out.bond_correlations.push_back(binned_estimate(s, options.bins));
  for (const auto& s : slice_series) out.slice_energies.push_back(binned_estimate(s, options.bins));
  return out;
}

}  // namespace qanneal
