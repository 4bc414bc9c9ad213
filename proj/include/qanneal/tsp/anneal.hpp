#pragma once

// Classical and path-integral quantum annealing of TSP tours with 2-opt
// moves. A sweep is N proposals per tour; PIMC sweeps cover every slice.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qanneal/classical/schedule.hpp"
#include "qanneal/pimc/pimc.hpp"
#include "qanneal/pimc/trotter.hpp"
#include "qanneal/rng.hpp"
#include "qanneal/run_record.hpp"
#include "qanneal/tsp/tour.hpp"

namespace qanneal {

/// Tours have no magnetization; trace points carry NaN in that column.
inline constexpr double kNoMagnetization = std::numeric_limits<double>::quiet_NaN();

struct TspRun {
  RunRecord record;
  Tour best;
};

/// Exponential cooling from T = 2 to T = 0.005, sized for edge lengths of
/// order one (sqrt(N) box or uniform(0, 1) distances).
inline Schedule default_ca_tsp_schedule(long sweeps) {
  return exponential_between(2.0, 0.005, static_cast<double>(sweeps));
}

/// M = 20, T = 0.015 (slice temperature M T = 0.3), Gamma linear from 0.3.
inline QaParams default_tsp_qa_params(long sweeps) {
  QaParams p;
  p.m = 20;
  p.temperature = 0.015;
  p.sweeps = sweeps;
  p.gamma = schedule::Linear{0.3, static_cast<double>(sweeps)};
  return p;
}

struct CaTspOptions {
  long trace_stride = 100;
  /// Start from this tour instead of a random permutation.
  std::optional<Tour> initial;
};

namespace detail {

/// Metropolis on a length change at temperature T. At T = 0 only strictly
/// shorter tours pass, so 2-opt local optima are fixed points.
inline bool tsp_accept(double delta, double temperature, Rng& rng) {
  if (delta < 0.0) return true;
  if (temperature <= 0.0) return false;
  return rng.uniform() < std::exp(-delta / temperature);
}

inline void finish_tsp_record(RunRecord& r, const Tour& best, const TspInstance& inst) {
  r.final_energy = best.length();
  r.extras["best_length"] = best.length();
  if (inst.metric() == TspMetric::euclidean_2d) r.extras["omega"] = omega(best.length(), inst.size(), inst.metric());
}

}  // namespace detail

/// Metropolis over random 2-opt moves with T(t) from the schedule for
/// `sweeps` sweeps. The record holds the best tour seen at sweep ends.
inline TspRun ca_tsp(const TspInstance& inst, const Schedule& schedule, long sweeps, std::uint64_t seed,
                     const CaTspOptions& options = {}) {
  require(sweeps >= 1, "ca_tsp: need at least one sweep");
  require(options.trace_stride >= 1, "ca_tsp: trace stride must be positive");
  Rng rng(seed);
  Tour tour = options.initial ? *options.initial : random_tour(inst, rng);
  require(tour.size() == inst.size(), "ca_tsp: initial tour does not match the instance");
  tour.refresh_length(inst);
  Tour best = tour;

  RunRecord record;
  record.seed = seed;
  record.method = "ca-tsp";
  record.schedule = describe(schedule);
  record.sweeps = sweeps;

  const int n = inst.size();
  long accepted = 0;
  for (long t = 0; t < sweeps; ++t) {
    const double temperature = schedule_value(schedule, static_cast<double>(t));
    if (n >= 4) {
      for (int s = 0; s < n; ++s) {
        const TwoOptMove m = random_two_opt_move(tour, rng);
        const double d = tour.delta(m, inst);
        if (detail::tsp_accept(d, temperature, rng)) {
          tour.apply(m, d);
          ++accepted;
        }
      }
      tour.refresh_length(inst);
    }
    if (tour.length() < best.length()) best = tour;
    if (t % options.trace_stride == 0 || t == sweeps - 1)
      record.trace.push_back({t, temperature, tour.length(), kNoMagnetization});
  }

  record.extras["acceptance_rate"] = static_cast<double>(accepted) / (static_cast<double>(sweeps) * n);
  record.extras["final_length"] = tour.length();
  detail::finish_tsp_record(record, best, inst);
  return {std::move(record), std::move(best)};
}

struct PimcTspOptions {
  /// Start every slice from this tour instead of independent random tours.
  std::optional<Tour> initial;
};

namespace detail {

inline int edge_sign(const Tour& t, int u, int v) noexcept { return t.has_edge(u, v) ? 1 : -1; }

}  // namespace detail

/// Path-integral QA on M tour replicas. The Trotter weight is
/// exp(-sum_k L_k / (M T) + K sum_k sum_{i<j} S_ij^k S_ij^{k+1}) with
/// S_ij = +1 for a tour edge and -1 otherwise, and K = 1/2 ln coth(Gamma/(M T)).
/// Only M >= 2, T > 0 and a positive Gamma floor are required; the M T band of
/// QaParams::validate is an Ising-scale choice and is not enforced here.
inline TspRun pimc_tsp(const TspInstance& inst, const QaParams& params, std::uint64_t seed,
                       const PimcTspOptions& options = {}) {
  require(params.m >= 2, "pimc_tsp: need M >= 2");
  require(params.temperature > 0.0, "pimc_tsp: T must be positive");
  require(params.sweeps >= 1, "pimc_tsp: need at least one sweep");
  require(params.gamma_floor > 0.0, "pimc_tsp: Gamma floor must be positive");
  require(params.trace_stride >= 1, "pimc_tsp: trace stride must be positive");

  Rng rng(seed);
  const int n = inst.size();
  const int m = params.m;
  const double mt = m * params.temperature;

  std::vector<Tour> slices;
  slices.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    if (options.initial) {
      require(options.initial->size() == n, "pimc_tsp: initial tour does not match the instance");
      slices.push_back(*options.initial);
    } else {
      slices.push_back(random_tour(inst, rng));
    }
  }

  RunRecord record;
  record.seed = seed;
  record.method = "pimc-tsp";
  record.schedule = describe(params.gamma);
  record.sweeps = params.sweeps;

  auto best_slice = [&]() {
    int b = 0;
    for (int k = 1; k < m; ++k)
      if (slices[static_cast<std::size_t>(k)].length() < slices[static_cast<std::size_t>(b)].length()) b = k;
    return b;
  };
  Tour best = slices[static_cast<std::size_t>(best_slice())];

  std::vector<int> slice_order(static_cast<std::size_t>(m));
  long accepted = 0;
  double k_coupling = 0.0;
  for (long t = 0; t < params.sweeps; ++t) {
    const double gamma = std::max(schedule_value(params.gamma, static_cast<double>(t)), params.gamma_floor);
    k_coupling = inter_slice_coupling(gamma, params.temperature, m);
    for (int k = 0; k < m; ++k) slice_order[static_cast<std::size_t>(k)] = k;
    for (int k = m - 1; k > 0; --k)
      std::swap(slice_order[static_cast<std::size_t>(k)], slice_order[rng.below(static_cast<std::uint64_t>(k) + 1)]);

    if (n >= 4) {
      for (int k : slice_order) {
        Tour& tour = slices[static_cast<std::size_t>(k)];
        const Tour& down = slices[static_cast<std::size_t>(k == 0 ? m - 1 : k - 1)];
        const Tour& up = slices[static_cast<std::size_t>(k + 1 == m ? 0 : k + 1)];
        for (int s = 0; s < n; ++s) {
          const TwoOptMove mv = random_two_opt_move(tour, rng);
          const double dl = tour.delta(mv, inst);
          const int i = tour.city(mv.a), j = tour.city(mv.a + 1), c = tour.city(mv.b), l = tour.city(mv.b + 1);
          auto neighbours = [&](int u, int v) { return detail::edge_sign(down, u, v) + detail::edge_sign(up, u, v); };
          // Removed edges flip +1 -> -1, added edges -1 -> +1.
          const int link_change = 2 * (neighbours(i, c) + neighbours(j, l) - neighbours(i, j) - neighbours(c, l));
          const double de = dl / mt - k_coupling * link_change;
          if (de <= 0.0 || rng.uniform() < std::exp(-de)) {
            tour.apply(mv, dl);
            ++accepted;
          }
        }
        tour.refresh_length(inst);
      }
    }

    const int b = best_slice();
    if (slices[static_cast<std::size_t>(b)].length() < best.length()) best = slices[static_cast<std::size_t>(b)];
    if (t % params.trace_stride == 0 || t == params.sweeps - 1) {
      record.trace.push_back({t, gamma, slices[static_cast<std::size_t>(b)].length(), kNoMagnetization, k_coupling});
    }
  }

  if (params.polish && n >= 4) {
    for (auto& tour : slices) {
      for (int s = 0; s < n; ++s) {
        const TwoOptMove mv = random_two_opt_move(tour, rng);
        const double dl = tour.delta(mv, inst);
        if (detail::tsp_accept(dl, params.temperature, rng)) tour.apply(mv, dl);
      }
      tour.refresh_length(inst);
    }
    const int b = best_slice();
    if (slices[static_cast<std::size_t>(b)].length() < best.length()) best = slices[static_cast<std::size_t>(b)];
  }

  double mean = 0.0;
  for (const auto& s : slices) mean += s.length();
  record.extras["acceptance_rate"] =
      static_cast<double>(accepted) / (static_cast<double>(params.sweeps) * n * m);
  record.extras["mean_slice_length"] = mean / m;
  record.extras["final_coupling"] = k_coupling;
  detail::finish_tsp_record(record, best, inst);
  return {std::move(record), std::move(best)};
}

}  // namespace qanneal
