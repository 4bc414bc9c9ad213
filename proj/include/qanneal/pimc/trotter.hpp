#pragma once

// Suzuki-Trotter mapping of a transverse-field Ising problem
//
//   H = - sum J_ij s^z_i s^z_j - sum h_i s^z_i - Gamma sum s^x_i
//
// onto M coupled classical replicas. In units where the Metropolis
// temperature is 1, the effective classical energy is
//
//   E_eff = - sum_k sum_<ij> K_ij S_ik S_jk - sum_k sum_i (h_i / MT) S_ik
//           - K sum_k sum_i S_ik S_i,k+1
//
// with K_ij = J_ij / (M T), K = 1/2 ln coth(Gamma / (M T)), and slice M+1
// identified with slice 1. The periodic link term is counted once per
// (site, slice) pair, so for M = 2 each site carries two identical links.

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qanneal/error.hpp"
#include "qanneal/rng.hpp"
#include "qanneal/spin/ising_problem.hpp"

namespace qanneal {

/// K = 1/2 ln coth(x) for x = Gamma / (M T) > 0, written to stay accurate for
/// large x where coth(x) - 1 underflows.
inline double inter_slice_coupling(double gamma, double temperature, int m) {
  require(gamma > 0.0, "inter_slice_coupling: Gamma must be positive (clamp to a floor)");
  require(temperature > 0.0, "inter_slice_coupling: T must be positive");
  require(m >= 2, "inter_slice_coupling: need M >= 2");
  const double x = gamma / (m * temperature);
  // coth x = 1 + 2 / (e^{2x} - 1)
  return 0.5 * std::log1p(2.0 / std::expm1(2.0 * x));
}

/// (K_ij, K) for one bond.
inline std::pair<double, double> trotter_couplings(double J, double gamma, double temperature, int m) {
  const double k = inter_slice_coupling(gamma, temperature, m);
  return {J / (m * temperature), k};
}

class TrotterLattice {
 public:
  TrotterLattice(const IsingProblem& problem, int m, double temperature, double gamma)
      : problem_(&problem), m_(m), n_(problem.size()), temperature_(temperature) {
    require(m >= 2, "TrotterLattice: need M >= 2");
    require(temperature > 0.0, "TrotterLattice: T must be positive");
    scale_ = 1.0 / (m * temperature);
    spins_.assign(static_cast<std::size_t>(m) * n_, 1);
    set_gamma(gamma);
  }

  /// All slices set to copies of `config`.
  void fill(const SpinConfig& config) {
    require(config.size() == static_cast<std::size_t>(n_), "TrotterLattice::fill: wrong configuration length");
    for (int k = 0; k < m_; ++k)
      for (int i = 0; i < n_; ++i) at(i, k) = static_cast<std::int8_t>(config[static_cast<std::size_t>(i)]);
  }

  void randomize(Rng& rng) {
    for (auto& s : spins_) s = static_cast<std::int8_t>(rng.spin());
  }

  void set_slice(int k, const SpinConfig& config) {
    require(config.size() == static_cast<std::size_t>(n_), "TrotterLattice::set_slice: wrong configuration length");
    for (int i = 0; i < n_; ++i) at(i, k) = static_cast<std::int8_t>(config[static_cast<std::size_t>(i)]);
  }

  /// Updates Gamma and refreshes the inter-slice coupling.
  void set_gamma(double gamma) {
    gamma_ = gamma;
    k_ = inter_slice_coupling(gamma, temperature_, m_);
  }

  const IsingProblem& problem() const noexcept { return *problem_; }
  int slices() const noexcept { return m_; }
  int sites() const noexcept { return n_; }
  double temperature() const noexcept { return temperature_; }
  double gamma() const noexcept { return gamma_; }
  /// Inter-slice coupling K.
  double inter_coupling() const noexcept { return k_; }
  /// 1 / (M T), the factor multiplying J_ij and h_i.
  double intra_scale() const noexcept { return scale_; }

  int spin(int i, int k) const noexcept { return spins_[static_cast<std::size_t>(k) * n_ + i]; }
  void flip(int i, int k) noexcept { at(i, k) = static_cast<std::int8_t>(-at(i, k)); }

  SpinConfig slice(int k) const {
    std::vector<std::int8_t> s(spins_.begin() + static_cast<std::ptrdiff_t>(k) * n_,
                               spins_.begin() + static_cast<std::ptrdiff_t>(k + 1) * n_);
    return SpinConfig(std::move(s));
  }

  /// sum_j J_ij S_jk + h_i within slice k.
  double local_field(int i, int k) const noexcept {
    const std::int8_t* row = spins_.data() + static_cast<std::size_t>(k) * n_;
    const auto nb = problem_->neighbors(i);
    const auto J = problem_->neighbor_couplings(i);
    double f = problem_->fields()[static_cast<std::size_t>(i)];
    for (std::size_t a = 0; a < nb.size(); ++a) f += J[a] * row[nb[a]];
    return f;
  }

  /// Change in E_eff from flipping (i, k).
  double flip_delta(int i, int k) const noexcept {
    const int up = k + 1 == m_ ? 0 : k + 1;
    const int down = k == 0 ? m_ - 1 : k - 1;
    return 2.0 * spin(i, k) * (scale_ * local_field(i, k) + k_ * (spin(i, up) + spin(i, down)));
  }

  /// Classical energy of slice k under the original problem.
  double slice_energy(int k) const {
    const std::int8_t* row = spins_.data() + static_cast<std::size_t>(k) * n_;
    double e = 0.0;
    for (const auto& b : problem_->bonds()) e -= b.J * row[b.i] * row[b.j];
    const auto& h = problem_->fields();
    for (int i = 0; i < n_; ++i) e -= h[static_cast<std::size_t>(i)] * row[i];
    return e;
  }

  /// Random permutation of the slice indices, reusing an internal buffer.
  std::span<const int> shuffled_slice_order(Rng& rng) {
    order_.resize(static_cast<std::size_t>(m_));
    for (int k = 0; k < m_; ++k) order_[static_cast<std::size_t>(k)] = k;
    for (int k = m_ - 1; k > 0; --k)
      std::swap(order_[static_cast<std::size_t>(k)], order_[rng.below(static_cast<std::uint64_t>(k) + 1)]);
    return order_;
  }

  /// sum_{i,k} S_ik S_i,k+1 with the periodic slice boundary.
  long link_sum() const noexcept {
    long s = 0;
    for (int k = 0; k < m_; ++k) {
      const int up = k + 1 == m_ ? 0 : k + 1;
      for (int i = 0; i < n_; ++i) s += spin(i, k) * spin(i, up);
    }
    return s;
  }

 private:
  std::int8_t& at(int i, int k) noexcept { return spins_[static_cast<std::size_t>(k) * n_ + i]; }

  const IsingProblem* problem_;
  int m_;
  int n_;
  double temperature_;
  double scale_ = 0.0;
  double gamma_ = 0.0;
  double k_ = 0.0;
  std::vector<std::int8_t> spins_;
  std::vector<int> order_;
};

/// The dimensionless (d+1)-dimensional classical energy E_eff.
inline double effective_energy(const TrotterLattice& lattice) {
  double classical = 0.0;
  for (int k = 0; k < lattice.slices(); ++k) classical += lattice.slice_energy(k);
  return lattice.intra_scale() * classical - lattice.inter_coupling() * static_cast<double>(lattice.link_sum());
}

/// One Metropolis sweep at unit temperature over all (site, slice) pairs.
/// Slices are visited in a fresh random order each sweep, sites within a
/// slice sequentially. A fixed slice order is not ergodic: zero-cost kink
/// moves are then carried deterministically along the sweep and the chain
/// locks into kink-rich cycles. Returns the number of accepted flips.
inline long pimc_sweep(TrotterLattice& lattice, Rng& rng) {
  long accepted = 0;
  const int n = lattice.sites();
  for (int k : lattice.shuffled_slice_order(rng)) {
    for (int i = 0; i < n; ++i) {
      const double de = lattice.flip_delta(i, k);
      if (de <= 0.0 || rng.uniform() < std::exp(-de)) {
        lattice.flip(i, k);
        ++accepted;
      }
    }
  }
  return accepted;
}

}  // namespace qanneal
