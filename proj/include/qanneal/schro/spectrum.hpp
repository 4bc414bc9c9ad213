#pragma once

// Low-lying spectra, gaps, the adiabatic factor and exact thermal averages.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "qanneal/error.hpp"
#include "qanneal/format.hpp"
#include "qanneal/rng.hpp"
#include "qanneal/schro/hamiltonian.hpp"

namespace qanneal {

struct Spectrum {
  double e0 = 0.0;
  double e1 = 0.0;
  double gap = 0.0;
  RealVector ground;
  RealVector excited;
};

/// Dimensions up to this use dense diagonalization; larger ones Lanczos.
inline constexpr Eigen::Index kDenseSpectrumLimit = 1024;

struct LanczosOptions {
  int krylov = 200;
  int max_restarts = 50;
  double tolerance = 1e-10;
  std::uint64_t seed = 0x5eed;
};

/// Lowest eigenpair of H(s) restricted to the orthogonal complement of
/// `deflate` (orthonormal vectors). Explicitly restarted Lanczos with full
/// reorthogonalization and a random start vector.
inline std::pair<double, RealVector> lanczos_lowest(const Hamiltonian& h, double s,
                                                    const std::vector<RealVector>& deflate = {},
                                                    const LanczosOptions& opt = {}) {
  const Eigen::Index dim = h.dim;
  require(static_cast<Eigen::Index>(deflate.size()) < dim, "lanczos_lowest: deflation leaves no space");
  auto project = [&](RealVector& v) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& d : deflate) v -= d.dot(v) * d;
  };

  Rng rng(opt.seed);
  RealVector start(dim);
  for (Eigen::Index i = 0; i < dim; ++i) start[i] = rng.uniform() - 0.5;
  project(start);
  start.normalize();

  const int kmax = static_cast<int>(std::min<Eigen::Index>(opt.krylov, dim - static_cast<Eigen::Index>(deflate.size())));
  double theta = 0.0;
  RealVector ritz = start;
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    std::vector<RealVector> q{start};
    std::vector<double> alpha, beta;
    RealVector w(dim);
    bool converged = false;
    for (int j = 0; j < kmax; ++j) {
      h.apply_real(s, q[static_cast<std::size_t>(j)], w);
      const double a = q[static_cast<std::size_t>(j)].dot(w);
      alpha.push_back(a);
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& v : q) w -= v.dot(w) * v;
        for (const auto& d : deflate) w -= d.dot(w) * d;
      }
      const double b = w.norm();

      const int m = static_cast<int>(alpha.size());
      if ((m % 10 == 0) || j + 1 == kmax || b < 1e-13) {
        Eigen::VectorXd diag = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd off = m > 1 ? Eigen::VectorXd(Eigen::Map<Eigen::VectorXd>(beta.data(), m - 1)) : Eigen::VectorXd();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
        theta = tri.eigenvalues()[0];
        const Eigen::VectorXd y = tri.eigenvectors().col(0);
        const double residual = std::abs(b * y[m - 1]);
        ritz.setZero();
        for (int k = 0; k < m; ++k) ritz += y[k] * q[static_cast<std::size_t>(k)];
        ritz.normalize();
        if (residual <= opt.tolerance * std::max(1.0, std::abs(theta)) || b < 1e-13) {
          converged = true;
          break;
        }
      }
      beta.push_back(b);
      q.push_back(w / b);
    }
    if (converged) {
      // Final Rayleigh quotient on the assembled vector.
      RealVector hv = h(s, ritz);
      return {ritz.dot(hv), ritz};
    }
    start = ritz;
  }
  throw ConvergenceError("lanczos_lowest: no convergence within the restart cap");
}

namespace detail {

/// Norm of the projection of v onto the eigenspace of `values[k]`, grouping
/// eigenvalues within `tol`.
inline double eigenspace_projection_norm(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es, Eigen::Index k,
                                         const RealVector& v, double tol) {
  const auto& ev = es.eigenvalues();
  double sq = 0.0;
  for (Eigen::Index j = 0; j < ev.size(); ++j) {
    if (j == 0 && k != 0) continue;
    if (std::abs(ev[j] - ev[k]) <= tol) {
      const double c = es.eigenvectors().col(j).dot(v);
      sq += c * c;
    }
  }
  return std::sqrt(sq);
}

}  // namespace detail

/// Lowest two eigenvalues of H(s) with their eigenvectors. Degenerate ground
/// levels give gap 0.
inline Spectrum spectrum_and_gap(const Hamiltonian& h, double s, const LanczosOptions& opt = {}) {
  require(h.dim >= 2, "spectrum_and_gap: need dimension >= 2");
  Spectrum out;
  if (h.dim <= kDenseSpectrumLimit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_matrix(h, s));
    out.e0 = es.eigenvalues()[0];
    out.e1 = es.eigenvalues()[1];
    out.ground = es.eigenvectors().col(0);
    out.excited = es.eigenvectors().col(1);
  } else {
    auto [e0, v0] = lanczos_lowest(h, s, {}, opt);
    auto [e1, v1] = lanczos_lowest(h, s, {v0}, opt);
    out.e0 = e0;
    out.e1 = e1;
    out.ground = std::move(v0);
    out.excited = std::move(v1);
  }
  out.gap = std::max(0.0, out.e1 - out.e0);
  return out;
}

/// E1 - E0 at s without eigenvectors on the dense path.
inline double gap_at(const Hamiltonian& h, double s) {
  if (h.dim > kDenseSpectrumLimit) return spectrum_and_gap(h, s).gap;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_matrix(h, s), Eigen::EigenvaluesOnly);
  return std::max(0.0, es.eigenvalues()[1] - es.eigenvalues()[0]);
}

struct GapMinimum {
  double s = 0.0;
  double gap = 0.0;
};

/// Minimum of the gap over s in [lo, hi]: a uniform scan followed by golden
/// section refinement around the best grid point.
inline GapMinimum minimum_gap(const Hamiltonian& h, double lo = 0.0, double hi = 1.0, int grid = 101,
                              double tol = 1e-9) {
  require(grid >= 3 && hi > lo, "minimum_gap: need grid >= 3 and hi > lo");
  int best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  const double step = (hi - lo) / (grid - 1);
  for (int k = 0; k < grid; ++k) {
    const double g = gap_at(h, lo + k * step);
    if (g < best_gap) {
      best_gap = g;
      best = k;
    }
  }
  double a = lo + std::max(0, best - 1) * step;
  double b = lo + std::min(grid - 1, best + 1) * step;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = gap_at(h, c), fd = gap_at(h, d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = gap_at(h, c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = gap_at(h, d);
    }
  }
  const double sm = 0.5 * (a + b);
  const double gm = gap_at(h, sm);
  if (gm <= best_gap) return {sm, gm};
  return {lo + best * step, best_gap};
}

inline constexpr double kDerivativeStep = 1e-5;
inline constexpr double kDegenerateGap = 1e-12;

/// max_s |<phi0| dH/ds |phi1>| / min_s Delta^2 over the grid, with dH/ds by
/// central differences. When the first excited level is degenerate the
/// matrix element is the norm of the projection of dH/ds |phi0> onto that
/// level. Returns +infinity when the gap closes on the grid.
inline double adiabatic_factor(const Hamiltonian& h, const std::vector<double>& s_grid) {
  require(!s_grid.empty(), "adiabatic_factor: empty grid");
  require(h.dim <= kDenseSpectrumLimit, "adiabatic_factor: dense spectra only (dimension <= 1024)");
  double numerator = 0.0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (double s : s_grid) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_matrix(h, s));
    const auto& ev = es.eigenvalues();
    const double gap = ev[1] - ev[0];
    min_gap = std::min(min_gap, gap);
    if (gap < kDegenerateGap) return std::numeric_limits<double>::infinity();
    const RealVector phi0 = es.eigenvectors().col(0);
    const RealVector dh = (h(s + kDerivativeStep, phi0) - h(s - kDerivativeStep, phi0)) / (2.0 * kDerivativeStep);
    const double tol = 1e-9 * std::max(1.0, std::abs(ev[1]));
    numerator = std::max(numerator, detail::eigenspace_projection_norm(es, 1, dh, tol));
  }
  return numerator / (min_gap * min_gap);
}

inline std::vector<double> uniform_grid(double lo, double hi, int points) {
  require(points >= 2, "uniform_grid: need at least two points");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
  return g;
}

/// Columnar dump `s E0 E1 gap` over a grid of s values.
inline void write_spectrum_table(std::ostream& os, const Hamiltonian& h, const std::vector<double>& s_grid) {
  os << "s E0 E1 gap\n";
  for (double s : s_grid) {
    const Spectrum sp = spectrum_and_gap(h, s);
    os << format_double(s) << ' ' << format_double(sp.e0) << ' ' << format_double(sp.e1) << ' '
       << format_double(sp.gap) << '\n';
  }
}

struct ThermalAverages {
  /// <H_C>
  double classical_energy = 0.0;
  /// <H>
  double total_energy = 0.0;
  /// Site-averaged <sigma^x>.
  double transverse = 0.0;
};

/// Exact thermal averages of the TIM at temperature T by full
/// diagonalization (N <= 12).
inline ThermalAverages exact_thermal_average(const IsingProblem& problem, double gamma, double temperature) {
  require(temperature > 0.0, "exact_thermal_average: T must be positive");
  const Eigen::MatrixXd hm = build_tim_matrix(problem, gamma);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hm);
  const auto& ev = es.eigenvalues();
  const RealVector w = (-(ev.array() - ev[0]) / temperature).exp().matrix();
  const double z = w.sum();
  const RealVector diag = hm.diagonal();
  const int n = problem.size();
  ThermalAverages out;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    const RealVector v = es.eigenvectors().col(k);
    const double ec = v.cwiseProduct(v).dot(diag);
    out.classical_energy += w[k] * ec;
    out.total_energy += w[k] * ev[k];
  }
  out.classical_energy /= z;
  out.total_energy /= z;
  // <H> = <H_C> - Gamma sum <sigma^x>.
  if (gamma != 0.0) {
    out.transverse = (out.classical_energy - out.total_energy) / (gamma * n);
  } else {
    double sx = 0.0;
    for (Eigen::Index k = 0; k < ev.size(); ++k) {
      const RealVector v = es.eigenvectors().col(k);
      double t = 0.0;
      for (Eigen::Index b = 0; b < v.size(); ++b)
        for (int q = 0; q < n; ++q) t += v[b] * v[b ^ (Eigen::Index{1} << q)];
      sx += w[k] * t;
    }
    out.transverse = sx / (z * n);
  }
  return out;
}

}  // namespace qanneal
