#pragma once

// Time-dependent Schrodinger integration (hbar = 1), the reduced spatial
// search, minimum-time bisection and two-level closed forms.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <numbers>
#include <ostream>
#include <vector>

#include "qanneal/error.hpp"
#include "qanneal/format.hpp"
#include "qanneal/schro/hamiltonian.hpp"

namespace qanneal {

using Complex = std::complex<double>;

inline ComplexVector uniform_state(Eigen::Index dim) {
  require(dim >= 1, "uniform_state: need dimension >= 1");
  return ComplexVector::Constant(dim, Complex(1.0 / std::sqrt(static_cast<double>(dim)), 0.0));
}

inline ComplexVector basis_state(Eigen::Index dim, Eigen::Index k) {
  require(k >= 0 && k < dim, "basis_state: index out of range");
  ComplexVector v = ComplexVector::Zero(dim);
  v[k] = 1.0;
  return v;
}

/// Total probability on the listed basis states.
inline double probability_on(const ComplexVector& psi, const std::vector<Eigen::Index>& targets) {
  double p = 0.0;
  for (auto k : targets) p += std::norm(psi[k]);
  return p;
}

/// Basis states at the minimum of a diagonal (the classical ground states).
inline std::vector<Eigen::Index> minimizers(const RealVector& d, double tol = 1e-9) {
  const double lo = d.minCoeff();
  std::vector<Eigen::Index> out;
  for (Eigen::Index b = 0; b < d.size(); ++b)
    if (d[b] <= lo + tol) out.push_back(b);
  return out;
}

struct EvolutionSample {
  double t = 0.0;
  double p_target = 0.0;
  /// Norm before renormalization.
  double norm = 1.0;
};

struct EvolveOptions {
  /// RK4 steps; 0 picks the default from the Hamiltonian's norm bound.
  long steps = 0;
  std::vector<Eigen::Index> targets;
  /// Record a trace sample every this many steps (0 disables the trace).
  long trace_stride = 0;
  bool renormalize = true;
};

struct EvolveResult {
  ComplexVector state;
  std::vector<EvolutionSample> trace;
  long steps = 0;
  /// Accumulated |norm - 1| before renormalization, divided by the total time.
  double norm_drift_rate = 0.0;
};

/// Default step count: lambda dt close to 0.02 with lambda the norm bound.
inline constexpr double kStepScale = 0.02;

inline long default_steps(const Hamiltonian& h, double tau) {
  const double n = std::ceil(tau * std::max(h.norm_bound, 1.0) / kStepScale);
  return std::max(1L, static_cast<long>(n));
}

/// Norm deviations beyond this after a single step are treated as blowup.
inline constexpr double kBlowupThreshold = 1e-2;

/// Integrates i dpsi/dt = H(t / tau) psi over [0, tau] with classical RK4.
/// Constant Hamiltonians ignore s, so tau is then just the total time.
inline EvolveResult evolve(const Hamiltonian& h, double tau, const ComplexVector& psi0, const EvolveOptions& opt = {}) {
  require(tau >= 0.0, "evolve: total time must be non-negative");
  require(psi0.size() == h.dim, "evolve: state dimension mismatch");
  require(std::abs(psi0.norm() - 1.0) <= 1e-10, "evolve: initial state must be normalized");
  const long steps = opt.steps > 0 ? opt.steps : default_steps(h, tau);
  const double dt = tau / static_cast<double>(steps);
  const Complex mi(0.0, -1.0);

  EvolveResult out;
  out.steps = steps;
  out.state = psi0;
  ComplexVector& psi = out.state;
  ComplexVector k1(h.dim), k2(h.dim), k3(h.dim), k4(h.dim), tmp(h.dim);
  auto rhs = [&](double t, const ComplexVector& x, ComplexVector& y) {
    h.apply_complex(tau > 0.0 ? t / tau : 0.0, x, y);
    y *= mi;
  };
  auto sample = [&](double t, double norm) {
    out.trace.push_back({t, probability_on(psi, opt.targets), norm});
  };
  if (opt.trace_stride > 0) sample(0.0, psi.norm());

  double drift = 0.0;
  for (long n = 0; n < steps; ++n) {
    const double t = n * dt;
    rhs(t, psi, k1);
    tmp = psi + (0.5 * dt) * k1;
    rhs(t + 0.5 * dt, tmp, k2);
    tmp = psi + (0.5 * dt) * k2;
    rhs(t + 0.5 * dt, tmp, k3);
    tmp = psi + dt * k3;
    rhs(t + dt, tmp, k4);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    const double norm = psi.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > kBlowupThreshold)
      throw ConvergenceError("evolve: norm blowup, step size too large for this Hamiltonian");
    drift += std::abs(norm - 1.0);
    if (opt.renormalize) psi /= norm;
    if (opt.trace_stride > 0 && ((n + 1) % opt.trace_stride == 0 || n + 1 == steps)) sample(t + dt, norm);
  }
  out.norm_drift_rate = tau > 0.0 ? drift / tau : 0.0;
  return out;
}

/// Squared overlap of psi with the ground state of H(s) (dense, dim <= 8192).
inline double ground_state_overlap(const Hamiltonian& h, double s, const ComplexVector& psi) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense_matrix(h, s));
  const RealVector g = es.eigenvectors().col(0);
  return std::norm(g.cast<Complex>().dot(psi));
}

/// Initial state for interpolated annealers: the ground state of
/// -sum sigma^x is the uniform superposition.
inline EvolveResult anneal_state(const Hamiltonian& h, double tau, EvolveOptions opt = {}) {
  return evolve(h, tau, uniform_state(h.dim), opt);
}

inline void write_evolution_trace(std::ostream& os, const std::vector<EvolutionSample>& trace) {
  os << "t P_target norm\n";
  for (const auto& r : trace)
    os << format_double(r.t) << ' ' << format_double(r.p_target) << ' ' << format_double(r.norm) << '\n';
}

// ----------------------------------------------------------------------------
// Spatial search on the complete graph, reduced to span{|w>, |rest>} where
// |rest> is the uniform superposition over the other N - 1 sites.

using Matrix2c = Eigen::Matrix2cd;
using Vector2c = Eigen::Vector2cd;

/// Reduced 2x2 Hamiltonian at well depth chi:
///   [[-chi, -Gamma sqrt(N-1)], [-Gamma sqrt(N-1), -Gamma (N-2)]].
inline Eigen::Matrix2d spatial_reduced_matrix(double n, double chi, double gamma) {
  const double c = -gamma * std::sqrt(n - 1.0);
  Eigen::Matrix2d m;
  m << -chi, c, c, -gamma * (n - 2.0);
  return m;
}

/// The reduced problem as a two-dimensional Hamiltonian with the linear ramp.
inline Hamiltonian spatial_search_reduced_hamiltonian(double n, double chi0, double gamma) {
  require(n >= 2.0, "spatial_search_reduced_hamiltonian: need N >= 2");
  const double bound = std::abs(chi0) + std::abs(gamma) * n;
  return make_hamiltonian(2, bound, "spatial-search-reduced", [n, chi0, gamma](double s, const auto& x, auto& y) {
    const Eigen::Matrix2d m = spatial_reduced_matrix(n, chi0 * s, gamma);
    y[0] = m(0, 0) * x[0] + m(0, 1) * x[1];
    y[1] = m(1, 0) * x[0] + m(1, 1) * x[1];
  });
}

namespace detail {

/// exp(A) for a 2x2 complex matrix: A = c I + B with B traceless, B^2 = q^2 I.
inline Matrix2c expm2(const Matrix2c& a) {
  const Complex c = 0.5 * a.trace();
  const Matrix2c b = a - c * Matrix2c::Identity();
  const Complex q = std::sqrt(-b.determinant());
  const Complex sinhc = std::abs(q) < 1e-8 ? 1.0 + q * q / 6.0 : std::sinh(q) / q;
  return std::exp(c) * (std::cosh(q) * Matrix2c::Identity() + sinhc * b);
}

}  // namespace detail

struct SpatialSearchResult {
  /// P(|w>) at t = tau.
  double p_marked = 0.0;
  /// Amplitudes on |w> and |rest>.
  Vector2c amplitudes;
  long steps = 0;
};

namespace detail {

using MagnusGenerator = std::function<Matrix2c(double)>;

/// One fourth-order Magnus step (two Gauss points, exact exponential) of
/// psi' = A(t) psi over [t, t + h].
inline Vector2c magnus_step(const MagnusGenerator& a, const Vector2c& psi, double t, double h) {
  const double c1 = 0.5 - std::sqrt(3.0) / 6.0, c2 = 0.5 + std::sqrt(3.0) / 6.0;
  const Matrix2c a1 = a(t + c1 * h), a2 = a(t + c2 * h);
  const Matrix2c omega = (0.5 * h) * (a1 + a2) + (std::sqrt(3.0) / 12.0 * h * h) * (a2 * a1 - a1 * a2);
  return expm2(omega) * psi;
}

/// Instantaneous eigenframe of the reduced matrix at time t: rotation angle
/// theta with R(theta)^T H R(theta) diagonal, its time derivative, and the
/// two diagonal entries.
struct SpatialFrame {
  double theta = 0.0;
  double dtheta = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
};

inline SpatialFrame spatial_frame(double n, double chi0, double gamma, double tau, double t) {
  const double a = -chi0 * t / tau;
  const double b = -gamma * std::sqrt(n - 1.0);
  const double d = -gamma * (n - 2.0);
  const double x = a - d, y = 2.0 * b;
  SpatialFrame f;
  // y < 0 throughout, so theta varies continuously as x changes sign.
  f.theta = 0.5 * std::atan2(y, x);
  f.dtheta = y / (2.0 * (x * x + y * y)) * (chi0 / tau);
  const double c = std::cos(f.theta), s = std::sin(f.theta);
  f.e1 = a * c * c + 2.0 * b * c * s + d * s * s;
  f.e2 = a * s * s - 2.0 * b * c * s + d * c * c;
  return f;
}

inline Eigen::Matrix2cd rotation(double theta) {
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  return r.cast<Complex>();
}

}  // namespace detail

struct SpatialSearchOptions {
  /// Fixed step count in the site frame; 0 selects adaptive stepping in the
  /// instantaneous eigenframe.
  long steps = 0;
  /// Adaptive mode: allowed local error per unit of total time, estimated by
  /// step doubling. Per-step allowances never go below a roundoff floor. The
  /// estimate is conservative: the default keeps P(|w>) errors below 1e-6.
  double tolerance = 1e-6;
};

/// Runs the ramp chi(t) = chi0 t / tau from the uniform state with the
/// fourth-order Magnus scheme and exact 2x2 exponentials.
///
/// The adaptive default works in the instantaneous eigenframe psi = R(theta) phi,
/// where i phi' = (diag(E1, E2) - i theta' J) phi with J = [[0, -1], [1, 0]].
/// Far from the avoided crossing theta' is tiny, so steps can be long even
/// though the level splitting is large.
inline SpatialSearchResult spatial_search_run(double n, double chi0, double gamma, double tau,
                                              const SpatialSearchOptions& opt = {}) {
  require(n >= 2.0, "spatial_search_run: need N >= 2");
  require(tau >= 0.0, "spatial_search_run: tau must be non-negative");
  require(opt.steps > 0 || opt.tolerance > 0.0, "spatial_search_run: tolerance must be positive");
  Vector2c psi(Complex(1.0 / std::sqrt(n), 0.0), Complex(std::sqrt((n - 1.0) / n), 0.0));
  if (tau == 0.0) return {std::norm(psi[0]), psi, 0};
  const Complex mi(0.0, -1.0);

  long taken = 0;
  if (opt.steps > 0) {
    const detail::MagnusGenerator site = [&](double t) -> Matrix2c {
      return mi * spatial_reduced_matrix(n, chi0 * t / tau, gamma).cast<Complex>();
    };
    const double h = tau / static_cast<double>(opt.steps);
    for (long k = 0; k < opt.steps; ++k) psi = detail::magnus_step(site, psi, k * h, h).normalized();
    return {std::norm(psi[0]), psi, opt.steps};
  }

  const detail::MagnusGenerator eigen = [&](double t) -> Matrix2c {
    const auto f = detail::spatial_frame(n, chi0, gamma, tau, t);
    Matrix2c a;
    a << mi * f.e1, Complex(f.dtheta, 0.0), Complex(-f.dtheta, 0.0), mi * f.e2;
    return a;
  };
  Vector2c phi = detail::rotation(detail::spatial_frame(n, chi0, gamma, tau, 0.0).theta).adjoint() * psi;
  const double h_max = tau / 256.0;
  double h = tau / 4096.0;
  double t = 0.0;
  while (t < tau) {
    const bool last = t + h >= tau;
    const double step = last ? tau - t : h;
    const Vector2c full = detail::magnus_step(eigen, phi, t, step);
    const Vector2c half = detail::magnus_step(eigen, phi, t, 0.5 * step);
    const Vector2c two = detail::magnus_step(eigen, half, t + 0.5 * step, 0.5 * step);
    const double err = (two - full).norm() / 15.0;
    const double allowed = std::max(opt.tolerance * step / tau, 1e-14);
    if (err <= allowed) {
      phi = two.normalized();
      t = last ? tau : t + step;
      ++taken;
    }
    const double factor = err > 0.0 ? 0.9 * std::pow(allowed / err, 0.2) : 4.0;
    h = std::min(h_max, step * std::clamp(factor, 0.2, 4.0));
  }
  psi = detail::rotation(detail::spatial_frame(n, chi0, gamma, tau, tau).theta) * phi;
  return {std::norm(psi[0]), psi, taken};
}

/// Squared overlap of |w> with the ground state of the reduced H at depth chi.
inline double spatial_ground_overlap(double n, double chi, double gamma) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(spatial_reduced_matrix(n, chi, gamma));
  const double a = es.eigenvectors()(0, 0);
  return a * a;
}

/// Smallest tau in [lo, hi] with P(tau) >= target, by bisection to relative
/// tolerance `rel_tol`. Returns lo when P(lo) already meets the target.
inline double tau_min_bisection(const std::function<double(double)>& runner, double target, double lo, double hi,
                                double rel_tol = 1e-4) {
  require(hi > lo && lo >= 0.0, "tau_min_bisection: need 0 <= lo < hi");
  require(rel_tol > 0.0, "tau_min_bisection: tolerance must be positive");
  if (runner(lo) >= target) return lo;
  if (runner(hi) < target) throw InvalidArgument("tau_min_bisection: P(tau) does not reach the target in the bracket");
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (runner(mid) >= target) hi = mid;
    else lo = mid;
  }
  return hi;
}

// ----------------------------------------------------------------------------
// Two-level closed forms

/// Landau-Zener time scale alpha Gamma / (2 pi Delta_min^2).
inline double landau_zener_time(double alpha, double gamma, double delta_min) {
  require(alpha > 0.0 && gamma > 0.0 && delta_min > 0.0, "landau_zener: parameters must be positive");
  return alpha * gamma / (2.0 * std::numbers::pi * delta_min * delta_min);
}

/// Probability of a non-adiabatic excitation, exp(-tau / tau_Gamma).
inline double landau_zener_p(double alpha, double gamma, double delta_min, double tau) {
  require(tau >= 0.0, "landau_zener_p: tau must be non-negative");
  return std::exp(-tau / landau_zener_time(alpha, gamma, delta_min));
}

/// P(|w>)(t) for E(|w><w| + |s><s|) started in |s>:
/// sin^2(E t / sqrt D) + cos^2(E t / sqrt D) / D.
inline double grover_two_level_probability(double d, double e, double t) {
  const double x = 1.0 / std::sqrt(d);
  const double c = std::cos(e * x * t), s = std::sin(e * x * t);
  return s * s + x * x * c * c;
}

/// First time P(|w>) peaks: pi sqrt(D) / (2 E).
inline double grover_peak_time(double d, double e) { return std::numbers::pi * std::sqrt(d) / (2.0 * e); }

}  // namespace qanneal
