#pragma once

// Sudden quench of the infinite-range transverse Ising model
// H = -(J/(4S)) (S^z)^2 - Gamma S^x: semiclassical orbit averages, exact
// finite-S evolution in the symmetric sector, and the Bloch equations.

#include <Eigen/Eigenvalues>

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qanneal/error.hpp"
#include "qanneal/format.hpp"

namespace qanneal {

struct QuenchParams {
  double j = 1.0;
  double gamma_i = 2.0;
  double gamma_f = 0.25;
  /// Total spin, integer or half-integer; N = 2S.
  double s = 100.0;

  double gamma_c() const noexcept { return 0.5 * j; }
  bool standard_protocol() const noexcept { return gamma_i > gamma_c() && gamma_c() > gamma_f && gamma_f > 0.0; }

  void validate() const {
    require(j > 0.0, "QuenchParams: J must be positive");
    require(gamma_i > 0.0 && gamma_f > 0.0, "QuenchParams: fields must be positive");
    const double two_s = 2.0 * s;
    require(s >= 0.5 && two_s == std::round(two_s), "QuenchParams: S must be a positive integer or half-integer");
    require(s <= 2000.0, "QuenchParams: S is limited to 2000");
  }
};

/// sqrt(G^2 sin^2 theta - [G - (J/4) cos^2 theta]^2) / sin theta with the
/// radicand clamped at zero.
inline double f_theta(double theta, double gamma_f, double j) {
  const double s = std::sin(theta), c = std::cos(theta);
  const double bracket = gamma_f - 0.25 * j * c * c;
  const double rad = gamma_f * gamma_f * s * s - bracket * bracket;
  return std::sqrt(std::max(rad, 0.0)) / s;
}

/// Turning points theta_1 = arcsin|1 - 4 G/J| and theta_2 = pi/2.
inline std::array<double, 2> turning_points(double gamma_f, double j) {
  return {std::asin(std::min(1.0, std::abs(1.0 - 4.0 * gamma_f / j))), 0.5 * std::numbers::pi};
}

inline void require_ordered_quench(double gamma_f, double j) {
  require(j > 0.0, "quench: J must be positive");
  require(gamma_f > 0.0 && gamma_f < 0.5 * j, "quench: Gamma_f must lie in (0, J/2)");
}

/// int_{theta_1}^{pi/2} cos^2 theta / f dtheta = 4 sqrt(8 G (J - 2G)) / J^2.
inline double quench_numerator(double gamma_f, double j) {
  require_ordered_quench(gamma_f, j);
  return 4.0 * std::sqrt(8.0 * gamma_f * (j - 2.0 * gamma_f)) / (j * j);
}

/// Gauss-Legendre rule on [-1, 1] from the Golub-Welsch eigenproblem.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n) : nodes(static_cast<std::size_t>(n)), weights(static_cast<std::size_t>(n)) {
    require(n >= 1, "GaussLegendre: need at least one node");
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd off(std::max(n - 1, 0));
    for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw ConvergenceError("GaussLegendre: eigen-decomposition failed");
    for (int k = 0; k < n; ++k) {
      nodes[static_cast<std::size_t>(k)] = solver.eigenvalues()[k];
      const double v = solver.eigenvectors()(0, k);
      weights[static_cast<std::size_t>(k)] = 2.0 * v * v;
    }
  }

  template <class F>
  double integrate(double a, double b, F&& f) const {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) s += weights[k] * f(mid + half * nodes[k]);
    return half * s;
  }
};

struct OrbitAverage {
  /// Time spent between the turning points weighted by cos^2 theta.
  double numerator = 0.0;
  /// Time between the turning points of x = cos^2 theta.
  double denominator = 0.0;
  /// Time average of cos^2 theta.
  double value = 0.0;
  /// True when the orbit crosses the equator theta = pi/2.
  bool passing = false;
};

/// Classical orbit with energy per spin e = -(J/4) cos^2 theta -
/// Gamma sin theta cos phi. In x = cos^2 theta the motion fills
/// g(x) = Gamma^2 (1 - x) - (e + J x / 4)^2 = (J/4)^2 (x - x_lo)(x_hi - x) >= 0
/// and dt = dx / (2 sqrt(x g(x))). With x = x0 + (x_hi - x0)(1 - cos u)/2 the
/// square-root endpoints cancel, leaving (2/J) du / sqrt(x) for trapped orbits
/// (x0 = x_lo > 0) and (2/J) du / sqrt(x - x_lo) for passing ones (x0 = 0).
/// Near the separatrix x_lo -> 0 the remaining peak at u = 0 has width
/// alpha = 2 sqrt(|x_lo| / (x_hi - x0)), resolved by u = alpha sinh(s).
inline std::optional<OrbitAverage> orbit_average(double e, double gamma, double j, const GaussLegendre& rule) {
  const double qa = -(j * j) / 16.0;
  const double qb = -(gamma * gamma + 0.5 * e * j);
  const double qc = gamma * gamma - e * e;
  const double disc = qb * qb - 4.0 * qa * qc;
  if (!(disc > 0.0)) return std::nullopt;
  const double r1 = (-qb + std::sqrt(disc)) / (2.0 * qa);
  const double r2 = (-qb - std::sqrt(disc)) / (2.0 * qa);
  const double x_lo = std::min(r1, r2), x_hi = std::min(std::max(r1, r2), 1.0);
  if (x_hi <= 0.0 || x_hi <= x_lo) return std::nullopt;
  OrbitAverage o;
  o.passing = x_lo <= 0.0;
  const double base = o.passing ? 0.0 : x_lo;
  const double span = x_hi - base;
  const double pi = std::numbers::pi;
  const double alpha = std::max(2.0 * std::sqrt(std::abs(x_lo) / span), 1e-300);
  const double s_max = std::asinh(pi / alpha);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double s = 0.5 * s_max * (1.0 + rule.nodes[k]);
    const double u = alpha * std::sinh(s);
    const double du = alpha * std::cosh(s) * 0.5 * s_max * rule.weights[k];
    const double x = base + span * 0.5 * (1.0 - std::cos(u));
    const double w = du / std::sqrt(o.passing ? x - x_lo : x);
    den += w;
    num += x * w;
  }
  o.numerator = 2.0 / j * num;
  o.denominator = 2.0 / j * den;
  o.value = num / den;
  return o;
}

struct SemiclassicalOptions {
  /// Spin size setting the width 1/(2S) of the initial Wigner distribution.
  double spin = 500.0;
  int radial_nodes = 128;
  int angular_nodes = 128;
  int legendre_nodes = 64;
};

/// Long-time average of cos^2 theta after the quench: orbit averages
/// weighted over the Wigner distribution of the x-polarized initial coherent
/// state, with cos theta and sin theta sin phi independent N(0, 1/(2S)).
/// The Gaussian is integrated in polar form, v = r^2 / (2 sigma^2) on [0, 40]
/// with weight exp(-v) and the angle over one quadrant.
inline double long_time_average_semiclassical(double gamma_f, double j, const SemiclassicalOptions& opt = {}) {
  require_ordered_quench(gamma_f, j);
  require(opt.spin >= 0.5, "long_time_average_semiclassical: spin must be at least 1/2");
  require(opt.radial_nodes >= 2 && opt.angular_nodes >= 2 && opt.legendre_nodes >= 2,
          "long_time_average_semiclassical: need at least two nodes per dimension");
  const GaussLegendre radial(opt.radial_nodes), angular(opt.angular_nodes), orbit(opt.legendre_nodes);
  const double sigma2 = 1.0 / (2.0 * opt.spin);
  constexpr double v_max = 40.0;
  const double quarter = 0.25 * std::numbers::pi;
  double total = 0.0, weight = 0.0;
  for (std::size_t a = 0; a < radial.nodes.size(); ++a) {
    const double v = 0.5 * v_max * (1.0 + radial.nodes[a]);
    const double r2 = 2.0 * sigma2 * v;
    if (r2 >= 1.0) continue;
    const double wv = 0.5 * v_max * radial.weights[a] * std::exp(-v);
    for (std::size_t b = 0; b < angular.nodes.size(); ++b) {
      const double ang = quarter * (1.0 + angular.nodes[b]);
      const double z2 = r2 * std::cos(ang) * std::cos(ang);
      const double e = -0.25 * j * z2 - gamma_f * std::sqrt(1.0 - r2);
      const auto o = orbit_average(e, gamma_f, j, orbit);
      if (!o) continue;
      const double w = wv * quarter * angular.weights[b];
      total += w * o->value;
      weight += w;
    }
  }
  if (weight <= 0.0) throw ConvergenceError("long_time_average_semiclassical: no admissible orbits");
  return total / weight;
}

// ---------------------------------------------------------------------------
// Exact evolution in the sector symmetric under m -> -m, which holds the
// ground state of H(Gamma_i).

struct SymmetricSector {
  /// |m| of each basis state.
  std::vector<double> m;
  Eigen::VectorXd sz2;
  Eigen::VectorXd diag_sx;
  Eigen::VectorXd off_sx;
};

/// Basis: |0> (integer S) or the pairs (|m> + |-m>)/sqrt(2), m > 0.
inline SymmetricSector symmetric_sector(double s) {
  const double two_s = 2.0 * s;
  require(s >= 0.5 && two_s == std::round(two_s), "symmetric_sector: S must be a positive integer or half-integer");
  const bool integer = std::fmod(two_s, 2.0) == 0.0;
  const int dim = integer ? static_cast<int>(s) + 1 : static_cast<int>(s + 0.5);
  SymmetricSector sec;
  sec.m.resize(static_cast<std::size_t>(dim));
  sec.sz2.resize(dim);
  sec.diag_sx = Eigen::VectorXd::Zero(dim);
  sec.off_sx.resize(std::max(dim - 1, 0));
  auto raise = [s](double m) { return 0.5 * std::sqrt(s * (s + 1.0) - m * (m + 1.0)); };
  for (int k = 0; k < dim; ++k) {
    const double m = integer ? k : k + 0.5;
    sec.m[static_cast<std::size_t>(k)] = m;
    sec.sz2[k] = m * m;
    if (k + 1 < dim) sec.off_sx[k] = raise(m) * (integer && k == 0 ? std::numbers::sqrt2 : 1.0);
  }
  if (!integer) sec.diag_sx[0] = raise(-0.5);
  return sec;
}

inline Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sector_eigensystem(const SymmetricSector& sec, double j, double s,
                                                                          double gamma) {
  const Eigen::VectorXd diag = -(j / (4.0 * s)) * sec.sz2 - gamma * sec.diag_sx;
  const Eigen::VectorXd off = -gamma * sec.off_sx;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw ConvergenceError("quench: tridiagonal eigen-decomposition failed");
  return solver;
}

struct QuenchWindow {
  /// Average over [T/2, T] with T = periods * (recurrence period).
  double periods = 50.0;
  /// Explicit window; overrides `periods` when both are set.
  std::optional<double> t_begin;
  std::optional<double> t_end;
};

struct QuenchObservables {
  double sz2 = 0.0;
  double energy = 0.0;
  double norm = 0.0;
};

struct QuenchResult {
  /// Window average of <(S^z)^2> / S^2.
  double o = 0.0;
  /// <(S^z)^2> / S^2 in the pre-quench ground state.
  double static_value = 0.0;
  /// First recurrence time of <(S^z)^2>; +inf for a stationary state.
  double period = std::numeric_limits<double>::infinity();
  double t_begin = 0.0;
  double t_end = 0.0;
  /// Set when the averaging window is shorter than one period.
  bool short_window = false;
  bool stationary = false;
};

/// Post-quench state expanded on the eigenbasis of H(Gamma_f), restricted to
/// the components with weight above 1e-18.
class QuenchEvolution {
 public:
  explicit QuenchEvolution(const QuenchParams& p) : p_(p), sec_(symmetric_sector(p.s)) {
    p.validate();
    const auto initial = sector_eigensystem(sec_, p.j, p.s, p.gamma_i);
    psi0_ = initial.eigenvectors().col(0);
    const auto final = sector_eigensystem(sec_, p.j, p.s, p.gamma_f);
    const Eigen::VectorXd c = final.eigenvectors().transpose() * psi0_;
    std::vector<int> keep;
    for (int k = 0; k < c.size(); ++k)
      if (c[k] * c[k] > 1e-18) keep.push_back(k);
    const auto nk = static_cast<Eigen::Index>(keep.size());
    c_.resize(nk);
    e_.resize(nk);
    v_.resize(final.eigenvectors().rows(), nk);
    for (Eigen::Index k = 0; k < nk; ++k) {
      const int idx = keep[static_cast<std::size_t>(k)];
      c_[k] = c[idx];
      e_[k] = final.eigenvalues()[idx];
      v_.col(k) = final.eigenvectors().col(idx);
    }
    a_ = v_.transpose() * sec_.sz2.asDiagonal() * v_;
    const double mean_e = (c_.array().square() * e_.array()).sum();
    energy_variance_ = (c_.array().square() * (e_.array() - mean_e).square()).sum();
  }

  double norm2() const { return p_.s * p_.s; }

  double static_value() const { return psi0_.dot(sec_.sz2.asDiagonal() * psi0_) / norm2(); }

  /// <(S^z)^2>/S^2, <H(Gamma_f)> and the norm at time t, from the sector
  /// state vector.
  QuenchObservables observe(double t) const {
    const Eigen::VectorXcd amp = (c_.array().cast<std::complex<double>>() *
                                  (std::complex<double>(0.0, -1.0) * e_.array() * t).exp())
                                     .matrix();
    const Eigen::VectorXcd psi = v_.cast<std::complex<double>>() * amp;
    QuenchObservables o;
    o.norm = psi.squaredNorm();
    o.sz2 = (psi.cwiseAbs2().array() * sec_.sz2.array()).sum() / norm2();
    const Eigen::Index n = psi.size();
    const Eigen::VectorXd diag = -(p_.j / (4.0 * p_.s)) * sec_.sz2 - p_.gamma_f * sec_.diag_sx;
    Eigen::VectorXcd hpsi = diag.cast<std::complex<double>>().cwiseProduct(psi);
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
      hpsi[k] -= p_.gamma_f * sec_.off_sx[k] * psi[k + 1];
      hpsi[k + 1] -= p_.gamma_f * sec_.off_sx[k] * psi[k];
    }
    o.energy = psi.dot(hpsi).real();
    return o;
  }

  double sz2(double t) const { return observe(t).sz2; }

  bool stationary() const { return energy_variance_ < 1e-20 * std::max(1.0, p_.s * p_.s); }

  /// Time of the first local minimum of <(S^z)^2> following its first local
  /// maximum, on a grid of step 0.1 / (J + Gamma_f).
  double recurrence_period(long max_steps = 400000) const {
    const double dt = 0.1 / (p_.j + p_.gamma_f);
    double prev = sz2(0.0);
    bool rising_seen = false, peaked = false;
    for (long k = 1; k <= max_steps; ++k) {
      const double cur = sz2(k * dt);
      if (!peaked) {
        if (cur > prev) rising_seen = true;
        else if (rising_seen && cur < prev) peaked = true;
      } else if (cur > prev) {
        return (k - 1) * dt;
      }
      prev = cur;
    }
    throw ConvergenceError("quench: no recurrence of <Sz^2> found on the scan grid");
  }

  /// Exact average of <(S^z)^2>/S^2 over [a, b].
  double window_average(double a, double b) const {
    require(b > a && a >= 0.0, "quench: window must satisfy 0 <= t_begin < t_end");
    const double len = b - a;
    double s = 0.0;
    const Eigen::Index n = c_.size();
    for (Eigen::Index k = 0; k < n; ++k) {
      s += c_[k] * c_[k] * a_(k, k);
      for (Eigen::Index l = k + 1; l < n; ++l) {
        const double w = e_[k] - e_[l];
        const double avg = w == 0.0 ? 1.0 : (std::sin(w * b) - std::sin(w * a)) / (w * len);
        s += 2.0 * c_[k] * c_[l] * a_(k, l) * avg;
      }
    }
    return s / norm2();
  }

  /// Infinite-time (diagonal ensemble) limit, exact for a non-degenerate
  /// spectrum.
  double diagonal_average() const {
    double s = 0.0;
    for (Eigen::Index k = 0; k < c_.size(); ++k) s += c_[k] * c_[k] * a_(k, k);
    return s / norm2();
  }

  Eigen::Index components() const noexcept { return c_.size(); }

 private:
  QuenchParams p_;
  SymmetricSector sec_;
  Eigen::VectorXd psi0_;
  Eigen::VectorXd c_;
  Eigen::VectorXd e_;
  Eigen::MatrixXd v_;
  Eigen::MatrixXd a_;
  double energy_variance_ = 0.0;
};

inline QuenchResult quench_quantum(const QuenchParams& params, const QuenchWindow& window = {}) {
  params.validate();
  const QuenchEvolution ev(params);
  QuenchResult r;
  r.static_value = ev.static_value();
  if (ev.stationary()) {
    r.stationary = true;
    r.o = r.static_value;
    return r;
  }
  r.period = ev.recurrence_period();
  if (window.t_begin || window.t_end) {
    require(window.t_begin && window.t_end, "quench_quantum: explicit windows need both ends");
    r.t_begin = *window.t_begin;
    r.t_end = *window.t_end;
  } else {
    require(window.periods > 0.0, "quench_quantum: window length must be positive");
    r.t_end = window.periods * r.period;
    r.t_begin = 0.5 * r.t_end;
  }
  r.short_window = r.t_end - r.t_begin < r.period;
  r.o = ev.window_average(r.t_begin, r.t_end);
  return r;
}

struct QuenchCurvePoint {
  double gamma_f = 0.0;
  double o = 0.0;
};

/// O(Gamma_f) for one S over a list of final fields.
inline std::vector<QuenchCurvePoint> quench_curve(double j, double gamma_i, double s, const std::vector<double>& gamma_f,
                                                  const QuenchWindow& window = {}) {
  std::vector<QuenchCurvePoint> out;
  out.reserve(gamma_f.size());
  for (double g : gamma_f) out.push_back({g, quench_quantum({j, gamma_i, g, s}, window).o});
  return out;
}

/// Columns `Gamma_f/J O`.
inline void write_quench_curve(std::ostream& os, const std::vector<QuenchCurvePoint>& curve, double j) {
  os << "Gamma_f/J O\n";
  for (const auto& p : curve) os << format_double(p.gamma_f / j) << ' ' << format_double(p.o) << '\n';
}

// ---------------------------------------------------------------------------
// Classical spin dynamics on the sphere.

struct BlochPoint {
  double t = 0.0;
  double theta = 0.0;
  double phi = 0.0;
  double energy = 0.0;
};

inline double bloch_energy(double theta, double phi, double gamma, double j) {
  const double c = std::cos(theta);
  return -0.25 * j * c * c - gamma * std::sin(theta) * std::cos(phi);
}

struct BlochOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  double initial_step = 1e-3;
  double pole_distance = 1e-6;
};

/// d theta/dt = Gamma sin phi, d phi/dt = -(J/2) cos theta + Gamma cot theta cos phi,
/// integrated with adaptive Dormand-Prince 5(4). One point per accepted step.
inline std::vector<BlochPoint> bloch_dynamics(double theta0, double phi0, double gamma, double j, double tau,
                                              const BlochOptions& opt = {}) {
  const double pi = std::numbers::pi;
  require(tau >= 0.0, "bloch_dynamics: duration must be non-negative");
  require(theta0 > opt.pole_distance && theta0 < pi - opt.pole_distance,
          "bloch_dynamics: initial theta is at a pole of the spherical coordinates");
  using State = std::array<double, 2>;
  auto rhs = [&](const State& x, State& dx, double) {
    const double th = x[0];
    if (th <= opt.pole_distance || th >= pi - opt.pole_distance)
      throw ConvergenceError("bloch_dynamics: trajectory reached theta = " + format_double(th) +
                             ", within the pole tolerance of the coordinate chart");
    dx[0] = gamma * std::sin(x[1]);
    dx[1] = -0.5 * j * std::cos(th) + gamma * std::cos(x[1]) / std::tan(th);
  };
  std::vector<BlochPoint> out;
  auto observe = [&](const State& x, double t) { out.push_back({t, x[0], x[1], bloch_energy(x[0], x[1], gamma, j)}); };
  State x{theta0, phi0};
  if (tau == 0.0) {
    observe(x, 0.0);
    return out;
  }
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(opt.abs_tol, opt.rel_tol, ode::runge_kutta_dopri5<State>());
  ode::integrate_adaptive(stepper, rhs, x, 0.0, tau, std::min(opt.initial_step, tau), observe);
  return out;
}

}  // namespace qanneal
