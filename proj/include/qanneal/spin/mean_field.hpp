#pragma once

// Mean-field spin-glass order parameter of the transverse-field SK model and
// its paramagnetic phase boundary.

#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qanneal/error.hpp"

namespace qanneal {

/// Gauss-Hermite rule for integrals of the form  int exp(-x^2) f(x) dx.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;

  /// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
  /// Hermite recurrence, weights sqrt(pi) times the squared first components.
  explicit GaussHermite(int n) : nodes(static_cast<std::size_t>(n)), weights(static_cast<std::size_t>(n)) {
    require(n >= 1, "GaussHermite: need at least one node");
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd off(std::max(n - 1, 0));
    for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(0.5 * k);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) throw ConvergenceError("GaussHermite: eigen-decomposition failed");
    const double root_pi = std::sqrt(std::numbers::pi);
    for (int k = 0; k < n; ++k) {
      nodes[static_cast<std::size_t>(k)] = solver.eigenvalues()[k];
      const double v = solver.eigenvectors()(0, k);
      weights[static_cast<std::size_t>(k)] = root_pi * v * v;
    }
  }

  /// E[f(r)] for r ~ N(0, 1).
  template <class F>
  double gaussian_mean(F&& f) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) sum += weights[k] * f(std::numbers::sqrt2 * nodes[k]);
    return sum / std::sqrt(std::numbers::pi);
  }
};

struct MeanFieldOptions {
  double tolerance = 1e-12;
  long max_iterations = 200;
  int quadrature_nodes = 200;
};

/// Right-hand side of the self-consistency equation: the Gaussian average of
/// the z-projected ordering term [h_z/|h|]^2 tanh^2(|h|/T), h_z = J sqrt(q) r.
inline double mf_rhs(double q, double T, double gamma, double J, const GaussHermite& rule) {
  const double amp = J * std::sqrt(std::max(q, 0.0));
  return rule.gaussian_mean([&](double r) {
    const double hz = amp * r;
    const double h = std::hypot(hz, gamma);
    if (h == 0.0) return 0.0;
    const double t = std::tanh(h / T);
    return (hz * hz) / (h * h) * t * t;
  });
}

/// Self-consistent spin-glass order parameter q(T, Gamma): the nonzero root
/// of F(q) - q, bracketed on (0, 1] and bisected. Parameters on the
/// paramagnetic side of the boundary (where the linearized map has slope
/// <= 1) return 0.
inline double mf_order_parameter(double T, double gamma, double J, const MeanFieldOptions& opt = {}) {
  require(T > 0.0, "mf_order_parameter: T must be positive");
  require(gamma >= 0.0, "mf_order_parameter: Gamma must be non-negative");
  require(J > 0.0, "mf_order_parameter: J must be positive");

  const double slope = gamma > 0.0 ? std::pow(J / gamma * std::tanh(gamma / T), 2) : std::pow(J / T, 2);
  if (slope <= 1.0) return 0.0;

  static thread_local int cached_nodes = 0;
  static thread_local GaussHermite cached_rule(1);
  if (cached_nodes != opt.quadrature_nodes) {
    cached_rule = GaussHermite(opt.quadrature_nodes);
    cached_nodes = opt.quadrature_nodes;
  }
  const GaussHermite& rule = cached_rule;
  auto g = [&](double q) { return mf_rhs(q, T, gamma, J, rule) - q; };

  double hi = 1.0;
  if (g(hi) >= 0.0) return hi;
  double lo = std::min(0.5, 1e-3 * (slope - 1.0));
  while (g(lo) <= 0.0) {
    lo *= 1e-3;
    if (lo < 1e-300) return 0.0;
  }
  for (long it = 0; it < opt.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= opt.tolerance || mid == lo || mid == hi) return mid;
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  throw ConvergenceError("mf_order_parameter: root not bracketed within the iteration cap");
}

/// Critical transverse field Gamma_c(T) solving Gamma/J = tanh(Gamma/T).
/// Empty when T >= J (no nontrivial root).
inline std::optional<double> phase_boundary(double T, double J, double tolerance = 1e-9) {
  require(T > 0.0 && J > 0.0, "phase_boundary: T and J must be positive");
  if (T >= J) return std::nullopt;
  auto g = [&](double gamma) { return J * std::tanh(gamma / T) - gamma; };
  // g > 0 just above 0 because the slope J/T exceeds 1; g(J) <= 0.
  double lo = 0.0;
  double hi = J;
  if (g(hi) >= 0.0) return hi;
  while (hi - lo > tolerance * 0.5) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Critical temperature T_c(Gamma) from the same boundary equation, bisected
/// on the temperature. Empty when Gamma >= J.
inline std::optional<double> phase_boundary_inverse(double gamma, double J, double tolerance = 1e-9) {
  require(gamma > 0.0 && J > 0.0, "phase_boundary_inverse: Gamma and J must be positive");
  if (gamma >= J) return std::nullopt;
  // J tanh(Gamma/T) - Gamma decreases in T; positive as T -> 0, negative at T = J.
  auto g = [&](double T) { return J * std::tanh(gamma / T) - gamma; };
  double lo = 0.0;
  double hi = J;
  while (hi - lo > tolerance * 0.5) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace qanneal
