#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>

#include "qanneal/error.hpp"

namespace qanneal {

struct FitResult {
  double zeta = 0.0;
  double amplitude = 0.0;
  /// Root-mean-square residual in log ε.
  double residual = 0.0;
  double tau_min = 0.0;
  double tau_max = 0.0;
};

/// Least-squares fit of log ε = log a - ζ log log τ, i.e. ε ~ a (log τ)^-ζ.
inline FitResult fit_log_power(std::span<const std::pair<double, double>> points) {
  require(points.size() >= 4, "fit_log_power: need at least four points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double tmin = points.front().first, tmax = points.front().first;
  for (const auto& [tau, eps] : points) {
    require(tau >= 2.0, "fit_log_power: τ must be at least 2");
    require(eps > 0.0, "fit_log_power: residual energies must be positive");
    const double x = std::log(std::log(tau));
    const double y = std::log(eps);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    tmin = std::min(tmin, tau);
    tmax = std::max(tmax, tau);
  }
  const double n = static_cast<double>(points.size());
  const double var = sxx - sx * sx / n;
  if (!(var > 1e-14 * std::max(1.0, sxx))) throw InvalidArgument("fit_log_power: degenerate abscissae");
  const double slope = (sxy - sx * sy / n) / var;
  const double intercept = (sy - slope * sx) / n;

  double ss = 0.0;
  for (const auto& [tau, eps] : points) {
    const double r = std::log(eps) - (intercept + slope * std::log(std::log(tau)));
    ss += r * r;
  }
  return {-slope, std::exp(intercept), std::sqrt(ss / n), tmin, tmax};
}

}  // namespace qanneal
