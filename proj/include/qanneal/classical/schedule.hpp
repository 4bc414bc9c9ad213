#pragma once

// Annealing schedules: maps from a sweep index t >= 0 to a control value
// (temperature or transverse field).

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>

#include "qanneal/error.hpp"
#include "qanneal/format.hpp"

namespace qanneal {

namespace schedule {

/// N / log(t + 2). With N the spin count this sits on the classical
/// convergence bound T(t) >= N / log t for every t >= 2.
struct Logarithmic {
  double n = 1.0;
};
/// X0 exp(-t / tau).
struct Exponential {
  double x0 = 1.0;
  double tau = 1.0;
};
/// X0 max(0, 1 - t / tau).
struct Linear {
  double x0 = 1.0;
  double tau = 1.0;
};
/// M T artanh[(t + 2)^(-2 / (R L))], the strong-ergodicity bound for PIMC.
struct PowerLawMN {
  double m = 1.0;
  double temperature = 1.0;
  double r = 1.0;
  double l = 1.0;
};
struct Constant {
  double x = 0.0;
};

}  // namespace schedule

using Schedule = std::variant<schedule::Logarithmic, schedule::Exponential, schedule::Linear,
                              schedule::PowerLawMN, schedule::Constant>;

/// Morita-Nishimori field bound M T artanh[(t+2)^(-2/(R L))].
inline double mn_schedule(double t, double m, double temperature, double r, double l) {
  require(r * l > 0.0, "mn_schedule: R*L must be positive");
  require(t >= 0.0, "mn_schedule: t must be non-negative");
  return m * temperature * std::atanh(std::pow(t + 2.0, -2.0 / (r * l)));
}

inline double schedule_value(const Schedule& s, double t) {
  require(t >= 0.0, "schedule_value: t must be non-negative");
  return std::visit(
      [t](const auto& k) -> double {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, schedule::Logarithmic>) {
          return k.n / std::log(t + 2.0);
        } else if constexpr (std::is_same_v<K, schedule::Exponential>) {
          return k.x0 * std::exp(-t / k.tau);
        } else if constexpr (std::is_same_v<K, schedule::Linear>) {
          return k.x0 * std::max(0.0, 1.0 - t / k.tau);
        } else if constexpr (std::is_same_v<K, schedule::PowerLawMN>) {
          return mn_schedule(t, k.m, k.temperature, k.r, k.l);
        } else {
          return k.x;
        }
      },
      s);
}

inline std::string describe(const Schedule& s) {
  return std::visit(
      [](const auto& k) -> std::string {
        using K = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<K, schedule::Logarithmic>) {
          return "logarithmic n=" + format_double(k.n);
        } else if constexpr (std::is_same_v<K, schedule::Exponential>) {
          return "exponential x0=" + format_double(k.x0) + " tau=" + format_double(k.tau);
        } else if constexpr (std::is_same_v<K, schedule::Linear>) {
          return "linear x0=" + format_double(k.x0) + " tau=" + format_double(k.tau);
        } else if constexpr (std::is_same_v<K, schedule::PowerLawMN>) {
          return "power-law-mn m=" + format_double(k.m) + " T=" + format_double(k.temperature) +
                 " r=" + format_double(k.r) + " l=" + format_double(k.l);
        } else {
          return "constant x=" + format_double(k.x);
        }
      },
      s);
}

/// Exponential schedule running from x0 at t = 0 to x_end at t = sweeps.
inline schedule::Exponential exponential_between(double x0, double x_end, double sweeps) {
  require(x0 > 0.0 && x_end > 0.0 && x_end < x0 && sweeps > 0.0,
          "exponential_between: need 0 < x_end < x0 and sweeps > 0");
  return {x0, sweeps / std::log(x0 / x_end)};
}

/// Classical convergence bound T >= N / log t at cooling time t >= 2. Sweep
/// index k corresponds to cooling time k + 2, the same shift the logarithmic
/// schedule uses, so that schedule meets the bound with equality.
inline bool satisfies_sa_bound(const Schedule& s, double n, double t) {
  require(t >= 2.0, "satisfies_sa_bound: bound is defined for t >= 2");
  return schedule_value(s, t - 2.0) >= n / std::log(t);
}

/// PIMC strong-ergodicity bound Gamma(t) >= M T artanh[(t+2)^(-2/RL)].
inline bool satisfies_mn_bound(const Schedule& s, double t, double m, double temperature, double r, double l) {
  return schedule_value(s, t) >= mn_schedule(t, m, temperature, r, l);
}

/// First sweep index in [0, sweeps) at which a field schedule drops below the
/// PIMC bound, or -1 when it never does.
inline long first_mn_violation(const Schedule& s, long sweeps, double m, double temperature, double r, double l) {
  for (long t = 0; t < sweeps; ++t)
    if (!satisfies_mn_bound(s, static_cast<double>(t), m, temperature, r, l)) return t;
  return -1;
}

}  // namespace qanneal
