#pragma once

// Per-run output shared by the classical, PIMC and TSP drivers, and its
// columnar text serialization.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qanneal/error.hpp"
#include "qanneal/format.hpp"
#include "qanneal/spin/ising_problem.hpp"

namespace qanneal {

struct TracePoint {
  long t = 0;
  double control = 0.0;
  double energy = 0.0;
  double magnetization = 0.0;
  /// Inter-slice coupling K for PIMC runs, NaN otherwise.
  double coupling = std::numeric_limits<double>::quiet_NaN();

  friend bool operator==(const TracePoint& a, const TracePoint& b) {
    auto same = [](double x, double y) { return x == y || (std::isnan(x) && std::isnan(y)); };
    return a.t == b.t && same(a.control, b.control) && same(a.energy, b.energy) &&
           same(a.magnetization, b.magnetization) && same(a.coupling, b.coupling);
  }
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::string method;
  std::string schedule;
  std::vector<TracePoint> trace;
  SpinConfig final_config;
  double final_energy = 0.0;
  long sweeps = 0;
  /// Method-specific scalars (best slice index, acceptance rate, ...).
  std::map<std::string, double> extras;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

/// ε_res = E(τ) - E0. Negative values beyond round-off indicate an oracle or
/// energy bug and throw.
inline double residual_energy(const RunRecord& record, double e0) {
  const double r = record.final_energy - e0;
  if (r < -1e-9 * std::max(1.0, std::abs(e0)))
    throw InvalidArgument("residual_energy: final energy lies below the oracle ground energy");
  return std::max(r, 0.0);
}

/// Columnar trace: header line, then `t control energy magnetization [K]`.
inline void write_trace(std::ostream& os, const RunRecord& r) {
  bool has_k = false;
  for (const auto& p : r.trace) has_k = has_k || !std::isnan(p.coupling);
  os << "# seed " << r.seed << '\n';
  os << "# method " << r.method << '\n';
  os << "# schedule " << r.schedule << '\n';
  os << "# sweeps " << r.sweeps << '\n';
  os << "# final_energy " << format_double(r.final_energy) << '\n';
  for (const auto& [k, v] : r.extras) os << "# " << k << ' ' << format_double(v) << '\n';
  os << "t control energy magnetization" << (has_k ? " K" : "") << '\n';
  for (const auto& p : r.trace) {
    os << p.t << ' ' << format_double(p.control) << ' ' << format_double(p.energy) << ' '
       << format_double(p.magnetization);
    if (has_k) os << ' ' << format_double(p.coupling);
    os << '\n';
  }
}

inline void save_trace(const std::string& path, const RunRecord& r) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  write_trace(os, r);
}

}  // namespace qanneal
