#pragma once

// Generalized East chain: spins in a downward field h, with a barrier of
// height chi and width a in front of spin i whenever spin i-1 is down.
// Flips follow semiclassical tunnelling (quantum) or Boltzmann (thermal)
// probabilities under exponential schedules.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qanneal/error.hpp"
#include "qanneal/format.hpp"
#include "qanneal/rng.hpp"

namespace qanneal {

enum class KcsMode { quantum, thermal };

inline std::string to_string(KcsMode m) { return m == KcsMode::quantum ? "quantum" : "thermal"; }

struct KcsChain {
  std::vector<int> spins;
  double h = 1.0;
  double chi = 0.0;
  double a = 0.0;

  /// Barrier area chi * a.
  double g() const noexcept { return chi * a; }
  int size() const noexcept { return static_cast<int>(spins.size()); }
  int left(int i) const noexcept { return i == 0 ? size() - 1 : i - 1; }
  bool constrained(int i) const noexcept { return spins[static_cast<std::size_t>(left(i))] < 0; }

  /// (1/N) sum S_i.
  double magnetization() const noexcept {
    long s = 0;
    for (int v : spins) s += v;
    return static_cast<double>(s) / size();
  }
  /// Order toward the field direction, -(1/N) sum S_i.
  double alignment() const noexcept { return -magnetization(); }

  void validate() const {
    require(size() >= 2, "KcsChain: need at least two spins");
    require(h > 0.0, "KcsChain: field h must be positive");
    require(chi >= 0.0 && a >= 0.0, "KcsChain: barrier height and width must be non-negative");
    for (int v : spins) require(v == 1 || v == -1, "KcsChain: spins must be +1 or -1");
  }
};

/// Independent +-1 spins, so m is of order N^(-1/2).
inline KcsChain random_kcs_chain(int n, double h, double chi, double a, std::uint64_t seed) {
  require(n >= 2, "random_kcs_chain: need at least two spins");
  Rng rng(seed);
  KcsChain c;
  c.spins.resize(static_cast<std::size_t>(n));
  for (auto& s : c.spins) s = rng.spin();
  c.h = h;
  c.chi = chi;
  c.a = a;
  c.validate();
  return c;
}

/// Width from the barrier area: a = g / chi.
inline double barrier_width(double chi, double g) {
  require(chi > 0.0 && g >= 0.0, "barrier_width: need chi > 0 and g >= 0");
  return g / chi;
}

struct KcsSchedule {
  KcsMode mode = KcsMode::quantum;
  double x0 = 100.0;
  double tau = 180.0;

  double value(double t) const { return x0 * std::exp(-t / tau); }
  void validate() const {
    require(x0 > 0.0, "KcsSchedule: initial value must be positive");
    require(tau > 0.0, "KcsSchedule: time constant must be positive");
  }
};

/// Barrier factor B: quantum transmission exp(-2 a sqrt(chi - Gamma)),
/// equal to 1 once Gamma >= chi; thermal exp(-chi / T).
inline double barrier_factor(double chi, double a, double control, KcsMode mode) {
  if (mode == KcsMode::quantum) {
    const double excess = chi - control;
    return excess <= 0.0 ? 1.0 : std::exp(-2.0 * a * std::sqrt(excess));
  }
  if (control <= 0.0) return chi > 0.0 ? 0.0 : 1.0;
  return std::exp(-chi / control);
}

/// Direction factor A: 1 for an up spin; for a down spin exp(-h/T)
/// (thermal) or min{1, exp(-2h/Gamma)} (quantum).
inline double direction_factor(int spin, double h, double control, KcsMode mode) {
  if (spin > 0) return 1.0;
  if (control <= 0.0) return 0.0;
  return mode == KcsMode::quantum ? std::min(1.0, std::exp(-2.0 * h / control)) : std::exp(-h / control);
}

/// P = B * A with B = 1 for an unconstrained site (left neighbour up).
inline double flip_probability(double h, double chi, double a, bool constrained, int spin, double control, KcsMode mode) {
  const double b = constrained ? barrier_factor(chi, a, control, mode) : 1.0;
  return b * direction_factor(spin, h, control, mode);
}

inline double flip_probability(const KcsChain& chain, int i, double control, KcsMode mode) {
  require(i >= 0 && i < chain.size(), "flip_probability: site out of range");
  return flip_probability(chain.h, chain.chi, chain.a, chain.constrained(i), chain.spins[static_cast<std::size_t>(i)],
                          control, mode);
}

struct KcsTracePoint {
  long sweep = 0;
  double control = 0.0;
  /// Alignment -(1/N) sum S_i after the sweep.
  double m = 0.0;

  friend bool operator==(const KcsTracePoint&, const KcsTracePoint&) = default;
};

struct KcsFlipEvent {
  long sweep = 0;
  int site = 0;
  bool constrained = false;
  int spin_before = 0;
  double probability = 0.0;
};

struct KcsOptions {
  long trace_stride = 1;
  /// Called for every accepted flip with its pre-state.
  std::function<void(const KcsFlipEvent&)> on_flip;
};

struct KcsResult {
  std::optional<long> sweeps_to_target;
  long sweeps = 0;
  double final_m = 0.0;
  long flips = 0;
  long constrained_flips = 0;
  std::vector<KcsTracePoint> trace;

  bool reached() const noexcept { return sweeps_to_target.has_value(); }
  friend bool operator==(const KcsResult& x, const KcsResult& y) {
    return x.sweeps_to_target == y.sweeps_to_target && x.sweeps == y.sweeps && x.final_m == y.final_m &&
           x.flips == y.flips && x.constrained_flips == y.constrained_flips && x.trace == y.trace;
  }
};

/// Sequential sweeps i = 0..N-1 with the schedule evaluated at the sweep
/// index. Stops after the first sweep whose alignment reaches `target`, or
/// at `max_sweeps`. The chain is updated in place.
inline KcsResult kcs_anneal(KcsChain& chain, const KcsSchedule& schedule, long max_sweeps, double target,
                            std::uint64_t seed, const KcsOptions& options = {}) {
  chain.validate();
  schedule.validate();
  require(max_sweeps >= 1, "kcs_anneal: need at least one sweep");
  require(options.trace_stride >= 1, "kcs_anneal: trace stride must be positive");
  Rng rng(seed);
  const int n = chain.size();
  long sum = 0;
  for (int v : chain.spins) sum += v;

  KcsResult r;
  for (long t = 0; t < max_sweeps; ++t) {
    const double control = schedule.value(static_cast<double>(t));
    // p[constrained][spin is up]
    std::array<std::array<double, 2>, 2> p{};
    for (int c = 0; c < 2; ++c)
      for (int up = 0; up < 2; ++up)
        p[static_cast<std::size_t>(c)][static_cast<std::size_t>(up)] =
            flip_probability(chain.h, chain.chi, chain.a, c == 1, up == 1 ? 1 : -1, control, schedule.mode);

    for (int i = 0; i < n; ++i) {
      int& s = chain.spins[static_cast<std::size_t>(i)];
      const bool constrained = chain.spins[static_cast<std::size_t>(i == 0 ? n - 1 : i - 1)] < 0;
      const double prob = p[constrained ? 1 : 0][s > 0 ? 1 : 0];
      if (prob <= 0.0) continue;
      if (prob < 1.0 && !(rng.uniform() < prob)) continue;
      if (options.on_flip) options.on_flip({t, i, constrained, s, prob});
      sum -= 2 * s;
      s = -s;
      ++r.flips;
      if (constrained) ++r.constrained_flips;
    }

    const double m = -static_cast<double>(sum) / n;
    r.sweeps = t + 1;
    if (t % options.trace_stride == 0) r.trace.push_back({t + 1, control, m});
    if (m >= target) {
      r.sweeps_to_target = t + 1;
      if (t % options.trace_stride != 0) r.trace.push_back({t + 1, control, m});
      break;
    }
    if (t == max_sweeps - 1 && t % options.trace_stride != 0) r.trace.push_back({t + 1, control, m});
  }
  r.final_m = chain.alignment();
  return r;
}

/// Trace columns `sweep control m`.
inline void write_kcs_trace(std::ostream& os, const KcsResult& r, KcsMode mode) {
  os << "# mode " << to_string(mode) << '\n';
  os << "# sweeps " << r.sweeps << '\n';
  os << "# sweeps_to_target " << (r.sweeps_to_target ? std::to_string(*r.sweeps_to_target) : "none") << '\n';
  os << "sweep control m\n";
  for (const auto& p : r.trace) os << p.sweep << ' ' << format_double(p.control) << ' ' << format_double(p.m) << '\n';
}

struct KcsComparison {
  KcsResult quantum;
  KcsResult thermal;
  /// Thermal over quantum sweeps to the target. When the thermal run hits
  /// its cap this is cap / quantum sweeps, a lower bound.
  std::optional<double> ratio;
  bool ratio_is_lower_bound = false;
};

/// Runs QA and CA from the same initial chain (stream 0 of `seed`), each
/// with its own dynamics stream.
inline KcsComparison kcs_compare(int n, double h, double chi, double a, const KcsSchedule& quantum,
                                 const KcsSchedule& thermal, long quantum_cap, long thermal_cap, double target,
                                 std::uint64_t seed, long trace_stride = 1) {
  require(quantum.mode == KcsMode::quantum && thermal.mode == KcsMode::thermal,
          "kcs_compare: schedules must be quantum and thermal");
  const KcsChain initial = random_kcs_chain(n, h, chi, a, mix_seed(seed, 0));
  KcsOptions opt;
  opt.trace_stride = trace_stride;
  KcsComparison c;
  KcsChain q = initial;
  c.quantum = kcs_anneal(q, quantum, quantum_cap, target, mix_seed(seed, 1), opt);
  KcsChain th = initial;
  c.thermal = kcs_anneal(th, thermal, thermal_cap, target, mix_seed(seed, 2), opt);
  if (c.quantum.reached()) {
    const double qs = static_cast<double>(*c.quantum.sweeps_to_target);
    if (c.thermal.reached()) {
      c.ratio = static_cast<double>(*c.thermal.sweeps_to_target) / qs;
    } else {
      c.ratio = static_cast<double>(thermal_cap) / qs;
      c.ratio_is_lower_bound = true;
    }
  }
  return c;
}

}  // namespace qanneal
