#pragma once

// One run of each experiment kind, driven by a resolved parameter set.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qanneal/classical/anneal.hpp"
#include "qanneal/classical/schedule.hpp"
#include "qanneal/harness/config.hpp"
#include "qanneal/harness/oracle.hpp"
#include "qanneal/kcs/kcs.hpp"
#include "qanneal/pimc/pimc.hpp"
#include "qanneal/quench/quench.hpp"
#include "qanneal/run_record.hpp"
#include "qanneal/schro/evolve.hpp"
#include "qanneal/schro/hamiltonian.hpp"
#include "qanneal/spin/ising_problem.hpp"
#include "qanneal/spin/problem_io.hpp"
#include "qanneal/tsp/anneal.hpp"
#include "qanneal/tsp/instance.hpp"

namespace qanneal {

struct RunOutput {
  /// Summary columns in a fixed order.
  std::vector<std::pair<std::string, double>> metrics;
  /// Columnar trace; empty when the kind has none.
  std::string trace;
  /// Oracle used by this run, if any, with its content hash.
  std::optional<OracleRecord> oracle;
  std::string oracle_id;
};

/// Oracle records shared by runs on the same instance. Thread-safe; the
/// record for a given instance text is deterministic, so concurrent
/// computation order does not matter.
class OracleCache {
 public:
  template <class Make>
  std::pair<std::string, OracleRecord> get(const std::string& instance_text, Make&& make) {
    const std::string id = hex64(fnv1a64(instance_text));
    {
      std::lock_guard lock(mu_);
      if (auto it = cache_.find(id); it != cache_.end()) return {id, it->second};
    }
    OracleRecord r = make();
    std::lock_guard lock(mu_);
    cache_.emplace(id, r);
    return {id, r};
  }

 private:
  std::mutex mu_;
  std::map<std::string, OracleRecord> cache_;
};

struct RunContext {
  std::uint64_t seed = 0;
  OracleCache* oracles = nullptr;
};

namespace detail {

inline IsingProblem build_problem(ParamReader& p, std::uint64_t run_seed) {
  if (auto file = p.raw("problem", "file")) return load_problem(*file);
  const std::string model = p.str("problem", "model", "sk");
  const long n = p.integer("problem", "n", 16);
  if (n < 2) throw ConfigError("config: problem.n must be at least 2");
  const double j = p.real("problem", "J", 1.0);
  const std::uint64_t instance_seed = p.seed("problem", "instance_seed", mix_seed(run_seed, 1));
  const double field = p.real("problem", "field", 0.0);
  Topology topology;
  if (model == "sk") {
    topology = Topology::complete;
  } else if (model == "ea") {
    topology = Topology::square_periodic;
  } else if (model == "ferro") {
    const std::string t = p.str("problem", "topology", "complete");
    if (t != "complete" && t != "square-periodic") throw ConfigError("config: unknown topology '" + t + "'");
    return uniform_problem(t == "complete" ? Topology::complete : Topology::square_periodic, static_cast<int>(n), j);
  } else {
    throw ConfigError("config: unknown problem.model '" + model + "' (sk, ea, ferro)");
  }
  const std::string disorder = p.str("problem", "disorder", "gaussian");
  DisorderModel dm;
  if (disorder == "gaussian") {
    dm = DisorderModel::gaussian(j, instance_seed);
  } else if (disorder == "binary") {
    dm = DisorderModel::binary(j, p.real("problem", "p", 0.5), instance_seed);
  } else {
    throw ConfigError("config: unknown problem.disorder '" + disorder + "'");
  }
  return sample_disorder(dm, topology, static_cast<int>(n), FieldModel{field});
}

/// [schedule] type = exponential | linear | logarithmic | constant | power-law-mn.
inline Schedule build_schedule(ParamReader& p, const Schedule& fallback, long sweeps, int n) {
  if (!p.has("schedule", "type")) return fallback;
  const std::string type = p.str("schedule", "type", "");
  if (type == "exponential") {
    const double x0 = p.real("schedule", "x0", 3.0);
    if (auto end = p.optional_real("schedule", "x_end"))
      return exponential_between(x0, *end, static_cast<double>(sweeps));
    return schedule::Exponential{x0, p.real("schedule", "tau", static_cast<double>(sweeps) / 5.0)};
  }
  if (type == "linear") return schedule::Linear{p.real("schedule", "x0", 3.0), p.real("schedule", "tau", static_cast<double>(sweeps))};
  if (type == "logarithmic") return schedule::Logarithmic{p.real("schedule", "n", static_cast<double>(n))};
  if (type == "constant") return schedule::Constant{p.real("schedule", "x", 1.0)};
  if (type == "power-law-mn")
    return schedule::PowerLawMN{p.real("schedule", "m", 20.0), p.real("schedule", "temperature", 0.05),
                                p.real("schedule", "r", 1.0), p.real("schedule", "l", static_cast<double>(n))};
  throw ConfigError("config: unknown schedule.type '" + type + "'");
}

inline std::string problem_text(const IsingProblem& problem) {
  std::ostringstream os;
  write_problem(os, problem);
  return os.str();
}

/// E0 for a spin problem: supplied value, enumeration within the limit, or
/// nothing. A required oracle beyond the limit raises OracleLimitError.
inline void attach_ising_oracle(ParamReader& p, const IsingProblem& problem, const RunContext& ctx, RunOutput& out) {
  const bool required = p.flag("oracle", "require", false);
  if (auto e0 = p.optional_real("oracle", "e0")) {
    out.oracle = OracleRecord{"ising", "supplied", problem.size(), *e0, {}};
    out.oracle_id = hex64(fnv1a64(problem_text(problem) + "supplied " + format_double(*e0)));
    return;
  }
  if (problem.size() > kMaxBruteForceSpins) {
    if (required)
      throw OracleLimitError("oracle: residual energy requested for N = " + std::to_string(problem.size()) +
                             " spins without a supplied oracle.e0");
    return;
  }
  if (!p.flag("oracle", "enumerate", true)) {
    if (required) throw ConfigError("config: oracle.require is set but enumeration is disabled and no e0 is given");
    return;
  }
  auto make = [&] { return precompute_oracle(problem); };
  if (ctx.oracles) {
    auto [id, rec] = ctx.oracles->get(problem_text(problem), make);
    out.oracle_id = id;
    out.oracle = rec;
  } else {
    out.oracle = make();
    out.oracle_id = hex64(fnv1a64(problem_text(problem)));
  }
}

inline void add_record_metrics(const RunRecord& r, RunOutput& out) {
  out.metrics.push_back({"final_energy", r.final_energy});
  if (out.oracle) out.metrics.push_back({"residual_energy", residual_energy(r, out.oracle->value)});
  if (out.oracle) out.metrics.push_back({"found_ground", r.final_energy - out.oracle->value <= 1e-9 * std::max(1.0, std::abs(out.oracle->value)) ? 1.0 : 0.0});
  for (const auto& [k, v] : r.extras) out.metrics.push_back({k, v});
  std::ostringstream os;
  write_trace(os, r);
  out.trace = os.str();
}

}  // namespace detail

inline RunOutput run_anneal(ParamReader& p, const RunContext& ctx) {
  const IsingProblem problem = detail::build_problem(p, ctx.seed);
  const long sweeps = p.integer("anneal", "sweeps", 1000);
  if (sweeps < 1) throw ConfigError("config: anneal.sweeps must be positive");
  AnnealOptions opt;
  opt.trace_stride = p.integer("anneal", "trace_stride", 100);
  opt.random_order = p.flag("anneal", "random_order", false);
  const long restarts = p.integer("anneal", "restarts", 1);
  const Schedule sched = detail::build_schedule(p, exponential_between(3.0, 0.05, static_cast<double>(sweeps)), sweeps, problem.size());
  RunOutput out;
  detail::attach_ising_oracle(p, problem, ctx, out);
  const RunRecord r = anneal_best_of(problem, sched, sweeps, mix_seed(ctx.seed, 0), static_cast<int>(restarts), opt);
  detail::add_record_metrics(r, out);
  return out;
}

inline RunOutput run_pimc(ParamReader& p, const RunContext& ctx) {
  const IsingProblem problem = detail::build_problem(p, ctx.seed);
  QaParams q = default_qa_params(p.integer("pimc", "sweeps", 1000));
  q.m = static_cast<int>(p.integer("pimc", "m", q.m));
  q.temperature = p.real("pimc", "temperature", q.temperature);
  q.trace_stride = p.integer("pimc", "trace_stride", q.trace_stride);
  q.polish = p.flag("pimc", "polish", q.polish);
  q.gamma = detail::build_schedule(p, q.gamma, q.sweeps, problem.size());
  q.validate();
  const long restarts = p.integer("pimc", "restarts", 1);
  RunOutput out;
  detail::attach_ising_oracle(p, problem, ctx, out);
  const RunRecord r = pimc_anneal_best_of(problem, q, mix_seed(ctx.seed, 0), static_cast<int>(restarts));
  detail::add_record_metrics(r, out);
  return out;
}

/// Schroedinger evolution of (1 - t/tau)(-sum sigma^x) + (t/tau) H_C from the
/// uniform superposition.
inline RunOutput run_tdse(ParamReader& p, const RunContext& ctx) {
  const IsingProblem problem = detail::build_problem(p, ctx.seed);
  if (problem.size() > kMaxMatrixFreeSpins)
    throw OracleLimitError("tdse: N = " + std::to_string(problem.size()) + " exceeds the state-vector limit of 24");
  const double tau = p.real("tdse", "tau", 10.0);
  if (!(tau > 0.0)) throw ConfigError("config: tdse.tau must be positive");
  RealVector d = classical_diagonal(problem);
  const auto targets = minimizers(d);
  const RealVector diag = d;
  const Hamiltonian h = diagonal_interpolation(std::move(d), "tim-anneal");
  EvolveOptions opt;
  opt.steps = p.integer("tdse", "steps", 0);
  opt.targets = targets;
  opt.trace_stride = p.integer("tdse", "trace_stride", 0);
  RunOutput out;
  detail::attach_ising_oracle(p, problem, ctx, out);
  const EvolveResult r = anneal_state(h, tau, opt);
  const double e = (r.state.cwiseAbs2().array() * diag.array()).sum();
  out.metrics.push_back({"p_ground", probability_on(r.state, targets)});
  out.metrics.push_back({"energy", e});
  if (out.oracle) out.metrics.push_back({"residual_energy", std::max(e - out.oracle->value, 0.0)});
  out.metrics.push_back({"steps", static_cast<double>(r.steps)});
  out.metrics.push_back({"norm_drift_rate", r.norm_drift_rate});
  if (!r.trace.empty()) {
    std::ostringstream os;
    write_evolution_trace(os, r.trace);
    out.trace = os.str();
  }
  return out;
}

namespace detail {

inline TspInstance build_tsp_instance(ParamReader& p, std::uint64_t run_seed) {
  if (auto file = p.raw("tsp", "file")) return load_tsp_instance(*file);
  const long n = p.integer("tsp", "n", 100);
  const std::uint64_t iseed = p.seed("tsp", "instance_seed", mix_seed(run_seed, 1));
  const TspMetric metric = parse_tsp_metric(p.str("tsp", "metric", "euclidean-2d"));
  if (n < 3) throw ConfigError("config: tsp.n must be at least 3");
  return metric == TspMetric::euclidean_2d ? euclidean_instance(static_cast<int>(n), iseed)
                                           : random_metric_instance(static_cast<int>(n), iseed);
}

}  // namespace detail

inline RunOutput run_tsp(ParamReader& p, const RunContext& ctx) {
  std::optional<TspInstance> inst = detail::build_tsp_instance(p, ctx.seed);
  const std::string method = p.str("tsp", "method", "ca");
  const long sweeps = p.integer("tsp", "sweeps", 1000);
  RunOutput out;
  if (inst->size() <= kHarnessTourLimit && p.flag("oracle", "enumerate", true)) {
    std::ostringstream os;
    write_tsp_instance(os, *inst);
    auto make = [&] { return precompute_oracle(*inst); };
    if (ctx.oracles) {
      auto [id, rec] = ctx.oracles->get(os.str(), make);
      out.oracle_id = id;
      out.oracle = rec;
    } else {
      out.oracle = make();
      out.oracle_id = hex64(fnv1a64(os.str()));
    }
  } else if (p.flag("oracle", "require", false)) {
    throw OracleLimitError("oracle: optimal tour requested for N = " + std::to_string(inst->size()) +
                           " cities beyond the enumeration limit of " + std::to_string(kHarnessTourLimit));
  }

  std::optional<Tour> best;
  RunRecord record;
  if (method == "greedy") {
    best = greedy_tour(*inst, static_cast<int>(p.integer("tsp", "start", 0)));
  } else if (method == "ca") {
    CaTspOptions opt;
    opt.trace_stride = p.integer("tsp", "trace_stride", 100);
    const Schedule sched = exponential_between(p.real("tsp", "t0", 2.0), p.real("tsp", "t_end", 0.005), static_cast<double>(sweeps));
    auto run = ca_tsp(*inst, sched, sweeps, mix_seed(ctx.seed, 0), opt);
    best = run.best;
    record = std::move(run.record);
  } else if (method == "qa") {
    QaParams q = default_tsp_qa_params(sweeps);
    q.m = static_cast<int>(p.integer("tsp", "m", q.m));
    q.temperature = p.real("tsp", "temperature", q.temperature);
    q.gamma = schedule::Linear{p.real("tsp", "gamma0", 0.3), static_cast<double>(sweeps)};
    q.trace_stride = p.integer("tsp", "trace_stride", 100);
    auto run = pimc_tsp(*inst, q, mix_seed(ctx.seed, 0));
    best = run.best;
    record = std::move(run.record);
  } else {
    throw ConfigError("config: unknown tsp.method '" + method + "' (ca, qa, greedy)");
  }
  out.metrics.push_back({"best_length", best->length()});
  if (inst->metric() == TspMetric::euclidean_2d)
    out.metrics.push_back({"omega", omega(best->length(), inst->size(), inst->metric())});
  if (out.oracle) out.metrics.push_back({"residual_length", std::max(best->length() - out.oracle->value, 0.0)});
  if (method != "greedy") {
    for (const auto& [k, v] : record.extras)
      if (k != "best_length" && k != "omega") out.metrics.push_back({k, v});
    std::ostringstream os;
    write_trace(os, record);
    out.trace = os.str();
  }
  return out;
}

inline RunOutput run_kcs(ParamReader& p, const RunContext& ctx) {
  const long n = p.integer("kcs", "n", 1000);
  const double h = p.real("kcs", "h", 1.0);
  const double chi = p.real("kcs", "chi", 1000.0);
  const double a = p.has("kcs", "a") ? p.real("kcs", "a", 0.0) : barrier_width(chi, p.real("kcs", "g", 100.0));
  const std::string mode = p.str("kcs", "mode", "quantum");
  if (mode != "quantum" && mode != "thermal") throw ConfigError("config: kcs.mode must be quantum or thermal");
  KcsSchedule sched{mode == "quantum" ? KcsMode::quantum : KcsMode::thermal, p.real("kcs", "x0", 100.0),
                    p.real("kcs", "tau", mode == "quantum" ? 180.0 : 1e6)};
  const long cap = p.integer("kcs", "max_sweeps", 100000);
  const double target = p.real("kcs", "target", 0.92);
  KcsOptions opt;
  opt.trace_stride = p.integer("kcs", "trace_stride", 100);
  if (n < 2) throw ConfigError("config: kcs.n must be at least 2");
  KcsChain chain = random_kcs_chain(static_cast<int>(n), h, chi, a, p.seed("kcs", "instance_seed", mix_seed(ctx.seed, 1)));
  const KcsResult r = kcs_anneal(chain, sched, cap, target, mix_seed(ctx.seed, 0), opt);
  RunOutput out;
  out.metrics.push_back({"reached", r.reached() ? 1.0 : 0.0});
  out.metrics.push_back({"sweeps_to_target",
                         r.reached() ? static_cast<double>(*r.sweeps_to_target) : std::numeric_limits<double>::quiet_NaN()});
  out.metrics.push_back({"sweeps", static_cast<double>(r.sweeps)});
  out.metrics.push_back({"final_m", r.final_m});
  out.metrics.push_back({"flips", static_cast<double>(r.flips)});
  out.metrics.push_back({"constrained_flips", static_cast<double>(r.constrained_flips)});
  std::ostringstream os;
  write_kcs_trace(os, r, sched.mode);
  out.trace = os.str();
  return out;
}

inline RunOutput run_quench(ParamReader& p, const RunContext&) {
  QuenchParams q;
  q.j = p.real("quench", "j", 1.0);
  q.gamma_i = p.real("quench", "gamma_i", 2.0);
  q.gamma_f = p.real("quench", "gamma_f", 0.25);
  q.s = p.real("quench", "s", 100.0);
  QuenchWindow w;
  w.periods = p.real("quench", "periods", 50.0);
  w.t_begin = p.optional_real("quench", "t_begin");
  w.t_end = p.optional_real("quench", "t_end");
  const bool semiclassical = p.flag("quench", "semiclassical", false);
  const QuenchResult r = quench_quantum(q, w);
  RunOutput out;
  out.metrics.push_back({"gamma_f_over_j", q.gamma_f / q.j});
  out.metrics.push_back({"o", r.o});
  out.metrics.push_back({"static_value", r.static_value});
  out.metrics.push_back({"period", r.period});
  out.metrics.push_back({"short_window", r.short_window ? 1.0 : 0.0});
  if (semiclassical) {
    SemiclassicalOptions so;
    so.spin = p.real("quench", "semiclassical_spin", 500.0);
    out.metrics.push_back({"o_semiclassical", long_time_average_semiclassical(q.gamma_f, q.j, so)});
  }
  return out;
}

using Driver = std::function<RunOutput(ParamReader&, const RunContext&)>;

inline Driver driver_for(const std::string& kind) {
  if (kind == "anneal") return run_anneal;
  if (kind == "pimc") return run_pimc;
  if (kind == "tdse") return run_tdse;
  if (kind == "tsp") return run_tsp;
  if (kind == "kcs") return run_kcs;
  if (kind == "quench") return run_quench;
  throw ConfigError("config: unknown experiment kind '" + kind + "'");
}

/// Parameter keys each kind understands, by section.
inline std::map<std::string, std::set<std::string>> known_parameters(const std::string& kind) {
  const std::set<std::string> problem{"file", "model", "n", "J", "instance_seed", "field", "topology", "disorder", "p"};
  const std::set<std::string> sched{"type", "x0", "x_end", "tau", "n", "x", "m", "temperature", "r", "l"};
  const std::set<std::string> oracle{"require", "enumerate", "e0"};
  if (kind == "anneal")
    return {{"problem", problem}, {"schedule", sched}, {"oracle", oracle},
            {"anneal", {"sweeps", "trace_stride", "random_order", "restarts"}}};
  if (kind == "pimc")
    return {{"problem", problem}, {"schedule", sched}, {"oracle", oracle},
            {"pimc", {"sweeps", "m", "temperature", "trace_stride", "polish", "restarts"}}};
  if (kind == "tdse") return {{"problem", problem}, {"oracle", oracle}, {"tdse", {"tau", "steps", "trace_stride"}}};
  if (kind == "tsp")
    return {{"oracle", {"require", "enumerate"}},
            {"tsp", {"file", "n", "instance_seed", "metric", "method", "sweeps", "start", "trace_stride", "t0", "t_end", "m",
                     "temperature", "gamma0"}}};
  if (kind == "kcs")
    return {{"kcs", {"n", "h", "chi", "a", "g", "mode", "x0", "tau", "max_sweeps", "target", "trace_stride", "instance_seed"}}};
  if (kind == "quench")
    return {{"quench", {"j", "gamma_i", "gamma_f", "s", "periods", "t_begin", "t_end", "semiclassical", "semiclassical_spin"}}};
  throw ConfigError("config: unknown experiment kind '" + kind + "'");
}

/// Rejects sections and keys, including sweep axes, that the kind does not
/// use.
inline void validate_parameters(const ExperimentConfig& cfg) {
  const auto known = known_parameters(cfg.kind);
  auto check = [&](const std::string& section, const std::string& key) {
    const auto it = known.find(section);
    if (it == known.end() || !it->second.count(key))
      throw ConfigError("config: unknown parameter " + section + "." + key + " for kind " + cfg.kind);
  };
  for (const auto& [name, sec] : cfg.sections)
    for (const auto& [k, v] : sec) check(name, k);
  for (const auto& axis : cfg.sweep) {
    const auto dot = axis.key.find('.');
    check(axis.key.substr(0, dot), axis.key.substr(dot + 1));
  }
}

/// Runs one (point, replica) of a config.
inline RunOutput run_single(const ExperimentConfig& cfg, std::size_t point, std::uint64_t seed, OracleCache* cache) {
  validate_parameters(cfg);
  const auto sections = cfg.resolved(point);
  ParamReader reader(sections);
  RunContext ctx{seed, cache};
  try {
    return driver_for(cfg.kind)(reader, ctx);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("invalid parameter: ") + e.what());
  }
}

/// Enumerated oracle for the instance that run (point, replica) of a spin
/// or tour config would solve.
inline OracleRecord precompute_oracle(const ExperimentConfig& cfg, std::size_t point = 0, int replica = 0) {
  validate_parameters(cfg);
  const auto sections = cfg.resolved(point);
  ParamReader reader(sections);
  const std::uint64_t seed = derive_seed(cfg.seed, point, static_cast<std::uint64_t>(replica));
  try {
    if (cfg.kind == "anneal" || cfg.kind == "pimc" || cfg.kind == "tdse")
      return precompute_oracle(detail::build_problem(reader, seed));
    if (cfg.kind == "tsp") return precompute_oracle(detail::build_tsp_instance(reader, seed));
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("invalid parameter: ") + e.what());
  }
  throw ConfigError("oracle: kind " + cfg.kind + " has no enumerable instance");
}

}  // namespace qanneal
