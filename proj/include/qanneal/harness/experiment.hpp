#pragma once

// Experiment orchestration and its on-disk layout:
//
//   <out>/config.ini        canonical configuration
//   <out>/summary.tsv       mean and standard error per sweep point
//   <out>/runs/pPPPP_rRRRR.trace
//   <out>/oracles/<id>.oracle
//   <out>/plots/*.dat       written by emit_plot_data
//   <out>/manifest.json     every file above, the config hash and the oracles
//
// Runs may execute on several worker threads; all files are written by the
// calling thread after the runs finish, in run order.

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qanneal/error.hpp"
#include "qanneal/format.hpp"
#include "qanneal/harness/config.hpp"
#include "qanneal/harness/drivers.hpp"
#include "qanneal/harness/oracle.hpp"
#include "qanneal/rng.hpp"

#ifndef QANNEAL_VERSION
#define QANNEAL_VERSION "0.1.0"
#endif

namespace qanneal {

inline constexpr const char* kToolVersion = QANNEAL_VERSION;

struct MetricSummary {
  double mean = 0.0;
  double sem = 0.0;
  long count = 0;
};

/// Mean and standard error sd / sqrt(n), with sd the n - 1 estimate; the
/// standard error of a single value is 0.
inline MetricSummary summarize(const std::vector<double>& xs) {
  MetricSummary s;
  s.count = static_cast<long>(xs.size());
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sem = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return s;
}

struct RunEntry {
  std::size_t point = 0;
  int replica = 0;
  std::uint64_t seed = 0;
  /// Relative to the output directory; empty when the kind writes no trace.
  std::string trace;
  std::string oracle;
};

struct OracleEntry {
  std::string id;
  std::string file;
  OracleRecord record;
};

struct ResultManifest {
  std::string config_hash;
  std::string tool_version;
  std::string kind;
  std::uint64_t seed = 0;
  int replicas = 0;
  std::vector<std::vector<std::pair<std::string, std::string>>> points;
  std::vector<RunEntry> runs;
  std::vector<OracleEntry> oracles;
  std::string config_file = "config.ini";
  std::string summary_file = "summary.tsv";
  std::vector<std::string> plots;

  /// Every file the manifest references, relative to the output directory.
  std::vector<std::string> files() const {
    std::vector<std::string> out{config_file, summary_file};
    for (const auto& r : runs)
      if (!r.trace.empty()) out.push_back(r.trace);
    for (const auto& o : oracles) out.push_back(o.file);
    for (const auto& p : plots) out.push_back(p);
    return out;
  }
};

inline nlohmann::ordered_json manifest_json(const ResultManifest& m) {
  nlohmann::ordered_json j;
  j["config_hash"] = m.config_hash;
  j["tool_version"] = m.tool_version;
  j["kind"] = m.kind;
  j["seed"] = m.seed;
  j["replicas"] = m.replicas;
  j["config"] = m.config_file;
  j["summary"] = m.summary_file;
  auto& pts = j["points"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.points.size(); ++i) {
    nlohmann::ordered_json p;
    p["index"] = i;
    auto& ov = p["overrides"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.points[i]) ov[k] = v;
    pts.push_back(p);
  }
  auto& runs = j["runs"] = nlohmann::ordered_json::array();
  for (const auto& r : m.runs) {
    nlohmann::ordered_json e;
    e["point"] = r.point;
    e["replica"] = r.replica;
    e["seed"] = r.seed;
    e["trace"] = r.trace;
    e["oracle"] = r.oracle;
    runs.push_back(e);
  }
  auto& orc = j["oracles"] = nlohmann::ordered_json::array();
  for (const auto& o : m.oracles) {
    nlohmann::ordered_json e;
    e["id"] = o.id;
    e["file"] = o.file;
    e["kind"] = o.record.kind;
    e["method"] = o.record.method;
    e["size"] = o.record.size;
    e["value"] = format_double(o.record.value);
    orc.push_back(e);
  }
  j["plots"] = m.plots;
  return j;
}

inline std::string manifest_text(const ResultManifest& m) { return manifest_json(m).dump(2) + "\n"; }

/// Hash of the manifest text; equal configs give equal manifest hashes.
inline std::string manifest_hash(const ResultManifest& m) { return hex64(fnv1a64(manifest_text(m))); }

inline ResultManifest parse_manifest(const std::string& text) {
  ResultManifest m;
  try {
    const auto j = nlohmann::json::parse(text);
    m.config_hash = j.at("config_hash").get<std::string>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.kind = j.at("kind").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.replicas = j.at("replicas").get<int>();
    m.config_file = j.at("config").get<std::string>();
    m.summary_file = j.at("summary").get<std::string>();
    for (const auto& p : j.at("points")) {
      std::vector<std::pair<std::string, std::string>> ov;
      for (auto it = p.at("overrides").begin(); it != p.at("overrides").end(); ++it)
        ov.emplace_back(it.key(), it.value().get<std::string>());
      m.points.push_back(std::move(ov));
    }
    for (const auto& r : j.at("runs"))
      m.runs.push_back({r.at("point").get<std::size_t>(), r.at("replica").get<int>(), r.at("seed").get<std::uint64_t>(),
                        r.at("trace").get<std::string>(), r.at("oracle").get<std::string>()});
    for (const auto& o : j.at("oracles")) {
      OracleEntry e;
      e.id = o.at("id").get<std::string>();
      e.file = o.at("file").get<std::string>();
      e.record.kind = o.at("kind").get<std::string>();
      e.record.method = o.at("method").get<std::string>();
      e.record.size = o.at("size").get<int>();
      e.record.value = parse_double(o.at("value").get<std::string>());
      m.oracles.push_back(std::move(e));
    }
    m.plots = j.at("plots").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
  return m;
}

inline ResultManifest load_manifest(const std::string& dir) {
  std::ifstream is(std::filesystem::path(dir) / "manifest.json");
  if (!is) throw ConfigError("cannot read manifest in " + dir);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_manifest(ss.str());
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << text;
  if (!os) throw ConfigError("write failed for " + path.string());
}

inline std::string run_name(std::size_t point, int replica) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "runs/p%04zu_r%04d.trace", point, replica);
  return buf;
}

inline std::string cell(double x) { return format_double(x); }

}  // namespace detail

struct RunOptions {
  /// Overrides experiment.output when set.
  std::string output;
  /// Overrides experiment.seed when set.
  std::optional<std::uint64_t> seed;
  int workers = 1;
};

struct ExperimentResult {
  ResultManifest manifest;
  std::string output_dir;
  /// Per point, metric name to summary, in first-seen metric order.
  std::vector<std::vector<std::pair<std::string, MetricSummary>>> summary;
};

/// Executes every (sweep point, replica) run with seed
/// derive_seed(master, point, replica), then writes traces, oracle records,
/// the summary table and the manifest.
inline ExperimentResult run_experiment(ExperimentConfig cfg, const RunOptions& options = {}) {
  if (options.seed) cfg.seed = *options.seed;
  if (!options.output.empty()) cfg.output = options.output;
  if (cfg.output.empty()) throw ConfigError("config: no output directory (experiment.output or --out)");
  if (options.workers < 1) throw ConfigError("workers must be at least 1");
  validate_parameters(cfg);
  namespace fs = std::filesystem;
  const fs::path out_dir(cfg.output);
  std::optional<ResultManifest> previous;
  if (fs::exists(out_dir)) {
    if (!fs::is_directory(out_dir)) throw ConfigError("output " + cfg.output + " is not a directory");
    if (fs::exists(out_dir / "manifest.json"))
      previous = load_manifest(cfg.output);
    else if (!fs::is_empty(out_dir))
      throw ConfigError("output directory " + cfg.output + " is not empty and holds no manifest");
  }

  const std::size_t points = cfg.point_count();
  const std::size_t total = points * static_cast<std::size_t>(cfg.replicas);
  std::vector<RunOutput> outputs(total);
  std::vector<std::exception_ptr> errors(total);
  OracleCache cache;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < total;) {
      const std::size_t point = k / static_cast<std::size_t>(cfg.replicas);
      const int replica = static_cast<int>(k % static_cast<std::size_t>(cfg.replicas));
      try {
        outputs[k] = run_single(cfg, point, derive_seed(cfg.seed, point, static_cast<std::uint64_t>(replica)), &cache);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const int nthreads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(options.workers), std::max<std::size_t>(total, 1)));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  if (previous) {
    for (const auto& f : previous->files()) {
      const fs::path rel(f);
      const bool inside = rel.is_relative() && std::none_of(rel.begin(), rel.end(), [](const fs::path& c) { return c == ".."; });
      if (inside) fs::remove(out_dir / rel);
    }
    fs::remove(out_dir / "manifest.json");
    for (const char* sub : {"runs", "oracles", "plots"})
      if (fs::is_directory(out_dir / sub) && fs::is_empty(out_dir / sub)) fs::remove(out_dir / sub);
  }
  fs::create_directories(out_dir);

  ExperimentResult result;
  result.output_dir = cfg.output;
  ResultManifest& m = result.manifest;
  m.config_hash = config_hash(cfg);
  m.tool_version = kToolVersion;
  m.kind = cfg.kind;
  m.seed = cfg.seed;
  m.replicas = cfg.replicas;
  for (std::size_t p = 0; p < points; ++p) m.points.push_back(cfg.point(p));

  std::map<std::string, OracleEntry> oracles;
  for (std::size_t k = 0; k < total; ++k) {
    const std::size_t point = k / static_cast<std::size_t>(cfg.replicas);
    const int replica = static_cast<int>(k % static_cast<std::size_t>(cfg.replicas));
    const RunOutput& o = outputs[k];
    RunEntry e{point, replica, derive_seed(cfg.seed, point, static_cast<std::uint64_t>(replica)), "", o.oracle_id};
    if (!o.trace.empty()) {
      e.trace = detail::run_name(point, replica);
      detail::write_file(out_dir / e.trace, o.trace);
    }
    if (o.oracle && !oracles.count(o.oracle_id))
      oracles.emplace(o.oracle_id, OracleEntry{o.oracle_id, "oracles/" + o.oracle_id + ".oracle", *o.oracle});
    m.runs.push_back(std::move(e));
  }
  for (const auto& [id, entry] : oracles) {
    std::ostringstream os;
    write_oracle(os, entry.record);
    detail::write_file(out_dir / entry.file, os.str());
    m.oracles.push_back(entry);
  }

  // Summary: metric columns in first-seen order across all runs. A metric a
  // point does not produce (for example a residual without an oracle) is NA.
  std::vector<std::string> names;
  for (const auto& o : outputs)
    for (const auto& [name, v] : o.metrics)
      if (std::find(names.begin(), names.end(), name) == names.end()) names.push_back(name);
  std::ostringstream table;
  table << "point";
  for (const auto& axis : cfg.sweep) table << '\t' << axis.key;
  table << "\treplicas";
  for (const auto& n : names) table << '\t' << n << '\t' << n << "_stderr";
  table << '\n';
  for (std::size_t p = 0; p < points; ++p) {
    std::vector<std::pair<std::string, MetricSummary>> row;
    table << p;
    for (const auto& [k, v] : m.points[p]) table << '\t' << v;
    table << '\t' << cfg.replicas;
    for (const auto& n : names) {
      std::vector<double> xs;
      for (int r = 0; r < cfg.replicas; ++r)
        for (const auto& [name, v] : outputs[p * static_cast<std::size_t>(cfg.replicas) + static_cast<std::size_t>(r)].metrics)
          if (name == n) xs.push_back(v);
      if (xs.empty()) {
        table << "\tNA\tNA";
        continue;
      }
      const auto s = summarize(xs);
      row.emplace_back(n, s);
      table << '\t' << detail::cell(s.mean) << '\t' << detail::cell(s.sem);
    }
    table << '\n';
    result.summary.push_back(std::move(row));
  }
  detail::write_file(out_dir / m.summary_file, table.str());
  detail::write_file(out_dir / m.config_file, canonical_config(cfg));
  detail::write_file(out_dir / "manifest.json", manifest_text(m));
  return result;
}

// ---------------------------------------------------------------------------
// Columnar tables and plot data.

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw ConfigError("unknown column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
  }
  bool has(const std::string& name) const { return std::find(columns.begin(), columns.end(), name) != columns.end(); }
};

/// Whitespace-separated table; '#' lines are skipped and the first other
/// line is the header.
inline Table read_table(std::istream& is) {
  Table t;
  for (std::string line; std::getline(is, line);) {
    if (line.empty() || line[0] == '#') continue;
    auto words = detail::split_words(line);
    if (words.empty()) continue;
    if (t.columns.empty()) {
      t.columns = std::move(words);
    } else {
      if (words.size() != t.columns.size()) throw ConfigError("table: row width does not match the header");
      t.rows.push_back(std::move(words));
    }
  }
  if (t.columns.empty()) throw ConfigError("table: no header line");
  return t;
}

inline Table load_table(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  return read_table(is);
}

namespace detail {

inline std::string file_safe(const std::string& s) {
  std::string out;
  for (char c : s) out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_' ? c : '_');
  return out;
}

inline double sort_key(const std::string& s) {
  try {
    return parse_double(s);
  } catch (const ConfigError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace detail

struct PlotFile {
  std::string path;
  /// Group value, empty without grouping.
  std::string group;
};

/// One file per distinct value of `group_by` (a single file when it is
/// empty), holding columns x, y and y_stderr (when the table has it) with
/// rows sorted by numeric x.
inline std::vector<PlotFile> emit_plot_data(const Table& table, const std::string& x, const std::string& y,
                                            const std::string& group_by, const std::string& out_dir) {
  const std::size_t xi = table.column(x), yi = table.column(y);
  const bool has_err = table.has(y + "_stderr");
  const std::size_t ei = has_err ? table.column(y + "_stderr") : 0;
  const std::size_t gi = group_by.empty() ? 0 : table.column(group_by);
  std::vector<std::string> groups;
  std::map<std::string, std::vector<const std::vector<std::string>*>> rows;
  for (const auto& r : table.rows) {
    const std::string g = group_by.empty() ? "" : r[gi];
    if (!rows.count(g)) groups.push_back(g);
    rows[g].push_back(&r);
  }
  std::vector<PlotFile> out;
  for (const auto& g : groups) {
    auto& rs = rows[g];
    std::stable_sort(rs.begin(), rs.end(),
                     [&](const auto* a, const auto* b) { return detail::sort_key((*a)[xi]) < detail::sort_key((*b)[xi]); });
    std::string name = detail::file_safe(y) + "_vs_" + detail::file_safe(x);
    if (!group_by.empty()) name += "_" + detail::file_safe(group_by) + "_" + detail::file_safe(g);
    const std::string path = (std::filesystem::path(out_dir) / (name + ".dat")).string();
    std::ostringstream os;
    os << x << ' ' << y << (has_err ? " " + y + "_stderr" : "") << '\n';
    for (const auto* r : rs) {
      os << (*r)[xi] << ' ' << (*r)[yi];
      if (has_err) os << ' ' << (*r)[ei];
      os << '\n';
    }
    detail::write_file(path, os.str());
    out.push_back({path, g});
  }
  return out;
}

/// Plot data from an experiment directory's summary, written under
/// <dir>/plots and recorded in the manifest.
inline std::vector<PlotFile> emit_plot_data(const std::string& experiment_dir, const std::string& x, const std::string& y,
                                            const std::string& group_by) {
  namespace fs = std::filesystem;
  ResultManifest m = load_manifest(experiment_dir);
  const Table t = load_table((fs::path(experiment_dir) / m.summary_file).string());
  auto files = emit_plot_data(t, x, y, group_by, (fs::path(experiment_dir) / "plots").string());
  for (const auto& f : files) {
    const std::string rel = fs::relative(f.path, experiment_dir).generic_string();
    if (std::find(m.plots.begin(), m.plots.end(), rel) == m.plots.end()) m.plots.push_back(rel);
  }
  detail::write_file(fs::path(experiment_dir) / "manifest.json", manifest_text(m));
  return files;
}

// ---------------------------------------------------------------------------

struct AuditReport {
  std::vector<std::string> problems;
  std::size_t files_checked = 0;
  bool ok() const noexcept { return problems.empty(); }
};

/// Checks that every referenced file exists, that the stored config hashes
/// to the recorded value, that oracle files match their manifest entries,
/// and that no file under the directory is unreachable from the manifest.
inline AuditReport audit(const std::string& dir) {
  namespace fs = std::filesystem;
  AuditReport rep;
  const ResultManifest m = load_manifest(dir);
  std::set<std::string> listed{"manifest.json"};
  for (const auto& f : m.files()) {
    listed.insert(f);
    ++rep.files_checked;
    if (!fs::is_regular_file(fs::path(dir) / f)) rep.problems.push_back("missing file: " + f);
  }
  if (fs::is_regular_file(fs::path(dir) / m.config_file)) {
    try {
      const auto cfg = load_experiment_config((fs::path(dir) / m.config_file).string());
      if (config_hash(cfg) != m.config_hash) rep.problems.push_back("config hash mismatch: stored config hashes to " + config_hash(cfg));
    } catch (const ConfigError& e) {
      rep.problems.push_back(std::string("stored config does not parse: ") + e.what());
    }
  }
  for (const auto& o : m.oracles) {
    if (!fs::is_regular_file(fs::path(dir) / o.file)) continue;
    try {
      const auto rec = load_oracle((fs::path(dir) / o.file).string());
      if (rec.value != o.record.value || rec.kind != o.record.kind || rec.method != o.record.method)
        rep.problems.push_back("oracle file disagrees with manifest: " + o.file);
    } catch (const ConfigError& e) {
      rep.problems.push_back("oracle file unreadable: " + o.file + ": " + e.what());
    }
  }
  std::set<std::string> oracle_ids;
  for (const auto& o : m.oracles) oracle_ids.insert(o.id);
  for (const auto& r : m.runs)
    if (!r.oracle.empty() && !oracle_ids.count(r.oracle)) rep.problems.push_back("run cites unknown oracle " + r.oracle);
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = fs::relative(entry.path(), dir).generic_string();
    if (!listed.count(rel)) rep.problems.push_back("file not in manifest: " + rel);
  }
  return rep;
}

}  // namespace qanneal
