// qanneal: command-line front end for seeded experiments.
//
//   qanneal anneal   --config ea16.ini --out runs/ea16 [--seed 7] [--workers 4]
//   qanneal oracle   --config ea16.ini [--point 0] [--replica 0] [--out e0.oracle]
//   qanneal plotdata runs/quench --x quench.gamma_f --y o --group-by quench.s
//   qanneal audit    runs/ea16
//
// Exit codes: 0 success, 1 other failure (including a failed audit),
// 2 configuration or usage error, 3 oracle size limit.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qanneal/harness/experiment.hpp"

namespace {

using namespace qanneal;
namespace fs = std::filesystem;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitOracle = 3;

struct RunArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int workers = 1;
};

int run_kind(const std::string& kind, const RunArgs& args) {
  ExperimentConfig cfg = load_experiment_config(args.config);
  if (cfg.kind != kind)
    throw ConfigError("config kind '" + cfg.kind + "' does not match subcommand '" + kind + "'");
  const ExperimentResult r = run_experiment(cfg, {args.out, args.seed, args.workers});
  std::cout << "output " << r.output_dir << '\n';
  std::cout << "runs " << r.manifest.runs.size() << '\n';
  std::cout << "config_hash " << r.manifest.config_hash << '\n';
  std::cout << "manifest_hash " << manifest_hash(r.manifest) << '\n';
  return 0;
}

int run_oracle(const std::string& config, std::size_t point, int replica, const std::string& out) {
  const ExperimentConfig cfg = load_experiment_config(config);
  if (point >= cfg.point_count()) throw ConfigError("oracle: --point out of range");
  if (replica < 0 || replica >= cfg.replicas) throw ConfigError("oracle: --replica out of range");
  const OracleRecord rec = precompute_oracle(cfg, point, replica);
  if (out.empty()) {
    write_oracle(std::cout, rec);
  } else {
    save_oracle(out, rec);
    std::cout << "oracle " << out << " value " << format_double(rec.value) << '\n';
  }
  return 0;
}

int run_plotdata(const std::string& source, const std::string& x, const std::string& y, const std::string& group_by,
                 const std::string& out) {
  std::vector<PlotFile> files;
  if (fs::is_directory(source)) {
    if (!out.empty()) throw ConfigError("plotdata: --out applies to table files only; experiment plots go to <dir>/plots");
    files = emit_plot_data(source, x, y, group_by);
  } else {
    if (!fs::exists(source)) throw ConfigError("plotdata: no such file or directory " + source);
    files = emit_plot_data(load_table(source), x, y, group_by, out.empty() ? std::string(".") : out);
  }
  for (const auto& f : files) std::cout << f.path << '\n';
  return 0;
}

int run_audit(const std::string& dir) {
  const AuditReport report = audit(dir);
  for (const auto& p : report.problems) std::cout << "problem " << p << '\n';
  std::cout << (report.ok() ? "ok" : "FAILED") << ' ' << report.files_checked << " files checked\n";
  return report.ok() ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Seeded annealing experiments: classical, path-integral and exact quantum dynamics"};
  app.set_version_flag("--version", std::string(QANNEAL_VERSION));
  app.require_subcommand(1);

  RunArgs args;
  std::string selected;
  for (const auto& kind : experiment_kinds()) {
    auto* sub = app.add_subcommand(kind, "Run a " + kind + " experiment config");
    sub->add_option("--config", args.config, "Experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "Output directory (overrides experiment.output)");
    sub->add_option("--seed", args.seed, "Master seed (overrides experiment.seed)");
    sub->add_option("--workers", args.workers, "Concurrent runs")->check(CLI::PositiveNumber);
    sub->callback([&selected, kind] { selected = kind; });
  }

  std::string oracle_config, oracle_out;
  std::size_t oracle_point = 0;
  int oracle_replica = 0;
  auto* oracle = app.add_subcommand("oracle", "Enumerate the exact optimum of a config's instance");
  oracle->add_option("--config", oracle_config, "Experiment config file")->required()->check(CLI::ExistingFile);
  oracle->add_option("--point", oracle_point, "Sweep point index");
  oracle->add_option("--replica", oracle_replica, "Replica index (selects the derived instance seed)");
  oracle->add_option("--out", oracle_out, "Oracle file (stdout when omitted)");

  std::string plot_source, plot_x, plot_y, plot_group, plot_out;
  auto* plot = app.add_subcommand("plotdata", "Write x, y, stderr columns per group");
  plot->add_option("source", plot_source, "Experiment directory or whitespace-separated table file")->required();
  plot->add_option("--x", plot_x, "x column")->required();
  plot->add_option("--y", plot_y, "y column")->required();
  plot->add_option("--group-by", plot_group, "Column whose values split the output files");
  plot->add_option("--out", plot_out, "Output directory for table-file input");

  std::string audit_dir;
  auto* audit_cmd = app.add_subcommand("audit", "Check an experiment directory against its manifest");
  audit_cmd->add_option("dir", audit_dir, "Experiment directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (!selected.empty()) return run_kind(selected, args);
    if (oracle->parsed()) return run_oracle(oracle_config, oracle_point, oracle_replica, oracle_out);
    if (plot->parsed()) return run_plotdata(plot_source, plot_x, plot_y, plot_group, plot_out);
    if (audit_cmd->parsed()) return run_audit(audit_dir);
  } catch (const OracleLimitError& e) {
    std::cerr << "oracle limit: " << e.what() << '\n';
    return kExitOracle;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
