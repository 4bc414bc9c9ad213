#pragma once

// Exact reference values for residual metrics, with the enumeration that
// produced them.
//
//   oracle ising | tsp
//   method <name>
//   size <N>
//   value <E0 or optimal length>
//   optima <count>
//   optimum <spins as +/- string> | <city order>
//
// Values are written with 17 significant digits, so a record read back
// compares equal to the one written.

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qanneal/error.hpp"
#include "qanneal/format.hpp"
#include "qanneal/spin/ground_state.hpp"
#include "qanneal/tsp/tour.hpp"

namespace qanneal {

/// Largest tour instance the harness enumerates.
inline constexpr int kHarnessTourLimit = 10;

struct OracleRecord {
  std::string kind;
  std::string method;
  int size = 0;
  double value = 0.0;
  /// Ising optima as "+-+..." strings, or one tour as space-separated cities.
  std::vector<std::string> optima;

  friend bool operator==(const OracleRecord&, const OracleRecord&) = default;
};

inline std::string spin_string(const SpinConfig& c) {
  std::string s;
  s.reserve(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) s.push_back(c[i] > 0 ? '+' : '-');
  return s;
}

inline OracleRecord precompute_oracle(const IsingProblem& problem) {
  if (problem.size() > kMaxBruteForceSpins)
    throw OracleLimitError("oracle: N = " + std::to_string(problem.size()) + " spins exceeds the enumeration limit of " +
                           std::to_string(kMaxBruteForceSpins));
  const auto gs = brute_force_ground_state(problem);
  OracleRecord r{"ising", "gray-code-enumeration", problem.size(), gs.energy, {}};
  for (const auto& c : gs.optima) r.optima.push_back(spin_string(c));
  return r;
}

inline OracleRecord precompute_oracle(const TspInstance& inst) {
  if (inst.size() > kHarnessTourLimit)
    throw OracleLimitError("oracle: N = " + std::to_string(inst.size()) + " cities exceeds the enumeration limit of " +
                           std::to_string(kHarnessTourLimit));
  const auto res = tsp_oracle(inst);
  std::string order;
  for (int c : res.best.order()) order += (order.empty() ? "" : " ") + std::to_string(c);
  return {"tsp", "fixed-first-city-enumeration", inst.size(), res.best.length(), {order}};
}

inline void write_oracle(std::ostream& os, const OracleRecord& r) {
  os << "oracle " << r.kind << '\n';
  os << "method " << r.method << '\n';
  os << "size " << r.size << '\n';
  os << "value " << format_double(r.value) << '\n';
  os << "optima " << r.optima.size() << '\n';
  for (const auto& o : r.optima) os << "optimum " << o << '\n';
}

inline OracleRecord read_oracle(std::istream& is) {
  OracleRecord r;
  auto field = [&](const std::string& key) {
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("oracle file: missing '" + key + "' line");
    if (line.rfind(key + " ", 0) != 0) throw ConfigError("oracle file: expected '" + key + "', got '" + line + "'");
    return line.substr(key.size() + 1);
  };
  r.kind = field("oracle");
  if (r.kind != "ising" && r.kind != "tsp") throw ConfigError("oracle file: unknown kind '" + r.kind + "'");
  r.method = field("method");
  try {
    r.size = std::stoi(field("size"));
    r.value = parse_double(field("value"));
    const long count = std::stol(field("optima"));
    for (long k = 0; k < count; ++k) r.optima.push_back(field("optimum"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("oracle file: malformed number: ") + e.what());
  }
  return r;
}

inline void save_oracle(const std::string& path, const OracleRecord& r) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  write_oracle(os, r);
}

inline OracleRecord load_oracle(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  return read_oracle(is);
}

}  // namespace qanneal
