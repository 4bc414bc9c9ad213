#pragma once

// Experiment configuration: flat key = value lines under [section] headers.
//
//   [experiment]
//   kind = anneal
//   replicas = 20
//   seed = 42
//   output = runs/ea16
//
//   [problem]
//   model = ea
//   n = 16
//
//   [sweep]
//   anneal.sweeps = 100 1000 10000
//
// Lines starting with '#' or ';' are comments. Keys under [sweep] name the
// overridden parameter as section.key and list its values separated by
// whitespace. The sweep grid is the cartesian product in file order, with
// the last key varying fastest.

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qanneal/error.hpp"
#include "qanneal/format.hpp"
#include "qanneal/rng.hpp"

namespace qanneal {

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"anneal", "pimc", "tdse", "tsp", "kcs", "quench"};
  return kinds;
}

using ConfigSection = std::map<std::string, std::string>;

struct SweepAxis {
  /// section.key
  std::string key;
  std::vector<std::string> values;
};

struct ExperimentConfig {
  std::string kind;
  int replicas = 1;
  std::uint64_t seed = 0;
  std::string output;
  /// Parameter sections other than [experiment] and [sweep].
  std::map<std::string, ConfigSection> sections;
  std::vector<SweepAxis> sweep;

  std::size_t point_count() const {
    std::size_t n = 1;
    for (const auto& a : sweep) n *= a.values.size();
    return n;
  }

  /// Overrides applied at sweep point `index`, in axis order.
  std::vector<std::pair<std::string, std::string>> point(std::size_t index) const {
    require(index < point_count(), "ExperimentConfig: sweep point out of range");
    std::vector<std::pair<std::string, std::string>> out(sweep.size());
    for (std::size_t k = sweep.size(); k-- > 0;) {
      const auto& axis = sweep[k];
      out[k] = {axis.key, axis.values[index % axis.values.size()]};
      index /= axis.values.size();
    }
    return out;
  }

  /// Parameter sections with the overrides of one sweep point applied.
  std::map<std::string, ConfigSection> resolved(std::size_t index) const {
    auto out = sections;
    for (const auto& [key, value] : point(index)) {
      const auto dot = key.find('.');
      out[key.substr(0, dot)][key.substr(dot + 1)] = value;
    }
    return out;
  }
};

namespace detail {

inline std::string config_trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

}  // namespace detail

/// Parses the text form. Every error, including unknown kinds, malformed
/// lines and duplicate keys, raises ConfigError with the line number.
inline ExperimentConfig parse_experiment_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string section;
  std::set<std::string> seen;
  std::map<std::string, std::string> experiment;
  int line_no = 0;
  for (std::string raw; std::getline(is, raw);) {
    ++line_no;
    const std::string line = detail::config_trim(raw);
    const auto where = [&] { return " (line " + std::to_string(line_no) + ")"; };
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("config: unterminated section header" + where());
      section = detail::config_trim(line.substr(1, line.size() - 2));
      if (section.empty() || section.find_first_of(" .=") != std::string::npos)
        throw ConfigError("config: invalid section name '" + section + "'" + where());
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: expected key = value" + where());
    if (section.empty()) throw ConfigError("config: key outside any section" + where());
    const std::string key = detail::config_trim(line.substr(0, eq));
    const std::string value = detail::config_trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key" + where());
    if (!seen.insert(section + "." + key).second)
      throw ConfigError("config: duplicate key " + section + "." + key + where());
    if (section == "experiment") {
      experiment[key] = value;
    } else if (section == "sweep") {
      const auto dot = key.find('.');
      if (dot == std::string::npos || dot == 0 || dot + 1 == key.size())
        throw ConfigError("config: sweep keys must be section.key" + where());
      auto values = detail::split_words(value);
      if (values.empty()) throw ConfigError("config: sweep axis " + key + " has no values" + where());
      cfg.sweep.push_back({key, std::move(values)});
    } else {
      cfg.sections[section][key] = value;
    }
  }

  for (const auto& [k, v] : experiment) {
    if (k == "kind") {
      cfg.kind = v;
    } else if (k == "replicas") {
      try {
        std::size_t used = 0;
        const long r = std::stol(v, &used);
        if (used != v.size() || r < 1 || r > 1000000) throw ConfigError("");
        cfg.replicas = static_cast<int>(r);
      } catch (const std::exception&) {
        throw ConfigError("config: replicas must be a positive integer, got '" + v + "'");
      }
    } else if (k == "seed") {
      try {
        std::size_t used = 0;
        if (v.empty() || v[0] == '-') throw ConfigError("");
        cfg.seed = std::stoull(v, &used);
        if (used != v.size()) throw ConfigError("");
      } catch (const std::exception&) {
        throw ConfigError("config: seed must be an unsigned 64-bit integer, got '" + v + "'");
      }
    } else if (k == "output") {
      cfg.output = v;
    } else {
      throw ConfigError("config: unknown key experiment." + k);
    }
  }
  if (cfg.kind.empty()) throw ConfigError("config: experiment.kind is required");
  bool known = false;
  for (const auto& k : experiment_kinds()) known = known || k == cfg.kind;
  if (!known) throw ConfigError("config: unknown experiment kind '" + cfg.kind + "'");
  if (!experiment.count("seed")) throw ConfigError("config: experiment.seed is required (no implicit seeding)");
  return cfg;
}

inline ExperimentConfig parse_experiment_config(const std::string& text) {
  std::istringstream is(text);
  return parse_experiment_config(is);
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path);
  return parse_experiment_config(is);
}

/// Canonical text: sections in sorted order, sweep axes in file order. Two
/// configs with the same content produce the same bytes. The output
/// directory is not part of it, so a rerun into a new directory hashes the
/// same.
inline std::string canonical_config(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "[experiment]\n";
  os << "kind = " << cfg.kind << '\n';
  os << "replicas = " << cfg.replicas << '\n';
  os << "seed = " << cfg.seed << '\n';
  for (const auto& [name, sec] : cfg.sections) {
    os << "\n[" << name << "]\n";
    for (const auto& [k, v] : sec) os << k << " = " << v << '\n';
  }
  if (!cfg.sweep.empty()) {
    os << "\n[sweep]\n";
    for (const auto& axis : cfg.sweep) {
      os << axis.key << " =";
      for (const auto& v : axis.values) os << ' ' << v;
      os << '\n';
    }
  }
  return os.str();
}

inline std::string hex64(std::uint64_t x) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int k = 15; k >= 0; --k, x >>= 4) s[static_cast<std::size_t>(k)] = digits[x & 0xF];
  return s;
}

inline std::string config_hash(const ExperimentConfig& cfg) { return hex64(fnv1a64(canonical_config(cfg))); }

/// Typed access to resolved parameter sections.
class ParamReader {
 public:
  explicit ParamReader(const std::map<std::string, ConfigSection>& sections) : sections_(sections) {}

  bool has(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
  }

  std::optional<std::string> raw(const std::string& section, const std::string& key) {
    if (!has(section, key)) return std::nullopt;
    return sections_.at(section).at(key);
  }

  std::string str(const std::string& section, const std::string& key, const std::string& fallback) {
    return raw(section, key).value_or(fallback);
  }

  std::string required_str(const std::string& section, const std::string& key) {
    auto v = raw(section, key);
    if (!v) throw ConfigError("config: " + section + "." + key + " is required");
    return *v;
  }

  double real(const std::string& section, const std::string& key, double fallback) {
    auto v = raw(section, key);
    return v ? to_real(section + "." + key, *v) : fallback;
  }

  std::optional<double> optional_real(const std::string& section, const std::string& key) {
    auto v = raw(section, key);
    if (!v) return std::nullopt;
    return to_real(section + "." + key, *v);
  }

  long integer(const std::string& section, const std::string& key, long fallback) {
    auto v = raw(section, key);
    if (!v) return fallback;
    const double d = to_real(section + "." + key, *v);
    if (d != std::floor(d) || std::abs(d) > 9e15) throw ConfigError("config: " + section + "." + key + " must be an integer");
    return static_cast<long>(d);
  }

  std::uint64_t seed(const std::string& section, const std::string& key, std::uint64_t fallback) {
    auto v = raw(section, key);
    if (!v) return fallback;
    try {
      std::size_t used = 0;
      if (v->empty() || (*v)[0] == '-') throw ConfigError("");
      const auto s = std::stoull(*v, &used);
      if (used != v->size()) throw ConfigError("");
      return s;
    } catch (const std::exception&) {
      throw ConfigError("config: " + section + "." + key + " must be an unsigned integer");
    }
  }

  bool flag(const std::string& section, const std::string& key, bool fallback) {
    auto v = raw(section, key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    throw ConfigError("config: " + section + "." + key + " must be true or false");
  }

 private:
  static double to_real(const std::string& name, const std::string& v) {
    try {
      return parse_double(v);
    } catch (const std::exception&) {
      throw ConfigError("config: " + name + " must be a number, got '" + v + "'");
    }
  }

  const std::map<std::string, ConfigSection>& sections_;
};

}  // namespace qanneal
