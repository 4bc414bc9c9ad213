#pragma once

// Symmetric TSP instances: Euclidean cities in a sqrt(N) box or i.i.d.
// random distances, plus the native and TSPLIB-style readers.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qanneal/error.hpp"
#include "qanneal/format.hpp"
#include "qanneal/rng.hpp"

namespace qanneal {

enum class TspMetric { euclidean_2d, random };

inline std::string to_string(TspMetric m) { return m == TspMetric::euclidean_2d ? "euclidean-2d" : "random"; }

inline TspMetric parse_tsp_metric(const std::string& s) {
  if (s == "euclidean-2d" || s == "euclidean") return TspMetric::euclidean_2d;
  if (s == "random") return TspMetric::random;
  throw InvalidArgument("unknown TSP metric '" + s + "'");
}

using City = std::array<double, 2>;

class TspInstance {
 public:
  /// Euclidean instance from coordinates.
  explicit TspInstance(std::vector<City> cities) : n_(static_cast<int>(cities.size())), metric_(TspMetric::euclidean_2d) {
    require(n_ >= 2, "TspInstance: need at least two cities");
    d_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        const auto& a = cities[static_cast<std::size_t>(i)];
        const auto& b = cities[static_cast<std::size_t>(j)];
        set(i, j, std::hypot(a[0] - b[0], a[1] - b[1]));
      }
    cities_ = std::move(cities);
  }

  /// Random-metric instance from a full distance matrix (row-major, N x N).
  TspInstance(int n, std::vector<double> distances) : n_(n), metric_(TspMetric::random), d_(std::move(distances)) {
    require(n_ >= 2, "TspInstance: need at least two cities");
    require(d_.size() == static_cast<std::size_t>(n_) * n_, "TspInstance: distance matrix must be N x N");
    for (int i = 0; i < n_; ++i) {
      require(at(i, i) == 0.0, "TspInstance: diagonal distances must be zero");
      for (int j = i + 1; j < n_; ++j) {
        require(at(i, j) == at(j, i), "TspInstance: distance matrix must be symmetric");
        require(at(i, j) >= 0.0 && std::isfinite(at(i, j)), "TspInstance: distances must be finite and non-negative");
      }
    }
  }

  int size() const noexcept { return n_; }
  TspMetric metric() const noexcept { return metric_; }
  const std::vector<City>& cities() const noexcept { return cities_; }

  double distance(int i, int j) const noexcept { return at(i, j); }

  /// Sum of d_ij over unordered pairs.
  double pair_sum() const noexcept {
    double s = 0.0;
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) s += at(i, j);
    return s;
  }

 private:
  double at(int i, int j) const noexcept { return d_[static_cast<std::size_t>(i) * n_ + j]; }
  void set(int i, int j, double v) noexcept {
    d_[static_cast<std::size_t>(i) * n_ + j] = v;
    d_[static_cast<std::size_t>(j) * n_ + i] = v;
  }

  int n_;
  TspMetric metric_;
  std::vector<City> cities_;
  std::vector<double> d_;
};

/// N cities uniform in a box of side sqrt(N).
inline TspInstance euclidean_instance(int n, std::uint64_t seed) {
  require(n >= 2, "euclidean_instance: need at least two cities");
  Rng rng(seed);
  const double side = std::sqrt(static_cast<double>(n));
  std::vector<City> cities(static_cast<std::size_t>(n));
  for (auto& c : cities) {
    c[0] = side * rng.uniform();
    c[1] = side * rng.uniform();
  }
  return TspInstance(std::move(cities));
}

/// d_ij i.i.d. uniform(0, 1) for i < j.
inline TspInstance random_metric_instance(int n, std::uint64_t seed) {
  require(n >= 2, "random_metric_instance: need at least two cities");
  Rng rng(seed);
  std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double v = rng.uniform();
      d[static_cast<std::size_t>(i) * n + j] = v;
      d[static_cast<std::size_t>(j) * n + i] = v;
    }
  return TspInstance(n, std::move(d));
}

/// Native format: `N metric`, then N coordinate lines (euclidean-2d) or the
/// strict upper triangle, row i holding d_i,i+1 ... d_i,N-1 (random).
inline void write_tsp_instance(std::ostream& os, const TspInstance& inst) {
  const int n = inst.size();
  os << n << ' ' << to_string(inst.metric()) << '\n';
  if (inst.metric() == TspMetric::euclidean_2d) {
    for (const auto& c : inst.cities()) os << format_double(c[0]) << ' ' << format_double(c[1]) << '\n';
    return;
  }
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = i + 1; j < n; ++j) os << (j > i + 1 ? " " : "") << format_double(inst.distance(i, j));
    os << '\n';
  }
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline TspInstance read_tsplib(std::istream& is) {
  std::optional<int> dimension;
  std::string line;
  bool in_coords = false;
  std::vector<std::pair<long, City>> rows;
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t == "EOF") break;
    if (in_coords) {
      std::istringstream ls(t);
      long id = 0;
      City c{};
      if (!(ls >> id >> c[0] >> c[1])) throw ConfigError("TSPLIB: malformed coordinate line '" + t + "'");
      rows.emplace_back(id, c);
      continue;
    }
    if (t == "NODE_COORD_SECTION") {
      in_coords = true;
      continue;
    }
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw ConfigError("TSPLIB: unexpected line '" + t + "'");
    const std::string key = trim(t.substr(0, colon));
    const std::string value = trim(t.substr(colon + 1));
    if (key == "DIMENSION") {
      dimension = std::stoi(value);
    } else if (key == "EDGE_WEIGHT_TYPE") {
      if (value != "EUC_2D") throw ConfigError("TSPLIB: only EUC_2D coordinate lists are supported");
    } else if (key == "TYPE") {
      if (value != "TSP") throw ConfigError("TSPLIB: only symmetric TSP files are supported");
    }
  }
  if (!in_coords) throw ConfigError("TSPLIB: missing NODE_COORD_SECTION");
  if (dimension && *dimension != static_cast<int>(rows.size()))
    throw ConfigError("TSPLIB: DIMENSION does not match the coordinate count");
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<City> cities;
  cities.reserve(rows.size());
  for (const auto& r : rows) cities.push_back(r.second);
  return TspInstance(std::move(cities));
}

inline TspInstance read_native(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw ConfigError("TSP instance: empty input");
  std::replace(header.begin(), header.end(), ',', ' ');
  std::istringstream hs(header);
  int n = 0;
  std::string metric_name;
  if (!(hs >> n >> metric_name) || n < 2) throw ConfigError("TSP instance: header must be `N metric` with N >= 2");
  TspMetric metric{};
  try {
    metric = parse_tsp_metric(metric_name);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("TSP instance: ") + e.what());
  }
  if (metric == TspMetric::euclidean_2d) {
    std::vector<City> cities(static_cast<std::size_t>(n));
    for (auto& c : cities)
      if (!(is >> c[0] >> c[1])) throw ConfigError("TSP instance: expected " + std::to_string(n) + " coordinate lines");
    return TspInstance(std::move(cities));
  }
  std::vector<double> d(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = 0.0;
      if (!(is >> v)) throw ConfigError("TSP instance: upper-triangular distance matrix is incomplete");
      if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError("TSP instance: distances must be finite and non-negative");
      d[static_cast<std::size_t>(i) * n + j] = v;
      d[static_cast<std::size_t>(j) * n + i] = v;
    }
  return TspInstance(n, std::move(d));
}

}  // namespace detail

/// Reads either the native format or a TSPLIB EUC_2D coordinate list
/// (detected by its NODE_COORD_SECTION). TSPLIB distances are kept real,
/// without the format's integer rounding.
inline TspInstance read_tsp_instance(std::istream& is) {
  std::stringstream buffer;
  buffer << is.rdbuf();
  const std::string text = buffer.str();
  std::istringstream in(text);
  if (text.find("NODE_COORD_SECTION") != std::string::npos) return detail::read_tsplib(in);
  return detail::read_native(in);
}

inline TspInstance load_tsp_instance(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open TSP instance '" + path + "'");
  return read_tsp_instance(is);
}

inline void save_tsp_instance(const std::string& path, const TspInstance& inst) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write TSP instance '" + path + "'");
  write_tsp_instance(os, inst);
}

}  // namespace qanneal
