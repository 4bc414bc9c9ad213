#pragma once

// Ising problems, spin configurations, disorder sampling and energies.
//
// Spins take the values +1 and -1. The classical cost of a configuration is
//
//   E(S) = - sum_{bonds (i,j)} J_ij S_i S_j - sum_i h_i S_i
//
// where every bond of the topology appears exactly once in the bond list.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qanneal/error.hpp"
#include "qanneal/rng.hpp"

namespace qanneal {

class SpinConfig {
 public:
  SpinConfig() = default;
  explicit SpinConfig(std::size_t n, int value = 1) : spins_(n, static_cast<std::int8_t>(value)) {
    require(value == 1 || value == -1, "SpinConfig: spin value must be +1 or -1");
  }
  explicit SpinConfig(std::vector<std::int8_t> spins) : spins_(std::move(spins)) {
    for (auto s : spins_) require(s == 1 || s == -1, "SpinConfig: spin value must be +1 or -1");
  }
  SpinConfig(std::initializer_list<int> spins) {
    spins_.reserve(spins.size());
    for (int s : spins) {
      require(s == 1 || s == -1, "SpinConfig: spin value must be +1 or -1");
      spins_.push_back(static_cast<std::int8_t>(s));
    }
  }

  static SpinConfig random(std::size_t n, Rng& rng) {
    SpinConfig c(n);
    for (auto& s : c.spins_) s = static_cast<std::int8_t>(rng.spin());
    return c;
  }

  /// Bit b of `bits` set means spin b is -1.
  static SpinConfig from_bits(std::uint64_t bits, std::size_t n) {
    SpinConfig c(n);
    for (std::size_t i = 0; i < n; ++i) c.spins_[i] = ((bits >> i) & 1U) ? -1 : 1;
    return c;
  }

  std::uint64_t to_bits() const {
    require(spins_.size() <= 64, "SpinConfig::to_bits: more than 64 spins");
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < spins_.size(); ++i)
      if (spins_[i] < 0) bits |= (std::uint64_t{1} << i);
    return bits;
  }

  std::size_t size() const noexcept { return spins_.size(); }
  int operator[](std::size_t i) const noexcept { return spins_[i]; }
  void flip(std::size_t i) noexcept { spins_[i] = static_cast<std::int8_t>(-spins_[i]); }
  void set(std::size_t i, int value) {
    require(value == 1 || value == -1, "SpinConfig::set: spin value must be +1 or -1");
    spins_[i] = static_cast<std::int8_t>(value);
  }
  std::span<const std::int8_t> spins() const noexcept { return spins_; }

  SpinConfig flipped() const {
    SpinConfig c = *this;
    for (auto& s : c.spins_) s = static_cast<std::int8_t>(-s);
    return c;
  }

  double magnetization() const noexcept {
    if (spins_.empty()) return 0.0;
    long sum = 0;
    for (auto s : spins_) sum += s;
    return static_cast<double>(sum) / static_cast<double>(spins_.size());
  }

  std::string to_string() const {
    std::string out;
    out.reserve(spins_.size());
    for (auto s : spins_) out.push_back(s > 0 ? '+' : '-');
    return out;
  }

  friend bool operator==(const SpinConfig&, const SpinConfig&) = default;
  friend auto operator<=>(const SpinConfig&, const SpinConfig&) = default;

 private:
  std::vector<std::int8_t> spins_;
};

enum class Topology { complete, square_periodic };

inline std::string_view to_string(Topology t) {
  return t == Topology::complete ? "complete" : "square-periodic";
}

struct Bond {
  int i = 0;
  int j = 0;
  double J = 0.0;
  friend bool operator==(const Bond&, const Bond&) = default;
};

/// Immutable after construction; safe to share between concurrent runs.
class IsingProblem {
 public:
  IsingProblem() = default;

  IsingProblem(Topology topology, int n, std::vector<Bond> bonds, std::vector<double> fields = {},
               bool sk_normalized = false)
      : topology_(topology),
        n_(n),
        bonds_(std::move(bonds)),
        fields_(std::move(fields)),
        sk_normalized_(sk_normalized) {
    require(n >= 1, "IsingProblem: need at least one spin");
    if (fields_.empty()) fields_.assign(static_cast<std::size_t>(n), 0.0);
    require(fields_.size() == static_cast<std::size_t>(n), "IsingProblem: one field per site");
    if (topology_ == Topology::square_periodic) {
      const auto side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
      require(side * side == n, "IsingProblem: square lattice needs N = L^2");
      side_ = side;
    }
    for (auto& b : bonds_) {
      require(b.i >= 0 && b.i < n && b.j >= 0 && b.j < n && b.i != b.j,
              "IsingProblem: bond endpoints out of range");
    }
    build_adjacency();
  }

  Topology topology() const noexcept { return topology_; }
  int size() const noexcept { return n_; }
  /// Lattice side for square lattices, 0 otherwise.
  int side() const noexcept { return side_; }
  bool sk_normalized() const noexcept { return sk_normalized_; }
  const std::vector<Bond>& bonds() const noexcept { return bonds_; }
  const std::vector<double>& fields() const noexcept { return fields_; }
  bool has_fields() const noexcept {
    for (double h : fields_)
      if (h != 0.0) return true;
    return false;
  }

  std::span<const int> neighbors(int i) const noexcept {
    return {adj_site_.data() + adj_offset_[i], adj_site_.data() + adj_offset_[i + 1]};
  }
  std::span<const double> neighbor_couplings(int i) const noexcept {
    return {adj_J_.data() + adj_offset_[i], adj_J_.data() + adj_offset_[i + 1]};
  }

  /// sum_j J_ij S_j over the bonds touching i.
  double coupling_field(const SpinConfig& c, int i) const noexcept {
    double f = 0.0;
    const int end = adj_offset_[i + 1];
    for (int k = adj_offset_[i]; k < end; ++k) f += adj_J_[k] * c[adj_site_[k]];
    return f;
  }

  /// Energy change from flipping spin i: 2 S_i (sum_j J_ij S_j + h_i).
  double flip_delta(const SpinConfig& c, int i) const noexcept {
    return 2.0 * c[i] * (coupling_field(c, i) + fields_[i]);
  }

 private:
  void build_adjacency() {
    adj_offset_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (const auto& b : bonds_) {
      ++adj_offset_[b.i + 1];
      ++adj_offset_[b.j + 1];
    }
    for (int i = 0; i < n_; ++i) adj_offset_[i + 1] += adj_offset_[i];
    adj_site_.resize(adj_offset_.back());
    adj_J_.resize(adj_offset_.back());
    std::vector<int> fill(adj_offset_.begin(), adj_offset_.end() - 1);
    for (const auto& b : bonds_) {
      adj_site_[fill[b.i]] = b.j;
      adj_J_[fill[b.i]++] = b.J;
      adj_site_[fill[b.j]] = b.i;
      adj_J_[fill[b.j]++] = b.J;
    }
  }

  Topology topology_ = Topology::complete;
  int n_ = 0;
  int side_ = 0;
  std::vector<Bond> bonds_;
  std::vector<double> fields_;
  bool sk_normalized_ = false;
  std::vector<int> adj_offset_;
  std::vector<int> adj_site_;
  std::vector<double> adj_J_;
};

struct DisorderModel {
  enum class Kind { gaussian, binary };
  Kind kind = Kind::gaussian;
  double J = 1.0;
  /// Probability of a +J bond (binary only).
  double p = 0.5;
  std::uint64_t seed = 0;

  static DisorderModel gaussian(double J, std::uint64_t seed) { return {Kind::gaussian, J, 0.5, seed}; }
  static DisorderModel binary(double J, double p, std::uint64_t seed) { return {Kind::binary, J, p, seed}; }
};

/// Optional random longitudinal fields, +h or -h with equal probability.
struct FieldModel {
  double h = 0.0;
};

/// Bond list for a topology with all couplings set to J.
inline std::vector<Bond> topology_bonds(Topology topology, int n, double J = 1.0) {
  std::vector<Bond> bonds;
  if (topology == Topology::complete) {
    bonds.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 1; i < n; ++i)
      for (int j = 0; j < i; ++j) bonds.push_back({i, j, J});
  } else {
    const auto side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    require(side * side == n, "square lattice needs N to be a perfect square");
    bonds.reserve(2 * static_cast<std::size_t>(n));
    for (int y = 0; y < side; ++y) {
      for (int x = 0; x < side; ++x) {
        const int site = y * side + x;
        bonds.push_back({site, y * side + (x + 1) % side, J});
        bonds.push_back({site, ((y + 1) % side) * side + x, J});
      }
    }
  }
  return bonds;
}

/// Draws an Ising problem from a disorder model. Gaussian couplings have
/// variance J^2 on lattices and J^2/N on the complete graph (when
/// `sk_normalize` is set). Deterministic for a fixed model seed.
inline IsingProblem sample_disorder(const DisorderModel& model, Topology topology, int n,
                                    FieldModel field_model = {}, bool sk_normalize = true) {
  require(n >= 2, "sample_disorder: need N >= 2");
  if (model.kind == DisorderModel::Kind::binary)
    require(model.p >= 0.0 && model.p <= 1.0, "sample_disorder: p must lie in [0, 1]");
  require(model.J > 0.0, "sample_disorder: J must be positive");
  if (topology == Topology::square_periodic) {
    const auto side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    require(side * side == n, "sample_disorder: N is not a perfect square");
    require(side >= 2, "sample_disorder: lattice side must be at least 2");
  }

  auto bonds = topology_bonds(topology, n);
  Rng rng(mix_seed(model.seed, 0));
  const bool normalize = sk_normalize && topology == Topology::complete &&
                         model.kind == DisorderModel::Kind::gaussian;
  const double sigma = normalize ? model.J / std::sqrt(static_cast<double>(n)) : model.J;
  for (auto& b : bonds) {
    if (model.kind == DisorderModel::Kind::gaussian) {
      b.J = sigma * rng.normal();
    } else {
      b.J = rng.uniform() < model.p ? model.J : -model.J;
    }
  }

  std::vector<double> fields(static_cast<std::size_t>(n), 0.0);
  if (field_model.h != 0.0) {
    Rng frng(mix_seed(model.seed, 1));
    for (auto& h : fields) h = frng.uniform() < 0.5 ? field_model.h : -field_model.h;
  }
  return IsingProblem(topology, n, std::move(bonds), std::move(fields), normalize);
}

/// Uniform ferromagnet (or antiferromagnet for J < 0) on a topology.
inline IsingProblem uniform_problem(Topology topology, int n, double J, std::vector<double> fields = {}) {
  return IsingProblem(topology, n, topology_bonds(topology, n, J), std::move(fields), false);
}

inline double energy(const SpinConfig& config, const IsingProblem& problem) {
  require(config.size() == static_cast<std::size_t>(problem.size()),
          "energy: configuration length does not match problem size");
  double e = 0.0;
  for (const auto& b : problem.bonds()) e -= b.J * config[b.i] * config[b.j];
  const auto& h = problem.fields();
  for (std::size_t i = 0; i < h.size(); ++i) e -= h[i] * config[i];
  return e;
}

}  // namespace qanneal
