#pragma once

// Real-symmetric, possibly time-dependent Hamiltonians acting on explicit
// finite bases, and the builders used by the adiabatic experiments.
//
// Basis conventions: for qubit/spin registers basis index b encodes the
// configuration with bit k of b set meaning spin k is down (z_k = 1). Site
// bases index lattice sites directly.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qanneal/error.hpp"
#include "qanneal/spin/ising_problem.hpp"

namespace qanneal {

using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// H(s) for s in [0, 1], applied matrix-free. `apply_real` and
/// `apply_complex` compute y = H(s) x for real and complex x.
struct Hamiltonian {
  Eigen::Index dim = 0;
  /// Upper bound on the spectral radius over s in [0, 1].
  double norm_bound = 0.0;
  std::string kind;
  std::function<void(double, const RealVector&, RealVector&)> apply_real;
  std::function<void(double, const ComplexVector&, ComplexVector&)> apply_complex;

  RealVector operator()(double s, const RealVector& x) const {
    RealVector y(dim);
    apply_real(s, x, y);
    return y;
  }
};

/// Wraps a generic callable f(s, x, y) usable with both vector types.
template <class F>
Hamiltonian make_hamiltonian(Eigen::Index dim, double norm_bound, std::string kind, F f) {
  Hamiltonian h;
  h.dim = dim;
  h.norm_bound = norm_bound;
  h.kind = std::move(kind);
  h.apply_real = [f](double s, const RealVector& x, RealVector& y) { f(s, x, y); };
  h.apply_complex = [f](double s, const ComplexVector& x, ComplexVector& y) { f(s, x, y); };
  return h;
}

/// Dense matrix of H(s), assembled column by column.
inline Eigen::MatrixXd dense_matrix(const Hamiltonian& h, double s) {
  require(h.dim <= 8192, "dense_matrix: dimension too large for a dense matrix");
  Eigen::MatrixXd m(h.dim, h.dim);
  RealVector e = RealVector::Zero(h.dim), y(h.dim);
  for (Eigen::Index j = 0; j < h.dim; ++j) {
    e[j] = 1.0;
    h.apply_real(s, e, y);
    m.col(j) = y;
    e[j] = 0.0;
  }
  return m;
}

inline constexpr int kMaxDenseSpins = 12;
inline constexpr int kMaxMatrixFreeSpins = 24;

namespace detail {

/// y = d .* x - g * sum_k X_k x over an l-bit register.
template <class V>
void diagonal_plus_flip(const RealVector& d, double g, int bits, const V& x, V& y) {
  const Eigen::Index dim = x.size();
  for (Eigen::Index b = 0; b < dim; ++b) {
    auto acc = d[b] * x[b];
    if (g != 0.0) {
      typename V::Scalar flips = 0.0;
      for (int k = 0; k < bits; ++k) flips += x[b ^ (Eigen::Index{1} << k)];
      acc -= g * flips;
    }
    y[b] = acc;
  }
}

inline int register_bits(Eigen::Index dim) {
  int bits = 0;
  while ((Eigen::Index{1} << bits) < dim) ++bits;
  require((Eigen::Index{1} << bits) == dim, "register dimension must be a power of two");
  return bits;
}

}  // namespace detail

/// Classical energies of all 2^N configurations.
inline RealVector classical_diagonal(const IsingProblem& problem) {
  const int n = problem.size();
  require(n <= kMaxMatrixFreeSpins, "classical_diagonal: too many spins for an explicit basis");
  const Eigen::Index dim = Eigen::Index{1} << n;
  RealVector d(dim);
  for (Eigen::Index b = 0; b < dim; ++b) d[b] = energy(SpinConfig::from_bits(static_cast<std::uint64_t>(b), static_cast<std::size_t>(n)), problem);
  return d;
}

/// Transverse-field Ising Hamiltonian H_C - Gamma sum sigma^x, matrix-free
/// (N <= 24).
inline Hamiltonian tim_hamiltonian(const IsingProblem& problem, double gamma) {
  require(problem.size() <= kMaxMatrixFreeSpins, "tim_hamiltonian: N exceeds the matrix-free limit of 24");
  RealVector d = classical_diagonal(problem);
  const int bits = problem.size();
  const double bound = d.cwiseAbs().maxCoeff() + std::abs(gamma) * bits;
  const Eigen::Index dim = d.size();
  return make_hamiltonian(dim, bound, "tim", [d = std::move(d), gamma, bits](double, const auto& x, auto& y) {
    detail::diagonal_plus_flip(d, gamma, bits, x, y);
  });
}

/// Dense TIM matrix (N <= 12).
inline Eigen::MatrixXd build_tim_matrix(const IsingProblem& problem, double gamma) {
  require(problem.size() <= kMaxDenseSpins, "build_tim_matrix: N exceeds the dense limit of 12");
  const int n = problem.size();
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  m.diagonal() = classical_diagonal(problem);
  for (Eigen::Index b = 0; b < dim; ++b)
    for (int k = 0; k < n; ++k) m(b ^ (Eigen::Index{1} << k), b) = -gamma;
  return m;
}

/// (1 - s) * kinetic + s * diag(d), with kinetic = -sum_k sigma^x_k.
inline Hamiltonian diagonal_interpolation(RealVector d, std::string kind) {
  const int bits = detail::register_bits(d.size());
  const double bound = std::max(static_cast<double>(bits), d.cwiseAbs().maxCoeff());
  const Eigen::Index dim = d.size();
  return make_hamiltonian(dim, bound, std::move(kind), [d = std::move(d), bits](double s, const auto& x, auto& y) {
    const Eigen::Index dim = x.size();
    for (Eigen::Index b = 0; b < dim; ++b) {
      typename std::decay_t<decltype(x)>::Scalar flips = 0.0;
      for (int k = 0; k < bits; ++k) flips += x[b ^ (Eigen::Index{1} << k)];
      y[b] = s * d[b] * x[b] - (1.0 - s) * flips;
    }
  });
}

/// Grover-type annealer on l qubits: (1 - s)(-sum sigma^x) + s (1 - |w><w|).
inline Hamiltonian grover_interpolation(int l, std::uint64_t w) {
  require(l >= 1 && l <= kMaxMatrixFreeSpins, "grover_interpolation: need 1 <= l <= 24");
  const Eigen::Index dim = Eigen::Index{1} << l;
  require(w < static_cast<std::uint64_t>(dim), "grover_interpolation: marked state out of range");
  RealVector d = RealVector::Ones(dim);
  d[static_cast<Eigen::Index>(w)] = 0.0;
  return diagonal_interpolation(std::move(d), "grover-interpolation");
}

/// Time-independent E|w><w| + E|s><s| on a D-dimensional site basis.
inline Hamiltonian grover_hamiltonian(Eigen::Index d, Eigen::Index w, double e) {
  require(d >= 1 && w >= 0 && w < d, "grover_hamiltonian: need 0 <= w < D");
  require(e > 0.0, "grover_hamiltonian: E must be positive");
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(d));
  return make_hamiltonian(d, 2.0 * e, "grover-constant", [w, e, inv_sqrt](double, const auto& x, auto& y) {
    const auto overlap = x.sum() * inv_sqrt;
    for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = e * inv_sqrt * overlap;
    y[w] += e * x[w];
  });
}

/// Spatial search on the complete graph of N sites:
///   H(s) = -chi0 s |w><w| - Gamma sum_{i != j} |i><j|,
/// the well deepening linearly from 0 to chi0 as s goes from 0 to 1.
inline Hamiltonian spatial_search_hamiltonian(Eigen::Index n, Eigen::Index w, double chi0, double gamma) {
  require(n >= 2 && w >= 0 && w < n, "spatial_search_hamiltonian: need N >= 2 and 0 <= w < N");
  const double bound = std::abs(chi0) + std::abs(gamma) * static_cast<double>(n);
  return make_hamiltonian(n, bound, "spatial-search", [w, chi0, gamma](double s, const auto& x, auto& y) {
    const auto total = x.sum();
    for (Eigen::Index i = 0; i < x.size(); ++i) y[i] = -gamma * (total - x[i]);
    y[w] -= chi0 * s * x[w];
  });
}

/// Pointwise linear combination (1 - s) A(s) + s B(s) of two Hamiltonians.
inline Hamiltonian linear_interpolation(const Hamiltonian& a, const Hamiltonian& b) {
  require(a.dim == b.dim, "linear_interpolation: dimension mismatch");
  Hamiltonian h;
  h.dim = a.dim;
  h.norm_bound = std::max(a.norm_bound, b.norm_bound);
  h.kind = "interpolation(" + a.kind + "," + b.kind + ")";
  h.apply_real = [a, b](double s, const RealVector& x, RealVector& y) {
    RealVector t(x.size());
    a.apply_real(s, x, y);
    b.apply_real(s, x, t);
    y = (1.0 - s) * y + s * t;
  };
  h.apply_complex = [a, b](double s, const ComplexVector& x, ComplexVector& y) {
    ComplexVector t(x.size());
    a.apply_complex(s, x, y);
    b.apply_complex(s, x, t);
    y = (1.0 - s) * y + s * t;
  };
  return h;
}

// ----------------------------------------------------------------------------
// Clause sets

struct Clause {
  int i = 0;
  int j = 0;
  int k = 0;
  /// Bit (z_i + 2 z_j + 4 z_k) set when that assignment satisfies the clause.
  std::uint8_t satisfying = 0;
  friend bool operator==(const Clause&, const Clause&) = default;
};

struct ClauseSet {
  int l = 0;
  std::vector<Clause> clauses;

  void validate() const {
    require(l >= 3 || clauses.empty(), "ClauseSet: need at least three bits");
    for (const auto& c : clauses) {
      require(c.i >= 0 && c.j >= 0 && c.k >= 0 && c.i < l && c.j < l && c.k < l, "ClauseSet: bit index out of range");
      require(c.i != c.j && c.j != c.k && c.i != c.k, "ClauseSet: clause bits must be distinct");
    }
  }
  friend bool operator==(const ClauseSet&, const ClauseSet&) = default;
};

/// Exact-cover clause: satisfied iff exactly one of the three bits is 1.
inline Clause exact_cover_clause(int i, int j, int k) { return {i, j, k, 0b00010110}; }

/// Number of violated clauses for the register state b (bit q of b = z_q).
inline int violated_clauses(const ClauseSet& cs, std::uint64_t b) {
  int count = 0;
  for (const auto& c : cs.clauses) {
    const unsigned idx = static_cast<unsigned>(((b >> c.i) & 1U) | (((b >> c.j) & 1U) << 1) | (((b >> c.k) & 1U) << 2));
    if (!((c.satisfying >> idx) & 1U)) ++count;
  }
  return count;
}

/// Diagonal of H_C over the 2^l basis (l <= 20).
inline RealVector clause_diagonal(const ClauseSet& cs) {
  cs.validate();
  require(cs.l >= 1 && cs.l <= 20, "clause_hamiltonian: need 1 <= l <= 20");
  const Eigen::Index dim = Eigen::Index{1} << cs.l;
  RealVector d(dim);
  for (Eigen::Index b = 0; b < dim; ++b) d[b] = violated_clauses(cs, static_cast<std::uint64_t>(b));
  return d;
}

/// Interpolated annealer (1 - s) H_kin + s H_C with H_kin = -sum sigma^x.
inline Hamiltonian clause_annealer(const ClauseSet& cs) {
  return diagonal_interpolation(clause_diagonal(cs), "clause-annealer");
}

/// Random exact-cover instance: each clause acts on three distinct bits drawn
/// uniformly.
inline ClauseSet random_exact_cover(int l, int clauses, Rng& rng) {
  require(l >= 3, "random_exact_cover: need l >= 3");
  ClauseSet cs{l, {}};
  for (int c = 0; c < clauses; ++c) {
    int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(l)));
    int j = i, k = i;
    while (j == i) j = static_cast<int>(rng.below(static_cast<std::uint64_t>(l)));
    while (k == i || k == j) k = static_cast<int>(rng.below(static_cast<std::uint64_t>(l)));
    cs.clauses.push_back(exact_cover_clause(i, j, k));
  }
  return cs;
}

/// Text format: first line `l`, then one `i j k : bitmask` line per clause.
inline void write_clause_set(std::ostream& os, const ClauseSet& cs) {
  os << cs.l << '\n';
  for (const auto& c : cs.clauses) os << c.i << ' ' << c.j << ' ' << c.k << " : " << static_cast<int>(c.satisfying) << '\n';
}

inline ClauseSet read_clause_set(std::istream& is) {
  ClauseSet cs;
  std::string line;
  bool have_header = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    auto fail = [&] { throw ConfigError("clause file line " + std::to_string(lineno) + ": malformed"); };
    auto to_int = [&](const std::string& s) {
      std::size_t pos = 0;
      int v = 0;
      try {
        v = std::stoi(s, &pos);
      } catch (...) {
        fail();
      }
      if (pos != s.size()) fail();
      return v;
    };
    if (!have_header) {
      cs.l = to_int(first);
      std::string extra;
      if (ls >> extra) fail();
      have_header = true;
      continue;
    }
    std::string sj, sk, colon, smask, extra;
    if (!(ls >> sj >> sk >> colon >> smask) || colon != ":" || (ls >> extra)) fail();
    const int mask = to_int(smask);
    if (mask < 0 || mask > 255) fail();
    cs.clauses.push_back({to_int(first), to_int(sj), to_int(sk), static_cast<std::uint8_t>(mask)});
  }
  if (!have_header) throw ConfigError("clause file: missing bit-count header");
  try {
    cs.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("clause file: ") + e.what());
  }
  return cs;
}

inline ClauseSet load_clause_set(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open clause file " + path);
  return read_clause_set(is);
}

}  // namespace qanneal
