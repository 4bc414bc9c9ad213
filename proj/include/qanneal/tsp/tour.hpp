#pragma once

// Tours, their undirected edge matrix and Ising form, 2-opt moves, the greedy
// baseline, Omega, and exhaustive search for small instances.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "qanneal/error.hpp"
#include "qanneal/rng.hpp"
#include "qanneal/tsp/instance.hpp"

namespace qanneal {

/// 2-opt move on tour positions a < b: removes the edges leaving positions a
/// and b and reconnects order[a] -> order[b], order[a+1] -> order[b+1].
struct TwoOptMove {
  int a = 0;
  int b = 0;
};

class Tour {
 public:
  Tour(std::vector<int> order, const TspInstance& inst) : order_(std::move(order)) {
    const int n = inst.size();
    require(static_cast<int>(order_.size()) == n, "Tour: order must list every city once");
    pos_.assign(static_cast<std::size_t>(n), -1);
    for (int p = 0; p < n; ++p) {
      const int c = order_[static_cast<std::size_t>(p)];
      require(c >= 0 && c < n && pos_[static_cast<std::size_t>(c)] < 0, "Tour: order is not a permutation of the cities");
      pos_[static_cast<std::size_t>(c)] = p;
    }
    length_ = recompute_length(inst);
  }

  int size() const noexcept { return static_cast<int>(order_.size()); }
  const std::vector<int>& order() const noexcept { return order_; }
  int city(int position) const noexcept { return order_[static_cast<std::size_t>(wrap(position))]; }
  int position(int c) const noexcept { return pos_[static_cast<std::size_t>(c)]; }
  double length() const noexcept { return length_; }

  int next(int c) const noexcept { return city(position(c) + 1); }

  /// True when cities u and v are consecutive in either direction.
  bool has_edge(int u, int v) const noexcept {
    const int d = position(u) - position(v);
    const int n = size();
    return d == 1 || d == -1 || d == n - 1 || d == 1 - n;
  }

  /// Direct sum of the consecutive edge lengths.
  double recompute_length(const TspInstance& inst) const noexcept {
    double s = 0.0;
    const int n = size();
    for (int p = 0; p < n; ++p) s += inst.distance(order_[static_cast<std::size_t>(p)], city(p + 1));
    return s;
  }

  bool is_adjacent(const TwoOptMove& m) const noexcept {
    const int n = size();
    return m.b - m.a <= 1 || (m.a == 0 && m.b == n - 1);
  }

  /// (d_ik + d_jl) - (d_ij + d_kl). The grouping makes the inverse move's
  /// delta the exact negative.
  double delta(const TwoOptMove& m, const TspInstance& inst) const noexcept {
    const int i = city(m.a), j = city(m.a + 1), k = city(m.b), l = city(m.b + 1);
    return (inst.distance(i, k) + inst.distance(j, l)) - (inst.distance(i, j) + inst.distance(k, l));
  }

  /// Applies a validated move whose delta is already known. The shorter of
  /// the two arcs is reversed; both give the same cycle.
  void apply(const TwoOptMove& m, double delta) noexcept {
    const int n = size();
    const int inner = m.b - m.a;
    if (inner <= n - inner) {
      reverse(m.a + 1, inner);
    } else {
      reverse(m.b + 1, n - inner);
    }
    length_ += delta;
  }

  void refresh_length(const TspInstance& inst) noexcept { length_ = recompute_length(inst); }

  friend bool operator==(const Tour& x, const Tour& y) { return x.order_ == y.order_ && x.length_ == y.length_; }

 private:
  int wrap(int p) const noexcept {
    const int n = size();
    p %= n;
    return p < 0 ? p + n : p;
  }

  /// Reverses `count` consecutive positions starting at `start`, cyclically.
  void reverse(int start, int count) noexcept {
    for (int t = 0; t < count / 2; ++t) {
      const int p = wrap(start + t);
      const int q = wrap(start + count - 1 - t);
      std::swap(order_[static_cast<std::size_t>(p)], order_[static_cast<std::size_t>(q)]);
      pos_[static_cast<std::size_t>(order_[static_cast<std::size_t>(p)])] = p;
      pos_[static_cast<std::size_t>(order_[static_cast<std::size_t>(q)])] = q;
    }
  }

  std::vector<int> order_;
  std::vector<int> pos_;
  double length_ = 0.0;
};

inline double tour_length(const Tour& t, const TspInstance& inst) { return t.recompute_length(inst); }

using TourMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// U = T + T^T with T_ij = 1 when the tour goes from i to j.
inline TourMatrix tour_matrix(const Tour& t) {
  const int n = t.size();
  TourMatrix u = TourMatrix::Zero(n, n);
  for (int p = 0; p < n; ++p) {
    const int i = t.city(p), j = t.city(p + 1);
    u(i, j) += 1;
    u(j, i) += 1;
  }
  return u;
}

/// 1/2 sum_ij d_ij U_ij.
inline double matrix_length(const TourMatrix& u, const TspInstance& inst) {
  require(u.rows() == inst.size() && u.cols() == inst.size(), "matrix_length: matrix size must match the instance");
  double s = 0.0;
  for (int i = 0; i < inst.size(); ++i)
    for (int j = 0; j < inst.size(); ++j) s += inst.distance(i, j) * u(i, j);
  return 0.5 * s;
}

/// Symmetric 0/1 matrix, zero diagonal, two entries per row, one cycle
/// through every city.
inline bool validate_tour_matrix(const TourMatrix& u) {
  const auto n = u.rows();
  if (n < 3 || u.cols() != n) return false;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (u(i, i) != 0) return false;
    int row = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (u(i, j) != 0 && u(i, j) != 1) return false;
      if (u(i, j) != u(j, i)) return false;
      row += u(i, j);
    }
    if (row != 2) return false;
  }
  Eigen::Index prev = -1, cur = 0, steps = 0;
  do {
    Eigen::Index nxt = -1;
    for (Eigen::Index j = 0; j < n; ++j)
      if (u(cur, j) == 1 && j != prev) {
        nxt = j;
        break;
      }
    prev = cur;
    cur = nxt;
    ++steps;
  } while (cur != 0 && steps <= n);
  return cur == 0 && steps == n;
}

/// Length through the spin form 1/2 sum_ij d_ij (1 + S_ij)/2 with
/// S = 2U - 1 off the diagonal. Split as a spin term 1/4 sum_ij d_ij S_ij
/// plus the constant 1/2 sum_{i<j} d_ij.
struct IsingFormCheck {
  double direct_length = 0.0;
  double matrix_length = 0.0;
  double spin_term = 0.0;
  double offset = 0.0;
  double ising_length() const noexcept { return spin_term + offset; }
  bool consistent(double tol = 1e-9) const noexcept {
    const double scale = std::max(1.0, std::abs(direct_length));
    return std::abs(matrix_length - direct_length) <= tol * scale &&
           std::abs(ising_length() - direct_length) <= tol * scale;
  }
};

inline IsingFormCheck ising_form_check(const Tour& t, const TspInstance& inst) {
  IsingFormCheck c;
  const TourMatrix u = tour_matrix(t);
  c.direct_length = t.recompute_length(inst);
  c.matrix_length = matrix_length(u, inst);
  double spin = 0.0;
  for (int i = 0; i < inst.size(); ++i)
    for (int j = 0; j < inst.size(); ++j)
      if (i != j) spin += inst.distance(i, j) * (2 * u(i, j) - 1);
  c.spin_term = 0.25 * spin;
  c.offset = 0.5 * inst.pair_sum();
  return c;
}

/// Move on positions, throwing for adjacent edge picks.
inline Tour two_opt(const Tour& t, TwoOptMove m, const TspInstance& inst) {
  const int n = t.size();
  if (m.a > m.b) std::swap(m.a, m.b);
  require(m.a >= 0 && m.b < n, "two_opt: position out of range");
  require(!t.is_adjacent(m), "two_opt: the two edges share a city");
  Tour out = t;
  out.apply(m, t.delta(m, inst));
  return out;
}

/// Move given as the tour edges i -> j and k -> l (j follows i, l follows k).
inline Tour two_opt(const Tour& t, int i, int j, int k, int l, const TspInstance& inst) {
  const int n = t.size();
  auto valid = [n](int c) { return c >= 0 && c < n; };
  require(valid(i) && valid(j) && valid(k) && valid(l), "two_opt: city out of range");
  require(t.next(i) == j && t.next(k) == l, "two_opt: picks must be directed edges of the tour");
  return two_opt(t, TwoOptMove{t.position(i), t.position(k)}, inst);
}

/// Uniform random non-adjacent position pair; needs N >= 4.
inline TwoOptMove random_two_opt_move(const Tour& t, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(t.size());
  for (;;) {
    int a = static_cast<int>(rng.below(n));
    int b = static_cast<int>(rng.below(n));
    if (a > b) std::swap(a, b);
    const TwoOptMove m{a, b};
    if (!t.is_adjacent(m)) return m;
  }
}

/// First-improvement 2-opt descent until no move shortens the tour.
inline Tour two_opt_local_search(Tour t, const TspInstance& inst) {
  const int n = t.size();
  if (n < 4) return t;
  bool improved = true;
  while (improved) {
    improved = false;
    for (int a = 0; a < n - 2; ++a)
      for (int b = a + 2; b < n; ++b) {
        const TwoOptMove m{a, b};
        if (t.is_adjacent(m)) continue;
        const double d = t.delta(m, inst);
        if (d < 0.0) {
          t.apply(m, d);
          improved = true;
        }
      }
  }
  t.refresh_length(inst);
  return t;
}

/// Nearest unvisited city at every step, ties to the lowest index.
inline Tour greedy_tour(const TspInstance& inst, int start = 0) {
  const int n = inst.size();
  require(start >= 0 && start < n, "greedy_tour: start city out of range");
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  std::vector<int> order{start};
  used[static_cast<std::size_t>(start)] = 1;
  int cur = start;
  for (int step = 1; step < n; ++step) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int c = 0; c < n; ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      const double d = inst.distance(cur, c);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    used[static_cast<std::size_t>(best)] = 1;
    order.push_back(best);
    cur = best;
  }
  return Tour(std::move(order), inst);
}

inline Tour random_tour(const TspInstance& inst, Rng& rng) {
  std::vector<int> order(static_cast<std::size_t>(inst.size()));
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t k = order.size(); k > 1; --k) std::swap(order[k - 1], order[rng.below(k)]);
  return Tour(std::move(order), inst);
}

/// Tour length per city for Euclidean instances in a sqrt(N) box.
inline double omega(double length, int n, TspMetric metric) {
  require(metric == TspMetric::euclidean_2d, "omega: defined for euclidean-2d instances only");
  require(n >= 1, "omega: N must be positive");
  return length / n;
}

struct TspOracleResult {
  Tour best;
  /// Distinct undirected tours examined, (N-1)!/2 for N >= 3.
  long tours = 0;
};

inline constexpr int kMaxTspOracleCities = 11;

/// Exhaustive search with city 0 fixed first and each direction counted once.
inline TspOracleResult tsp_oracle(const TspInstance& inst) {
  const int n = inst.size();
  if (n > kMaxTspOracleCities) throw OracleLimitError("tsp_oracle: at most 11 cities");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  if (n < 4) return {Tour(order, inst), 1};
  std::vector<int> best = order;
  double best_len = std::numeric_limits<double>::infinity();
  long count = 0;
  do {
    if (order[1] > order[static_cast<std::size_t>(n - 1)]) continue;
    ++count;
    double len = 0.0;
    for (int p = 0; p < n; ++p)
      len += inst.distance(order[static_cast<std::size_t>(p)], order[static_cast<std::size_t>((p + 1) % n)]);
    if (len < best_len) {
      best_len = len;
      best = order;
    }
  } while (std::next_permutation(order.begin() + 1, order.end()));
  return {Tour(std::move(best), inst), count};
}

}  // namespace qanneal
