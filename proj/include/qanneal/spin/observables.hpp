#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "qanneal/error.hpp"
#include "qanneal/spin/ising_problem.hpp"

namespace qanneal {

/// Replica overlap q = (1/N) sum_i a_i b_i.
inline double overlap(const SpinConfig& a, const SpinConfig& b) {
  require(a.size() == b.size(), "overlap: configurations differ in length");
  require(a.size() > 0, "overlap: empty configuration");
  long sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return static_cast<double>(sum) / static_cast<double>(a.size());
}

/// q = (1/N) sum_i <S_i>^2 from per-site thermal averages.
inline double ea_order_parameter(std::span<const double> site_magnetizations) {
  require(!site_magnetizations.empty(), "ea_order_parameter: empty input");
  double sum = 0.0;
  for (double m : site_magnetizations) {
    require(m >= -1.0 && m <= 1.0, "ea_order_parameter: magnetization outside [-1, 1]");
    sum += m * m;
  }
  return sum / static_cast<double>(site_magnetizations.size());
}

/// Histogram of replica-pair overlaps on equal-width bins over [-1, 1].
/// Pairs are weighted uniformly.
struct OverlapHistogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t pairs = 0;

  std::size_t bins() const noexcept { return counts.size(); }

  std::size_t bin_of(double q) const {
    require(q >= -1.0 && q <= 1.0, "OverlapHistogram: q outside [-1, 1]");
    const auto n = counts.size();
    auto b = static_cast<std::size_t>((q + 1.0) / 2.0 * static_cast<double>(n));
    return std::min(b, n - 1);
  }

  double bin_center(std::size_t b) const { return 0.5 * (edges[b] + edges[b + 1]); }

  /// Normalized density P(q) per bin.
  std::vector<double> density() const {
    std::vector<double> p(counts.size(), 0.0);
    if (pairs == 0) return p;
    for (std::size_t b = 0; b < counts.size(); ++b)
      p[b] = static_cast<double>(counts[b]) / (static_cast<double>(pairs) * (edges[b + 1] - edges[b]));
    return p;
  }
};

inline OverlapHistogram overlap_histogram(std::span<const SpinConfig> replicas, std::size_t bins) {
  require(replicas.size() >= 2, "overlap_histogram: need at least two replicas");
  require(bins >= 1, "overlap_histogram: need at least one bin");
  OverlapHistogram h;
  h.edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b)
    h.edges[b] = -1.0 + 2.0 * static_cast<double>(b) / static_cast<double>(bins);
  h.counts.assign(bins, 0);
  for (std::size_t a = 0; a < replicas.size(); ++a) {
    for (std::size_t b = a + 1; b < replicas.size(); ++b) {
      ++h.counts[h.bin_of(overlap(replicas[a], replicas[b]))];
      ++h.pairs;
    }
  }
  return h;
}

}  // namespace qanneal
