#pragma once

#include <charconv>
#include <cstdio>
#include <string>

#include "qanneal/error.hpp"

namespace qanneal {

/// Shortest-safe decimal form: 17 significant digits round-trip any double.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ConfigError("not a number: '" + s + "'");
  return v;
}

}  // namespace qanneal
