#pragma once

// Plain-text Ising problem files.
//
//   topology complete|square-periodic
//   n <N>
//   convention plain|sk-normalized
//   bonds <count>
//   <i> <j> <J_ij>        one line per bond
//   fields <N>
//   <i> <h_i>             one line per site
//
// Reals are written with 17 significant digits so that reading a file back
// reproduces every double exactly.

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "qanneal/error.hpp"
#include "qanneal/format.hpp"
#include "qanneal/spin/ising_problem.hpp"

namespace qanneal {

inline void write_problem(std::ostream& os, const IsingProblem& p) {
  os << "topology " << to_string(p.topology()) << '\n';
  os << "n " << p.size() << '\n';
  os << "convention " << (p.sk_normalized() ? "sk-normalized" : "plain") << '\n';
  os << "bonds " << p.bonds().size() << '\n';
  for (const auto& b : p.bonds()) os << b.i << ' ' << b.j << ' ' << format_double(b.J) << '\n';
  os << "fields " << p.fields().size() << '\n';
  for (std::size_t i = 0; i < p.fields().size(); ++i) os << i << ' ' << format_double(p.fields()[i]) << '\n';
}

inline IsingProblem read_problem(std::istream& is) {
  auto expect = [&](const std::string& key) {
    std::string k;
    if (!(is >> k) || k != key) throw ConfigError("problem file: expected '" + key + "'");
  };
  std::string word;
  expect("topology");
  is >> word;
  Topology topology;
  if (word == "complete") {
    topology = Topology::complete;
  } else if (word == "square-periodic") {
    topology = Topology::square_periodic;
  } else {
    throw ConfigError("problem file: unknown topology '" + word + "'");
  }
  int n = 0;
  expect("n");
  if (!(is >> n) || n < 1) throw ConfigError("problem file: bad spin count");
  expect("convention");
  is >> word;
  if (word != "plain" && word != "sk-normalized") throw ConfigError("problem file: unknown convention '" + word + "'");
  const bool normalized = word == "sk-normalized";

  std::size_t nb = 0;
  expect("bonds");
  if (!(is >> nb)) throw ConfigError("problem file: bad bond count");
  std::vector<Bond> bonds(nb);
  for (auto& b : bonds) {
    std::string j;
    if (!(is >> b.i >> b.j >> j)) throw ConfigError("problem file: truncated bond list");
    b.J = parse_double(j);
  }
  std::size_t nf = 0;
  expect("fields");
  if (!(is >> nf) || nf != static_cast<std::size_t>(n)) throw ConfigError("problem file: field count must equal n");
  std::vector<double> fields(nf, 0.0);
  for (std::size_t k = 0; k < nf; ++k) {
    std::size_t i = 0;
    std::string h;
    if (!(is >> i >> h) || i >= nf) throw ConfigError("problem file: bad field line");
    fields[i] = parse_double(h);
  }
  try {
    return IsingProblem(topology, n, std::move(bonds), std::move(fields), normalized);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("problem file: ") + e.what());
  }
}

inline void save_problem(const std::string& path, const IsingProblem& p) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  write_problem(os, p);
}

inline IsingProblem load_problem(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read " + path);
  return read_problem(is);
}

}  // namespace qanneal
