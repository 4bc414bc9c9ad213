#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qanneal/tsp/anneal.hpp"

using namespace qanneal;

namespace {

TspInstance all_ones(int n) {
  std::vector<double> d(static_cast<std::size_t>(n) * n, 1.0);
  for (int i = 0; i < n; ++i) d[static_cast<std::size_t>(i) * n + i] = 0.0;
  return TspInstance(n, std::move(d));
}

TspInstance unit_square() { return TspInstance({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

std::vector<int> identity(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

double cycle_length(const std::vector<int>& order, const TspInstance& inst) {
  double s = 0.0;
  for (std::size_t p = 0; p < order.size(); ++p) s += inst.distance(order[p], order[(p + 1) % order.size()]);
  return s;
}

/// Minimum over all N! orders with no symmetry reduction.
double naive_optimum(const TspInstance& inst) {
  auto order = identity(inst.size());
  double best = std::numeric_limits<double>::infinity();
  do best = std::min(best, cycle_length(order, inst));
  while (std::next_permutation(order.begin(), order.end()));
  return best;
}

}  // namespace

TEST(TspTour, TriangleWithUnitDistancesHasLengthThree) {
  const auto inst = all_ones(3);
  for (auto order : {std::vector<int>{0, 1, 2}, std::vector<int>{2, 0, 1}, std::vector<int>{1, 0, 2}}) {
    const Tour t(order, inst);
    EXPECT_DOUBLE_EQ(t.length(), 3.0);
    EXPECT_DOUBLE_EQ(tour_length(t, inst), 3.0);
  }
}

TEST(TspTour, UnitSquareInOrderHasLengthFour) {
  const auto inst = unit_square();
  const Tour t(identity(4), inst);
  EXPECT_DOUBLE_EQ(t.length(), 4.0);
  EXPECT_DOUBLE_EQ(matrix_length(tour_matrix(t), inst), 4.0);
}

TEST(TspTour, RejectsNonPermutations) {
  const auto inst = all_ones(4);
  EXPECT_THROW(Tour({0, 1, 1, 3}, inst), InvalidArgument);
  EXPECT_THROW(Tour({0, 1, 2}, inst), InvalidArgument);
  EXPECT_THROW(Tour({0, 1, 2, 4}, inst), InvalidArgument);
}

TEST(TspTour, MatrixAndSpinFormsMatchTheEdgeSum) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = seed % 2 ? random_metric_instance(7, seed) : euclidean_instance(7, seed);
    Rng rng(seed + 100);
    const Tour t = random_tour(inst, rng);
    const double direct = cycle_length(t.order(), inst);
    const auto check = ising_form_check(t, inst);
    EXPECT_TRUE(check.consistent());
    EXPECT_NEAR(check.matrix_length, direct, 1e-12);
    EXPECT_NEAR(check.ising_length(), direct, 1e-12);

    // Spin term from the edge list: tour edges count +d, the rest -d, each
    // ordered pair once, with the 1/4 prefactor.
    double tour_edges = 0.0;
    for (int p = 0; p < 7; ++p) tour_edges += inst.distance(t.city(p), t.city(p + 1));
    const double others = inst.pair_sum() - tour_edges;
    EXPECT_NEAR(check.spin_term, 0.25 * 2.0 * (tour_edges - others), 1e-12);
    EXPECT_NEAR(check.offset, 0.5 * inst.pair_sum(), 1e-12);
  }
}

TEST(TspTour, ReverseTourHasTheSameLength) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = random_metric_instance(12, seed);
    Rng rng(seed);
    const Tour t = random_tour(inst, rng);
    auto rev = t.order();
    std::reverse(rev.begin(), rev.end());
    EXPECT_NEAR(Tour(rev, inst).length(), t.length(), 1e-12);
  }
}

TEST(TspMatrix, EveryPermutationOfFiveCitiesIsValid) {
  const auto inst = all_ones(5);
  auto order = identity(5);
  int count = 0;
  do {
    EXPECT_TRUE(validate_tour_matrix(tour_matrix(Tour(order, inst))));
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  EXPECT_EQ(count, 120);
}

TEST(TspMatrix, TwoDisjointTrianglesAreRejected) {
  TourMatrix u = TourMatrix::Zero(6, 6);
  auto link = [&](int a, int b) { u(a, b) = u(b, a) = 1; };
  link(0, 1), link(1, 2), link(2, 0);
  link(3, 4), link(4, 5), link(5, 3);
  for (int i = 0; i < 6; ++i) EXPECT_EQ(u.row(i).sum(), 2);
  EXPECT_FALSE(validate_tour_matrix(u));
}

TEST(TspMatrix, RejectsBadRowsDiagonalAndAsymmetry) {
  const auto inst = all_ones(5);
  const TourMatrix good = tour_matrix(Tour(identity(5), inst));
  ASSERT_TRUE(validate_tour_matrix(good));

  TourMatrix row3 = good;
  row3(0, 2) = row3(2, 0) = 1;
  EXPECT_FALSE(validate_tour_matrix(row3));

  TourMatrix diag = good;
  diag(0, 0) = 1;
  EXPECT_FALSE(validate_tour_matrix(diag));

  TourMatrix asym = good;
  asym(0, 1) = 0;
  asym(0, 2) = 1;
  EXPECT_FALSE(validate_tour_matrix(asym));

  EXPECT_FALSE(validate_tour_matrix(TourMatrix::Zero(5, 4)));
  EXPECT_FALSE(validate_tour_matrix(TourMatrix::Constant(5, 5, 2)));
}

TEST(TspTwoOpt, EqualDistancesGiveZeroDelta) {
  const auto inst = all_ones(6);
  const Tour t(identity(6), inst);
  const Tour u = two_opt(t, TwoOptMove{0, 3}, inst);
  EXPECT_DOUBLE_EQ(t.delta(TwoOptMove{0, 3}, inst), 0.0);
  EXPECT_DOUBLE_EQ(u.length(), t.length());
}

TEST(TspTwoOpt, UncrossingShortensTheTour) {
  const auto inst = unit_square();
  // 0 -> 2 -> 1 -> 3 uses both diagonals.
  const Tour crossed({0, 2, 1, 3}, inst);
  EXPECT_NEAR(crossed.length(), 2.0 + 2.0 * std::sqrt(2.0), 1e-12);
  const double d = crossed.delta(TwoOptMove{0, 2}, inst);
  EXPECT_LT(d, 0.0);
  EXPECT_NEAR(d, 2.0 - 2.0 * std::sqrt(2.0), 1e-12);
  const Tour open = two_opt(crossed, 0, 2, 1, 3, inst);
  EXPECT_NEAR(open.length(), 4.0, 1e-12);
  EXPECT_NEAR(cycle_length(open.order(), inst), 4.0, 1e-12);
  EXPECT_TRUE(open.has_edge(0, 1));
  EXPECT_TRUE(open.has_edge(2, 3));
}

TEST(TspTwoOpt, CreatesTheNamedLinks) {
  const auto inst = random_metric_instance(9, 3);
  const Tour t(identity(9), inst);
  const Tour u = two_opt(t, 2, 3, 6, 7, inst);
  EXPECT_TRUE(u.has_edge(2, 6));
  EXPECT_TRUE(u.has_edge(3, 7));
  EXPECT_FALSE(u.has_edge(2, 3));
  EXPECT_FALSE(u.has_edge(6, 7));
}

TEST(TspTwoOpt, AdjacentOrForeignPicksAreRejected) {
  const auto inst = all_ones(6);
  const Tour t(identity(6), inst);
  EXPECT_THROW(two_opt(t, TwoOptMove{1, 2}, inst), InvalidArgument);
  EXPECT_THROW(two_opt(t, TwoOptMove{0, 5}, inst), InvalidArgument);
  EXPECT_THROW(two_opt(t, 0, 1, 1, 2, inst), InvalidArgument);
  EXPECT_THROW(two_opt(t, 0, 2, 3, 4, inst), InvalidArgument);
}

TEST(TspTwoOpt, RandomSequencesStayValidAndDeltasMatchRecomputation) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto inst = seed % 2 ? random_metric_instance(40, seed) : euclidean_instance(40, seed);
    Rng rng(seed + 7);
    Tour t = random_tour(inst, rng);
    for (int step = 0; step < 2000; ++step) {
      const TwoOptMove m = random_two_opt_move(t, rng);
      const double before = cycle_length(t.order(), inst);
      const double d = t.delta(m, inst);
      t.apply(m, d);
      const double after = cycle_length(t.order(), inst);
      ASSERT_NEAR(after - before, d, 1e-9);
      ASSERT_NEAR(t.length(), after, 1e-9);
      if (step % 100 == 0) {
        ASSERT_TRUE(validate_tour_matrix(tour_matrix(t)));
      }
      for (int c = 0; c < 40; ++c) ASSERT_EQ(t.city(t.position(c)), c);
    }
    EXPECT_TRUE(validate_tour_matrix(tour_matrix(t)));
  }
}

TEST(TspGreedy, CollinearCitiesAreVisitedInOrder) {
  std::vector<City> line;
  for (int i = 0; i < 7; ++i) line.push_back({static_cast<double>(i), 0.0});
  const TspInstance inst(line);
  EXPECT_EQ(greedy_tour(inst, 0).order(), identity(7));
  auto down = identity(7);
  std::reverse(down.begin(), down.end());
  EXPECT_EQ(greedy_tour(inst, 6).order(), down);
  EXPECT_DOUBLE_EQ(greedy_tour(inst, 0).length(), 12.0);
}

TEST(TspGreedy, TiesGoToTheLowestIndex) {
  std::vector<City> line;
  for (int i = 0; i < 5; ++i) line.push_back({static_cast<double>(i), 0.0});
  const TspInstance inst(line);
  EXPECT_EQ(greedy_tour(inst, 2).order(), (std::vector<int>{2, 1, 0, 3, 4}));
  EXPECT_EQ(greedy_tour(all_ones(5), 3).order(), (std::vector<int>{3, 0, 1, 2, 4}));
}

TEST(TspGreedy, IsDeterministic) {
  const auto inst = euclidean_instance(200, 11);
  EXPECT_EQ(greedy_tour(inst, 17), greedy_tour(inst, 17));
}

TEST(TspGreedy, NeverBeatsTheOptimumOnSmallInstances) {
  for (int n = 3; n <= 8; ++n)
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
      const auto inst = seed % 2 ? random_metric_instance(n, seed) : euclidean_instance(n, seed);
      const double opt = tsp_oracle(inst).best.length();
      for (int start = 0; start < n; ++start) EXPECT_GE(greedy_tour(inst, start).length(), opt - 1e-12);
    }
}

TEST(TspOmega, IsLengthPerCity) {
  EXPECT_DOUBLE_EQ(omega(500.0, 500, TspMetric::euclidean_2d), 1.0);
  EXPECT_DOUBLE_EQ(omega(72.0, 100, TspMetric::euclidean_2d), 0.72);
  EXPECT_THROW(omega(1.0, 10, TspMetric::random), InvalidArgument);
}

TEST(TspOracle, FiveCitiesEnumerateTwelveTours) {
  const auto inst = euclidean_instance(5, 42);
  const auto r = tsp_oracle(inst);
  EXPECT_EQ(r.tours, 12);
  EXPECT_NEAR(r.best.length(), naive_optimum(inst), 1e-12);
}

TEST(TspOracle, MatchesNaiveEnumeration) {
  for (int n = 4; n <= 8; ++n) {
    const auto inst = random_metric_instance(n, static_cast<std::uint64_t>(n));
    const auto r = tsp_oracle(inst);
    long expected = 1;
    for (int k = 2; k < n; ++k) expected *= k;
    EXPECT_EQ(r.tours, expected / 2);
    EXPECT_NEAR(r.best.length(), naive_optimum(inst), 1e-12);
  }
  EXPECT_THROW(tsp_oracle(euclidean_instance(12, 1)), OracleLimitError);
}

TEST(TspLocalSearch, ResultHasNoImprovingMove) {
  const auto inst = euclidean_instance(60, 5);
  Rng rng(1);
  const Tour t = two_opt_local_search(random_tour(inst, rng), inst);
  for (int a = 0; a < 60; ++a)
    for (int b = a + 2; b < 60; ++b) {
      const TwoOptMove m{a, b};
      if (!t.is_adjacent(m)) {
        EXPECT_GE(t.delta(m, inst), 0.0);
      }
    }
}

TEST(TspCa, ZeroTemperatureKeepsALocalOptimum) {
  const auto inst = euclidean_instance(50, 9);
  Rng rng(2);
  const Tour start = two_opt_local_search(random_tour(inst, rng), inst);
  CaTspOptions opt;
  opt.initial = start;
  const auto r = ca_tsp(inst, schedule::Constant{0.0}, 200, 3, opt);
  EXPECT_EQ(r.best.order(), start.order());
  EXPECT_EQ(r.record.extras.at("acceptance_rate"), 0.0);
}

TEST(TspCa, FindsTheOptimumOnSmallInstances) {
  for (int n : {5, 8}) {
    const auto inst = euclidean_instance(n, 100 + static_cast<std::uint64_t>(n));
    const double opt = tsp_oracle(inst).best.length();
    const auto r = ca_tsp(inst, default_ca_tsp_schedule(2000), 2000, 4);
    EXPECT_NEAR(r.best.length(), opt, 1e-9) << "N = " << n;
    EXPECT_NEAR(r.record.final_energy, opt, 1e-9);
  }
}

TEST(TspCa, IsDeterministicAndRecordsTheRun) {
  const auto inst = euclidean_instance(60, 8);
  const auto a = ca_tsp(inst, default_ca_tsp_schedule(300), 300, 21);
  const auto b = ca_tsp(inst, default_ca_tsp_schedule(300), 300, 21);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.record, b.record);
  EXPECT_EQ(a.record.method, "ca-tsp");
  EXPECT_EQ(a.record.trace.size(), 4u);
  EXPECT_NEAR(a.record.extras.at("omega"), a.best.length() / 60.0, 1e-15);
  EXPECT_TRUE(validate_tour_matrix(tour_matrix(a.best)));
  EXPECT_NEAR(a.best.length(), cycle_length(a.best.order(), inst), 1e-9);
  EXPECT_NE(ca_tsp(inst, default_ca_tsp_schedule(300), 300, 22).record, a.record);
}

TEST(TspCa, AnnealingBeatsGreedy) {
  const auto inst = euclidean_instance(150, 31);
  const auto r = ca_tsp(inst, default_ca_tsp_schedule(3000), 3000, 5);
  EXPECT_LT(r.best.length(), greedy_tour(inst, 0).length());
}

TEST(TspPimc, FindsTheOptimumOnSmallInstances) {
  for (int n : {5, 8}) {
    const auto inst = euclidean_instance(n, 200 + static_cast<std::uint64_t>(n));
    const double opt = tsp_oracle(inst).best.length();
    const auto r = pimc_tsp(inst, default_tsp_qa_params(500), 6);
    EXPECT_NEAR(r.best.length(), opt, 1e-9) << "N = " << n;
  }
}

TEST(TspPimc, IsDeterministicAndValid) {
  const auto inst = euclidean_instance(40, 12);
  auto p = default_tsp_qa_params(100);
  p.trace_stride = 10;
  const auto a = pimc_tsp(inst, p, 77);
  const auto b = pimc_tsp(inst, p, 77);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.record, b.record);
  EXPECT_EQ(a.record.method, "pimc-tsp");
  EXPECT_EQ(a.record.trace.size(), 11u);
  EXPECT_TRUE(validate_tour_matrix(tour_matrix(a.best)));
  EXPECT_NEAR(a.best.length(), cycle_length(a.best.order(), inst), 1e-9);
  // The coupling grows as Gamma falls.
  EXPECT_LT(a.record.trace.front().coupling, a.record.trace.back().coupling);
}

TEST(TspPimc, StrongCouplingFreezesIdenticalSlices) {
  // Gamma at its floor makes K large: any 2-opt move in one slice breaks four
  // edge agreements with each neighbour and is rejected.
  const auto inst = euclidean_instance(30, 4);
  Rng rng(3);
  PimcTspOptions opt;
  opt.initial = random_tour(inst, rng);
  QaParams p = default_tsp_qa_params(50);
  p.gamma = schedule::Constant{0.0};
  p.gamma_floor = 1e-300;
  p.polish = false;
  const auto r = pimc_tsp(inst, p, 1, opt);
  EXPECT_EQ(r.record.extras.at("acceptance_rate"), 0.0);
  EXPECT_EQ(r.best.order(), opt.initial->order());
}

TEST(TspPimc, RejectsBadParameters) {
  const auto inst = euclidean_instance(10, 1);
  QaParams p = default_tsp_qa_params(10);
  p.m = 1;
  EXPECT_THROW(pimc_tsp(inst, p, 0), InvalidArgument);
  p = default_tsp_qa_params(10);
  p.temperature = 0.0;
  EXPECT_THROW(pimc_tsp(inst, p, 0), InvalidArgument);
}

TEST(TspInstanceTest, EuclideanInstancesLiveInTheBoxAndObeyTheTriangleInequality) {
  const auto inst = euclidean_instance(30, 2);
  const double side = std::sqrt(30.0);
  for (const auto& c : inst.cities()) {
    EXPECT_GE(c[0], 0.0);
    EXPECT_LT(c[0], side);
    EXPECT_GE(c[1], 0.0);
    EXPECT_LT(c[1], side);
  }
  for (int i = 0; i < 30; ++i)
    for (int j = 0; j < 30; ++j) {
      EXPECT_EQ(inst.distance(i, j), inst.distance(j, i));
      for (int k = 0; k < 30; ++k) EXPECT_LE(inst.distance(i, k), inst.distance(i, j) + inst.distance(j, k) + 1e-12);
    }
}

TEST(TspInstanceTest, RandomMetricIsSymmetricUniform) {
  const auto inst = random_metric_instance(60, 5);
  double sum = 0.0;
  for (int i = 0; i < 60; ++i) {
    EXPECT_EQ(inst.distance(i, i), 0.0);
    for (int j = i + 1; j < 60; ++j) {
      EXPECT_EQ(inst.distance(i, j), inst.distance(j, i));
      EXPECT_GE(inst.distance(i, j), 0.0);
      EXPECT_LT(inst.distance(i, j), 1.0);
      sum += inst.distance(i, j);
    }
  }
  EXPECT_NEAR(sum / (60 * 59 / 2), 0.5, 0.03);
}

TEST(TspInstanceTest, RejectsAsymmetricMatrices) {
  EXPECT_THROW(TspInstance(2, {0.0, 1.0, 2.0, 0.0}), InvalidArgument);
  EXPECT_THROW(TspInstance(2, {1.0, 1.0, 1.0, 0.0}), InvalidArgument);
}

TEST(TspIo, NativeRoundTripPreservesDistances) {
  for (const auto& inst : {euclidean_instance(9, 1), random_metric_instance(9, 2)}) {
    std::stringstream ss;
    write_tsp_instance(ss, inst);
    const auto back = read_tsp_instance(ss);
    EXPECT_EQ(back.metric(), inst.metric());
    ASSERT_EQ(back.size(), 9);
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) EXPECT_EQ(back.distance(i, j), inst.distance(i, j));
  }
}

TEST(TspIo, ReadsHandWrittenFiles) {
  std::istringstream coords("4, euclidean-2d\n0 0\n1 0\n1 1\n0 1\n");
  EXPECT_DOUBLE_EQ(Tour(identity(4), read_tsp_instance(coords)).length(), 4.0);

  std::istringstream tri("3 random\n1 2\n3\n");
  const auto r = read_tsp_instance(tri);
  EXPECT_EQ(r.distance(0, 1), 1.0);
  EXPECT_EQ(r.distance(2, 0), 2.0);
  EXPECT_EQ(r.distance(1, 2), 3.0);
}

TEST(TspIo, ReadsTsplibCoordinateLists) {
  std::istringstream in(
      "NAME : square4\nTYPE : TSP\nCOMMENT : unit square\nDIMENSION : 4\nEDGE_WEIGHT_TYPE : EUC_2D\n"
      "NODE_COORD_SECTION\n1 0 0\n2 3 0\n3 3 4\n4 0 4\nEOF\n");
  const auto inst = read_tsp_instance(in);
  EXPECT_EQ(inst.size(), 4);
  EXPECT_EQ(inst.metric(), TspMetric::euclidean_2d);
  EXPECT_DOUBLE_EQ(inst.distance(0, 2), 5.0);
  EXPECT_DOUBLE_EQ(Tour(identity(4), inst).length(), 14.0);
}

TEST(TspIo, MalformedInputsRaiseConfigErrors) {
  for (const char* text : {"", "3 manhattan\n", "3 random\n1 2\n", "2 euclidean-2d\n0 0\n",
                           "1 random\n", "3 random\n1 -2 3\n",
                           "DIMENSION : 3\nEDGE_WEIGHT_TYPE : GEO\nNODE_COORD_SECTION\n1 0 0\n",
                           "DIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 1\nEOF\n"}) {
    std::istringstream in(text);
    EXPECT_THROW(read_tsp_instance(in), ConfigError) << text;
  }
}
