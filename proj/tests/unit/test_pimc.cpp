#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "qanneal/pimc/pimc.hpp"
#include "qanneal/spin/ground_state.hpp"
#include "qanneal/spin/observables.hpp"

using namespace qanneal;

namespace {

// Diagonal of H_C over the 2^N basis, bit b set meaning spin b is down.
Eigen::VectorXd classical_diagonal(const IsingProblem& p) {
  const int n = p.size();
  Eigen::VectorXd d(1 << n);
  for (int s = 0; s < (1 << n); ++s) d[s] = energy(SpinConfig::from_bits(static_cast<std::uint64_t>(s), n), p);
  return d;
}

// Dense H = H_C - Gamma sum sigma^x.
Eigen::MatrixXd tim_matrix(const IsingProblem& p, double gamma) {
  const int n = p.size();
  const int dim = 1 << n;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  h.diagonal() = classical_diagonal(p);
  for (int s = 0; s < dim; ++s)
    for (int b = 0; b < n; ++b) h(s ^ (1 << b), s) -= gamma;
  return h;
}

// Exact thermal <H_C> of the quantum problem.
double exact_classical_energy(const IsingProblem& p, double gamma, double T) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tim_matrix(p, gamma));
  const auto& ev = es.eigenvalues();
  const double e0 = ev.minCoeff();
  Eigen::VectorXd w = ((-(ev.array() - e0)) / T).exp();
  const Eigen::VectorXd hc = classical_diagonal(p);
  double num = 0.0;
  for (int k = 0; k < ev.size(); ++k) {
    const Eigen::VectorXd v = es.eigenvectors().col(k);
    num += w[k] * v.cwiseProduct(v).dot(hc);
  }
  return num / w.sum();
}

// <H_C> of the M-slice Trotter approximation, Tr[H_C (A B)^M] / Tr[(A B)^M]
// with A = exp(-eps H_C), B = exp(eps Gamma sum sigma^x), eps = 1/(M T).
double trotter_classical_energy(const IsingProblem& p, double gamma, double T, int m) {
  const int n = p.size();
  const double eps = 1.0 / (m * T);
  const Eigen::VectorXd hc = classical_diagonal(p);
  Eigen::Matrix2d single;
  single << std::cosh(eps * gamma), std::sinh(eps * gamma), std::sinh(eps * gamma), std::cosh(eps * gamma);
  Eigen::MatrixXd b = Eigen::MatrixXd::Ones(1, 1);
  for (int k = 0; k < n; ++k) {
    Eigen::MatrixXd next(b.rows() * 2, b.cols() * 2);
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) next.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = single(r, c) * b;
    b = next;
  }
  const Eigen::VectorXd a = (-(eps) * (hc.array() - hc.minCoeff())).exp();
  Eigen::MatrixXd ab = a.asDiagonal() * b;
  ab /= ab.norm();
  Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(ab.rows(), ab.cols());
  for (int k = 0; k < m; ++k) {
    prod = prod * ab;
    prod /= prod.norm();
  }
  return (prod.diagonal().array() * hc.array()).sum() / prod.trace();
}

IsingProblem sk4(std::uint64_t seed) {
  return sample_disorder(DisorderModel::gaussian(1.0, seed), Topology::complete, 4, FieldModel{0.2});
}

}  // namespace

TEST(TrotterCouplings, Examples) {
  auto [kij, k] = trotter_couplings(1.0, 1.0, 0.5, 2);
  EXPECT_EQ(kij, 1.0);
  EXPECT_NEAR(k, 0.5 * std::log(1.0 / std::tanh(1.0)), 1e-15);
  EXPECT_NEAR(inter_slice_coupling(3.0, 0.5, 3), 0.5 * std::log(std::cosh(2.0) / std::sinh(2.0)), 1e-15);
  EXPECT_GE(inter_slice_coupling(1e6, 1.0, 2), 0.0);
  EXPECT_LT(inter_slice_coupling(1e3, 1.0, 2), 1e-200);
  EXPECT_GT(inter_slice_coupling(1e-8, 0.05, 20), inter_slice_coupling(1e-4, 0.05, 20));
  EXPECT_THROW(trotter_couplings(1.0, 0.0, 1.0, 4), InvalidArgument);
  EXPECT_THROW(trotter_couplings(1.0, 1.0, 1.0, 1), InvalidArgument);
}

TEST(EffectiveEnergy, TwoSliceSingleBondExpansion) {
  IsingProblem p(Topology::complete, 2, {{1, 0, 1.0}});
  TrotterLattice lat(p, 2, 0.5, 1.0);
  lat.fill(SpinConfig{1, 1});
  const double k = lat.inter_coupling();
  // 2 slices x 1 bond with K_ij = 1, plus 2 sites x 2 periodic links.
  EXPECT_NEAR(effective_energy(lat), -2.0 * 1.0 - 4.0 * k, 1e-14);
}

TEST(EffectiveEnergy, DecoupledSlicesLimit) {
  auto p = sample_disorder(DisorderModel::gaussian(1.0, 3), Topology::complete, 6, FieldModel{0.4});
  TrotterLattice lat(p, 5, 0.2, 1e4);
  Rng rng(1);
  lat.randomize(rng);
  EXPECT_EQ(lat.inter_coupling(), 0.0);
  double sum = 0.0;
  for (int k = 0; k < 5; ++k) sum += energy(lat.slice(k), p);
  EXPECT_NEAR(effective_energy(lat), sum / (5 * 0.2), 1e-12);
}

TEST(EffectiveEnergy, FlipDeltaMatchesRecomputation) {
  for (int m : {2, 3, 8}) {
    auto p = sample_disorder(DisorderModel::gaussian(1.0, 7 + m), Topology::square_periodic, 9, FieldModel{0.3});
    TrotterLattice lat(p, m, 0.3, 0.7);
    Rng rng(static_cast<std::uint64_t>(m));
    lat.randomize(rng);
    for (int k = 0; k < m; ++k) {
      for (int i = 0; i < 9; ++i) {
        const double before = effective_energy(lat);
        const double predicted = lat.flip_delta(i, k);
        lat.flip(i, k);
        EXPECT_NEAR(effective_energy(lat) - before, predicted, 1e-11) << "m=" << m;
      }
    }
  }
}

TEST(PimcAnneal, FerromagnetReachesGroundState) {
  auto p = uniform_problem(Topology::complete, 8, 1.0);
  const double e0 = brute_force_ground_state(p).energy;
  QaParams params;
  params.m = 16;
  params.temperature = 1.0 / 16;
  params.sweeps = 2000;
  params.gamma = schedule::Linear{3.0, 2000.0};
  auto rec = pimc_anneal(p, params, 5);
  EXPECT_EQ(residual_energy(rec, e0), 0.0);
  EXPECT_EQ(rec.final_energy, energy(rec.final_config, p));
  for (std::size_t k = 1; k < rec.trace.size(); ++k) EXPECT_LT(rec.trace[k - 1].t, rec.trace[k].t);
}

TEST(PimcAnneal, LargeFieldDecorrelatesSlices) {
  auto p = sample_disorder(DisorderModel::gaussian(1.0, 4), Topology::complete, 64);
  QaParams params;
  params.m = 10;
  params.temperature = 0.5;
  params.sweeps = 200;
  params.gamma = schedule::Constant{1e3};
  params.polish = false;
  auto out = pimc_anneal_full(p, params, 8);
  double q = 0.0;
  for (int k = 0; k < params.m; ++k) q += overlap(out.slices[k], out.slices[(k + 1) % params.m]);
  q /= params.m;
  // Independent spins: mean overlap 0 with standard deviation 1/sqrt(N M).
  EXPECT_LT(std::abs(q), 4.0 / std::sqrt(64.0 * params.m));
}

TEST(PimcAnneal, DeterministicPerSeed) {
  auto p = sample_disorder(DisorderModel::gaussian(1.0, 5), Topology::square_periodic, 16);
  auto params = default_qa_params(300);
  params.trace_stride = 10;
  EXPECT_EQ(pimc_anneal(p, params, 99), pimc_anneal(p, params, 99));
}

TEST(PimcAnneal, RejectsParametersOutsideBand) {
  auto p = uniform_problem(Topology::complete, 4, 1.0);
  QaParams params = default_qa_params(10);
  params.m = 200;
  params.temperature = 1.0;
  EXPECT_THROW(pimc_anneal(p, params, 1), InvalidArgument);
}

TEST(PimcSweep, RefreshingCouplingMatchesFreshLattice) {
  auto p = sample_disorder(DisorderModel::gaussian(1.0, 6), Topology::complete, 10);
  TrotterLattice a(p, 8, 0.125, 2.0);
  Rng rng(3);
  a.randomize(rng);
  for (int t = 0; t < 20; ++t) pimc_sweep(a, rng);
  TrotterLattice b(p, 8, 0.125, 0.7);
  for (int k = 0; k < 8; ++k) b.set_slice(k, a.slice(k));
  Rng rng_b = rng;
  a.set_gamma(0.7);
  for (int t = 0; t < 20; ++t) {
    pimc_sweep(a, rng);
    pimc_sweep(b, rng_b);
  }
  for (int k = 0; k < 8; ++k) EXPECT_EQ(a.slice(k), b.slice(k));
}

TEST(Equilibrium, FreeSpinTransverseMagnetization) {
  IsingProblem p(Topology::complete, 1, {});
  auto est = pimc_equilibrium_estimate(p, 1.0, 1.0, 16, 200000, 11);
  EXPECT_NEAR(est.transverse.mean, std::tanh(1.0), 3.0 * est.transverse.error);
  EXPECT_LT(est.transverse.error, 0.01);
}

TEST(Equilibrium, SmallFieldRecoversClassicalGroundEnergy) {
  auto p = uniform_problem(Topology::square_periodic, 9, 1.0);
  const double e0 = brute_force_ground_state(p).energy;
  EquilibriumOptions opt;
  opt.thermalization = 4000;
  opt.anneal_from = 3.0;
  auto est = pimc_equilibrium_estimate(p, 1e-3, 0.05, 20, 2000, 12, opt);
  // Temporal domain walls frozen in by the ramp let boundary spins fluctuate
  // at the slice temperature M T, so the limit is approached, not hit.
  EXPECT_NEAR(est.energy.mean, e0, 0.05);
  EXPECT_GE(est.energy.mean, e0);
}

TEST(Equilibrium, TrotterValuesApproachExactAsSlicesGrow) {
  auto p = sample_disorder(DisorderModel::gaussian(1.0, 21), Topology::complete, 5);
  const double exact = exact_classical_energy(p, 1.0, 0.5);
  double prev = std::numeric_limits<double>::infinity();
  for (int m : {32, 64, 128}) {
    const double err = std::abs(trotter_classical_energy(p, 1.0, 0.5, m) - exact);
    EXPECT_LT(err, prev) << "M=" << m;
    prev = err;
  }
}

TEST(Equilibrium, MatchesTransferMatrixAndExactAverage) {
  auto p = sk4(31);
  const double exact = exact_classical_energy(p, 1.0, 0.5);
  const double trotter = trotter_classical_energy(p, 1.0, 0.5, 32);
  auto est = pimc_equilibrium_estimate(p, 1.0, 0.5, 32, 40000, 9);
  EXPECT_NEAR(est.energy.mean, trotter, 3.0 * est.energy.error);
  EXPECT_NEAR(est.energy.mean, exact, 3.0 * est.energy.error + std::abs(trotter - exact));
}

TEST(Equilibrium, SlicesAreStatisticallyEquivalent) {
  auto p = sk4(41);
  auto est = pimc_equilibrium_estimate(p, 1.0, 0.5, 16, 40000, 10);
  for (const auto& s : est.slice_energies) EXPECT_NEAR(s.mean, est.energy.mean, 3.0 * s.error);
}

TEST(Equilibrium, BinnedEstimateOfConstantSeries) {
  std::vector<double> v(64, 2.5);
  auto e = binned_estimate(v);
  EXPECT_EQ(e.mean, 2.5);
  EXPECT_EQ(e.error, 0.0);
  EXPECT_THROW(binned_estimate(std::vector<double>(10, 1.0)), InvalidArgument);
}
