#include <gtest/gtest.h>

#include "btd/linalg.hpp"
#include "btd/sjbd.hpp"
#include "helpers.hpp"

using namespace btd;

namespace {

double reconstruction_residual(const std::vector<MatR>& V, const SJBDSolution<double>& s) {
  double worst = 0;
  for (std::size_t q = 0; q < V.size(); ++q)
    worst = std::max(worst, (V[q] - s.N * s.D[q] * s.N.transpose()).norm() / V[q].norm());
  return worst;
}

}  // namespace

TEST(Commutant, DimensionEqualsNumberOfBlocks) {
  auto in = fixtures::sjbd_instance(6, {1, 2, 3}, 1);
  SJBDProblem<double> p;
  p.V = in.V;
  auto cb = commutant_basis(p, std::nullopt);
  EXPECT_EQ(cb.R, 3);
  for (const auto& U : cb.U)
    for (const auto& V : in.V) EXPECT_LE((U * V - V * U.transpose()).norm(), 1e-8 * V.norm());
}

TEST(Agglomerate, CutsAtRequestedCount) {
  MatR d(4, 4);
  d << 0, 1, 5, 5, 1, 0, 5, 5, 5, 5, 0, 2, 5, 5, 2, 0;
  auto g = agglomerate(d, Linkage::single, 2);
  ASSERT_EQ(g.size(), 2u);
  auto h = agglomerate(d, Linkage::average, 0, 1.5);
  EXPECT_EQ(h.size(), 3u);
}

TEST(Evd, EigenSubspacesOfKnownMatrix) {
  Rng rng(2);
  MatR X = randn<double>(4, 4, rng);
  VecR lam(4);
  lam << 1, 1, 3, -2;
  MatR Z = X * lam.asDiagonal() * X.inverse();
  auto r = eigen_subspaces<double>(Z, 3);
  ASSERT_TRUE(r.ok);
  std::vector<int> d = r.d;
  std::sort(d.begin(), d.end());
  EXPECT_EQ(d, (std::vector<int>{1, 1, 2}));
}

TEST(Sjbd, ExactSingleVariant) {
  auto in = fixtures::sjbd_instance(7, {1, 2, 3}, 5);
  SJBDProblem<double> p;
  p.V = in.V;
  auto s = solve_sjbd(p);
  EXPECT_EQ(s.R, 3);
  EXPECT_LE(reconstruction_residual(in.V, s), 1e-8);
  EXPECT_LE(fixtures::worst_block_angle(in.N, in.d, s.N, s.d), 1e-6);
}

TEST(Sjbd, ExactCpdVariant) {
  auto in = fixtures::sjbd_instance(6, {2, 2, 1}, 6);
  SJBDProblem<double> p;
  p.V = in.V;
  SJBDOptions o;
  o.variant = EvdVariant::cpd;
  auto s = solve_sjbd(p, o);
  EXPECT_LE(reconstruction_residual(in.V, s), 1e-8);
  EXPECT_LE(fixtures::worst_block_angle(in.N, in.d, s.N, s.d), 1e-6);
}

TEST(Sjbd, ComplexInstance) {
  Rng rng(3);
  const int K = 5;
  std::vector<int> d{1, 2, 2};
  MatC N = randn<cd>(K, 5, rng);
  std::vector<MatC> V;
  for (int q = 0; q < 10; ++q) {
    MatC D = MatC::Zero(5, 5);
    for (int r = 0, off = 0; r < 3; off += d[r], ++r) {
      MatC g = randn<cd>(d[r], d[r], rng);
      D.block(off, off, d[r], d[r]) = g + g.transpose();
    }
    V.push_back(N * D * N.transpose());
  }
  SJBDProblem<cd> p;
  p.V = V;
  auto s = solve_sjbd(p);
  EXPECT_EQ(s.R, 3);
  for (std::size_t q = 0; q < V.size(); ++q) EXPECT_LE((V[q] - s.N * s.D[q] * s.N.transpose()).norm(), 1e-8 * V[q].norm());
}

TEST(Sjbd, RankDeficientJointColumnSpace) {
  auto in = fixtures::sjbd_instance(8, {1, 1, 2}, 7);
  SJBDProblem<double> p;
  p.V = in.V;
  auto s = solve_sjbd(p);
  EXPECT_EQ(s.N.cols(), 4);
  EXPECT_LE(reconstruction_residual(in.V, s), 1e-8);
}

TEST(Sjbd, FlagsTooFewMatrices) {
  auto in = fixtures::sjbd_instance(5, {2, 3}, 8, 0);
  in.V.resize(2);
  SJBDProblem<double> p;
  p.V = in.V;
  auto s = solve_sjbd(p);
  EXPECT_TRUE(s.no_guarantee);
}

TEST(Sjbd, ReportsNonSymmetricInput) {
  auto in = fixtures::sjbd_instance(4, {1, 1, 2}, 9);
  in.V[0](0, 1) += 1.0;
  SJBDProblem<double> p;
  p.V = in.V;
  auto s = solve_sjbd(p);
  EXPECT_FALSE(s.diagnostics.empty());
  SJBDProblem<double> bad;
  bad.V = {MatR::Identity(3, 3), MatR::Identity(2, 2)};
  EXPECT_THROW(solve_sjbd(bad), ArgumentError);
}
