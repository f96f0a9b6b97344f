#include <gtest/gtest.h>

#include "btd/linalg.hpp"
#include "btd/minors.hpp"
#include "helpers.hpp"

using namespace btd;

TEST(Index, WedgeAndSymOrder) {
  auto p = idx::wedge_pairs(4);
  ASSERT_EQ(p.size(), 6u);
  for (std::size_t n = 0; n < p.size(); ++n) EXPECT_EQ(idx::wedge(p[n].first, p[n].second), (long long)n);
  EXPECT_EQ(idx::sym(0, 0), 0);
  EXPECT_EQ(idx::sym(0, 1), 1);
  EXPECT_EQ(idx::sym(1, 1), 2);
  EXPECT_EQ(idx::sym(2, 2), 5);
}

TEST(Q2, GoldenIntegerMatrix) {
  auto t = fixtures::integer_335_tensor();
  Mat<long long> q = build_Q2(t);
  ASSERT_EQ(q.rows(), 9);
  ASSERT_EQ(q.cols(), 15);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 15; ++c) EXPECT_EQ(q(r, c), fixtures::integer_335_q2(r, c)) << r << "," << c;
}

TEST(Q2, SerialAndParallelAgree) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto t = compose(random_btd<double>(4, 5, 6, {1, 2, 2}, s));
    EXPECT_EQ((build_Q2(t) - build_Q2_serial(t)).norm(), 0.0);
    auto tc = compose(random_btd<cd>(3, 4, 5, {2, 2}, s));
    EXPECT_EQ((build_Q2(tc) - build_Q2_serial(tc)).norm(), 0.0);
  }
}

TEST(Q2, RequiresTwoRowsInFirstTwoModes) {
  Tensor3<double> t(1, 3, 3);
  EXPECT_THROW(build_Q2(t), ArgumentError);
}

TEST(Q2, FloatingMatchesGolden) {
  auto ti = fixtures::integer_335_tensor();
  Tensor3<double> t(3, 3, 5);
  for (std::size_t n = 0; n < t.values.size(); ++n) t.values[n] = double(ti.values[n]);
  MatR q = build_Q2(t);
  double worst = 0;
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 15; ++c) worst = std::max(worst, std::abs(q(r, c) - double(fixtures::integer_335_q2(r, c))));
  EXPECT_LE(worst, 1e-12);
  EXPECT_EQ(numerical_rank(q, 1e-10), 9);
}

TEST(Rank1, KnownRankOneCombination) {
  // CPD tensor with invertible C: f picking one term gives a rank-1 slice mixture.
  Rng rng(11);
  MatR A = randn<double>(4, 3, rng), B = randn<double>(5, 3, rng), C = randn<double>(3, 3, rng);
  BlockTermDecomposition<double> d;
  d.A = A;
  for (int r = 0; r < 3; ++r) {
    d.B.push_back(B.col(r));
    d.C.push_back(C.col(r));
  }
  auto t = compose(d);
  VecR f = C.transpose().colPivHouseholderQr().solve(VecR::Unit(3, 1));
  auto chk = rank1_membership(t, f);
  EXPECT_TRUE(chk.direct);
  EXPECT_TRUE(chk.via_R2);
  VecR g = VecR::Random(3);
  auto chk2 = rank1_membership(t, g);
  EXPECT_FALSE(chk2.direct);
  EXPECT_FALSE(chk2.via_R2);
}

TEST(Compound, MatchesExplicitMinors) {
  MatR m(3, 3);
  m << 1, 2, 3, 4, 5, 6, 7, 8, 10;
  MatR c = compound2(m);
  ASSERT_EQ(c.rows(), 3);
  EXPECT_DOUBLE_EQ(c(0, 0), 1 * 5 - 2 * 4);
  EXPECT_DOUBLE_EQ(c(2, 2), 5 * 10 - 6 * 8);
}

TEST(Builders, PKAndDAreInverse) {
  for (int K : {1, 2, 5}) {
    MatR P = build_PK(K), D = build_D(K);
    EXPECT_LE((P.transpose() * D - MatR::Identity(idx::num_sym(K), idx::num_sym(K))).norm(), 1e-15);
  }
}
