#include <gtest/gtest.h>

#include "btd/linalg.hpp"
#include "btd/minors.hpp"
#include "btd/uniqueness.hpp"
#include "helpers.hpp"

using namespace btd;

namespace {

std::vector<int> ones_then(int n_ones, int last) {
  std::vector<int> L(n_ones, 1);
  L.push_back(last);
  return L;
}

// Rank-revealing split E = B C^T with B having `rank` columns.
void split_rank(const MatR& E, int rank, MatR& B, MatR& C) {
  Eigen::JacobiSVD<MatR> svd(E, Eigen::ComputeThinU | Eigen::ComputeThinV);
  B = svd.matrixU().leftCols(rank) * svd.singularValues().head(rank).asDiagonal();
  C = svd.matrixV().leftCols(rank);
}

double largest_4x4_minor(const MatR& E) {
  double worst = 0;
  std::vector<int> r(4), c(4);
  for (int a = 0; a < E.rows(); ++a)
    for (int b = a + 1; b < E.rows(); ++b)
      for (int cc = b + 1; cc < E.rows(); ++cc)
        for (int d = cc + 1; d < E.rows(); ++d)
          for (int p = 0; p < E.cols(); ++p)
            for (int q = p + 1; q < E.cols(); ++q)
              for (int s = q + 1; s < E.cols(); ++s)
                for (int t = s + 1; t < E.cols(); ++t) {
                  const int rows[4] = {a, b, cc, d}, cols[4] = {p, q, s, t};
                  Eigen::Matrix4d m;
                  for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j) m(i, j) = E(rows[i], cols[j]);
                  worst = std::max(worst, std::abs(m.determinant()));
                }
  return worst;
}

}  // namespace

TEST(KRank, SmallCases) {
  MatR a(2, 3);
  a << 1, 0, 1, 0, 1, 1;
  EXPECT_EQ(k_rank(a).value, 2);
  a.col(2) = a.col(0);
  EXPECT_EQ(k_rank(a).value, 1);
  a.col(0).setZero();
  EXPECT_EQ(k_rank(a).value, 0);
  MatR big = MatR::Random(3, 40);
  auto capped = k_rank(big, 1e-10, 100);
  EXPECT_FALSE(capped.exact);
}

TEST(KRank, BlockVersion) {
  Rng rng(1);
  std::vector<MatR> blocks{randn<double>(5, 2, rng), randn<double>(5, 2, rng), randn<double>(5, 2, rng)};
  EXPECT_EQ(k_prime_rank(blocks).value, 2);
}

TEST(ParameterCount, Tensor287) {
  auto p = parameter_count_S(2, 8, 7, {3, 3, 3});
  EXPECT_EQ(p.S, 111);
  EXPECT_EQ(p.IJK, 112);
  EXPECT_TRUE(p.passes);
  EXPECT_THROW(parameter_count_S(2, 2, 2, {3}), ArgumentError);
}

TEST(GenericBounds, LargeRSweep) {
  for (int R = 2; R <= 60; ++R) {
    auto g = generic_bounds(8, 8, 50, ones_then(R - 1, 2));
    EXPECT_EQ(g.find("row3")->holds, R <= 8) << R;
    EXPECT_EQ(g.find("row8")->holds, R <= 48) << R;
    EXPECT_EQ(g.find("row6")->holds, R <= 39) << R;
  }
}

TEST(GenericBounds, Row5ComponentsFor335) {
  auto g = generic_bounds(3, 3, 5, {1, 1, 1, 2});
  const auto* r5 = g.find("row5");
  ASSERT_NE(r5, nullptr);
  EXPECT_NE(r5->detail.find("K>=L_2+...+L_R+1: yes"), std::string::npos);
  EXPECT_NE(r5->detail.find("I>=2: no"), std::string::npos);
  EXPECT_FALSE(r5->holds);
}

TEST(GenericBounds, EqualSizeOnlyRows) {
  auto g = generic_bounds(4, 6, 6, {1, 2});
  EXPECT_FALSE(g.find("row4")->applicable);
  EXPECT_FALSE(g.find("row7")->applicable);
  auto h = generic_bounds(4, 6, 6, {2, 2, 2});
  EXPECT_TRUE(h.find("row7")->holds);
}

TEST(MainTheorem, ThreeTerm) {
  auto d = random_btd<double>(3, 8, 8, {2, 3, 4}, 1);
  auto r = check_main_theorem(d);
  EXPECT_EQ(r.d, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(r.Q2_null_dim, 10);
  EXPECT_EQ(r.assumptions, Verdict::yes);
  EXPECT_EQ(r.a, Verdict::yes);
  EXPECT_EQ(r.b, Verdict::yes);
  EXPECT_EQ(r.S5_overall_unique, Verdict::yes);
  EXPECT_EQ(r.S2_overall_by_evd, Verdict::yes);
  EXPECT_TRUE(check_k_rank_conditions(d));
  // One fewer frontal slice breaks (a).
  auto e = random_btd<double>(3, 8, 7, {2, 3, 4}, 1);
  EXPECT_EQ(check_main_theorem(e).a, Verdict::no);
}

TEST(MainTheorem, SixTermConditionE) {
  auto d = random_btd<double>(3, 9, 15, {2, 2, 2, 3, 3, 4}, 2);
  auto r = check_main_theorem(d);
  EXPECT_EQ(r.Q2_null_dim, 15);
  EXPECT_EQ(r.e_lhs, 105);
  EXPECT_EQ(r.e_rhs, 101);
  EXPECT_EQ(r.e, Verdict::yes);
  EXPECT_EQ(r.S4_first_fm_unique, Verdict::yes);
}

TEST(MainTheorem, Tensor287FirstFactorOnly) {
  auto t = fixtures::tensor_287();
  MatR Q2 = build_Q2(t);
  EXPECT_EQ(Q2.rows(), 28);
  EXPECT_EQ(numerical_rank(Q2, 1e-10), 25);
  BlockTermDecomposition<double> d;
  d.A.resize(2, 3);
  d.A << 1, 1, 0, 1, 0, 1;
  MatR E1 = MatR::Zero(8, 7), E2 = E1, E3 = E1;
  E1(4, 0) = E1(6, 0) = 1;
  E1(0, 1) = 1;
  E1(1, 2) = 1;
  E2(4, 2) = 1;
  E2(2, 3) = 1;
  E2(3, 4) = 1;
  E2(4, 5) = 1;
  E2(4, 6) = 1;
  E3(7, 0) = E3(7, 2) = E3(7, 4) = 1;
  E3(5, 5) = 1;
  E3(6, 6) = 1;
  for (const MatR& E : {E1, E2, E3}) {
    MatR B, C;
    split_rank(E, 3, B, C);
    d.B.push_back(B);
    d.C.push_back(C);
  }
  auto r = check_main_theorem(d, &t);
  EXPECT_EQ(r.d, (std::vector<int>{1, 1, 1}));
  EXPECT_EQ(r.Q2_dim_ok, Verdict::yes);
  EXPECT_EQ(r.S4_first_fm_unique, Verdict::yes);
  EXPECT_NE(r.S5_overall_unique, Verdict::yes);
}

TEST(Witnesses, Family287StaysRankThree) {
  Rng rng(4);
  std::normal_distribution<double> nd;
  Family287Params P;
  P.d1 = nd(rng);
  P.d2 = nd(rng);
  for (int i = 0; i < 8; ++i) P.f(i) = nd(rng);
  for (int i = 0; i < 7; ++i) P.g(i) = nd(rng), P.h(i) = nd(rng);
  auto fam = family_287(0.3, -0.2, P);
  for (int i = 0; i < 2; ++i) {
    MatR s = MatR::Zero(8, 7);
    for (int r = 0; r < 3; ++r) s += fam.A(i, r) * fam.E[r];
    EXPECT_LE((s - fam.canonical.horizontal(i)).norm(), 1e-10);
  }
  for (const auto& E : fam.E) EXPECT_LE(largest_4x4_minor(E), 1e-10);
  // p = 0 gives back the canonical terms.
  auto base = family_287(0.0, 0.0, P);
  for (int r = 0; r < 3; ++r) EXPECT_LE((base.E[r] - base.canonical_decomposition.E(r)).norm(), 1e-12);
}

TEST(Witnesses, SharedPairAlternatives) {
  Rng rng(5);
  std::vector<VecR> a, b, c;
  for (int n = 0; n < 2; ++n) a.push_back(randn<double>(2, 1, rng));
  for (int n = 0; n < 4; ++n) b.push_back(randn<double>(4, 1, rng));
  for (int n = 0; n < 4; ++n) c.push_back(randn<double>(4, 1, rng));
  auto ex = two_term_alternatives(a, b, c);
  ASSERT_EQ(ex.decompositions.size(), 3u);
  for (const auto& d : ex.decompositions) {
    auto t = compose(d);
    double e = 0;
    for (std::size_t n = 0; n < t.values.size(); ++n) e = std::max(e, std::abs(t.values[n] - ex.T2.values[n]));
    EXPECT_LE(e, 1e-12);
  }
  MatR q2 = build_Q2(ex.T2);
  EXPECT_EQ(q2.cols() - numerical_rank(q2, 1e-10), 5);
}

TEST(Witnesses, SharedPairInstanceNullDimension) {
  for (int R = 3; R <= 5; ++R) {
    auto t = compose(fixtures::shared_pair_instance(R, R));
    MatR q2 = build_Q2(t);
    EXPECT_EQ(q2.cols() - numerical_rank(q2, 1e-8), R);
  }
}

TEST(Report, JsonHasStatements) {
  auto d = random_btd<double>(3, 8, 8, {2, 3, 4}, 1);
  auto j = report_to_json(check_main_theorem(d));
  EXPECT_EQ(j["statements"]["S5_overall_unique"], "yes");
  auto b = bounds_to_json(generic_bounds(8, 8, 50, ones_then(47, 2)));
  EXPECT_TRUE(b["bounds"].is_array());
}
