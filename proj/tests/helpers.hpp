#pragma once

#include <algorithm>
#include <vector>

#include "btd/linalg.hpp"
#include "btd/sjbd.hpp"
#include "btd/tensor.hpp"

namespace btd::fixtures {

struct Config {
  int I, J, K;
  std::vector<int> L;
};

inline const Config kThreeTerm{3, 8, 8, {2, 3, 4}};
inline const Config kFourTerm{3, 9, 10, {1, 2, 3, 4}};
inline Config six_term(int J) { return {3, J, 15, {2, 2, 2, 3, 3, 4}}; }

// R x (R+2) x (R+2), 1-based labels: B_1 = [b1 b2 b3], B_2 = [b1 b2 b4], B_r = [b_{3r-4} b_{3r-3} b_{3r-2}]
// for r >= 3; C_r = [c1 c2 c_{r+2}].
inline BlockTermDecomposition<double> shared_pair_instance(int R, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> nd;
  auto draw = [&](int r, int c) {
    MatR m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = nd(rng);
    return m;
  };
  const int n = R + 2;
  MatR A = draw(R, R), b = draw(n, std::max(4, 3 * R - 2)), c = draw(n, n);
  BlockTermDecomposition<double> d;
  d.A = A;
  for (int r = 0; r < R; ++r) {
    MatR B(n, 3), C(n, 3);
    if (r < 2)
      B << b.col(0), b.col(1), b.col(r + 2);
    else
      B << b.col(3 * r - 2), b.col(3 * r - 1), b.col(3 * r);
    C << c.col(0), c.col(1), c.col(r + 2);
    d.B.push_back(B);
    d.C.push_back(C);
  }
  return d;
}

// Integer 3 x 3 x 5 tensor with A~ = [I | 1], B~ columns (1,1,1),(1,2,3),e1,e2,e3, C~ = I_5.
inline Tensor3<long long> integer_335_tensor() {
  const long long A[3][4] = {{1, 0, 0, 1}, {0, 1, 0, 1}, {0, 0, 1, 1}};
  const long long B[3][5] = {{1, 1, 1, 0, 0}, {1, 2, 0, 1, 0}, {1, 3, 0, 0, 1}};
  const int term_of_col[5] = {0, 1, 2, 3, 3};
  Tensor3<long long> t(3, 3, 5);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 5; ++k) t(i, j, k) = A[i][term_of_col[k]] * B[j][k];
  return t;
}

// As printed: columns run over k1 <= k2 with k1 outer, not the colex order of build_Q2.
inline const long long kInteger335Q2[9][15] = {
    {0, 1, 0, 1, 0, 0, 0, -1, 0, 0, 0, 0, 0, 0, 0},   {0, 2, 0, 0, 1, 0, 0, 0, -1, 0, 0, 0, 0, 0, 0},
    {0, 1, 0, -1, 1, 0, 0, 3, -2, 0, 0, 0, 0, 0, 0},  {0, 0, -1, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 0, 0},
    {0, 0, -1, 0, 1, 0, 0, 0, 0, 0, 0, -1, 0, 0, 0},  {0, 0, 0, -1, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, -2, 1, 0, 0, -1, 0, 0, 0, 0},  {0, 0, 0, 0, 0, 0, -3, 0, 1, 0, 0, -1, 0, 0, 0},
    {0, 0, 0, 0, 0, 0, 0, -3, 2, 0, 0, 0, 0, 0, 0}};

// Printed entry at row r for build_Q2 column c = k1 + k2(k2+1)/2.
inline long long integer_335_q2(int r, int c) {
  int k2 = 0;
  while ((k2 + 1) * (k2 + 2) / 2 <= c) ++k2;
  const int k1 = c - k2 * (k2 + 1) / 2;
  const int lex = k1 * 5 - k1 * (k1 - 1) / 2 + (k2 - k1);
  return kInteger335Q2[r][lex];
}

// 2 x 8 x 7 with E1 = [e5+e7, e1, e2, 0,0,0,0], E2 = [0,0,e5,e3,e4,e5,e5], E3 = [e8,0,e8,0,e8,e6,e7].
inline Tensor3<double> tensor_287() {
  MatR E[3];
  for (auto& e : E) e = MatR::Zero(8, 7);
  auto col = [](std::initializer_list<int> ones) {
    VecR v = VecR::Zero(8);
    for (int i : ones) v(i - 1) = 1;
    return v;
  };
  E[0].col(0) = col({5, 7});
  E[0].col(1) = col({1});
  E[0].col(2) = col({2});
  E[1].col(2) = col({5});
  E[1].col(3) = col({3});
  E[1].col(4) = col({4});
  E[1].col(5) = col({5});
  E[1].col(6) = col({5});
  E[2].col(0) = col({8});
  E[2].col(2) = col({8});
  E[2].col(4) = col({8});
  E[2].col(5) = col({6});
  E[2].col(6) = col({7});
  const double A[2][3] = {{1, 1, 0}, {1, 0, 1}};
  Tensor3<double> t(2, 8, 7);
  for (int i = 0; i < 2; ++i)
    for (int r = 0; r < 3; ++r)
      for (int j = 0; j < 8; ++j)
        for (int k = 0; k < 7; ++k) t(i, j, k) += A[i][r] * E[r](j, k);
  return t;
}

struct SJBDInstance {
  MatR N;
  std::vector<int> d;
  std::vector<MatR> V;
};

// V_q = N D_q N^T with random symmetric blocks; Q exceeds sum C(d_r+1,2) by `extra`.
inline SJBDInstance sjbd_instance(int K, const std::vector<int>& d, std::uint64_t seed, int extra = 2) {
  Rng rng(seed);
  SJBDInstance in;
  in.d = d;
  int sum_d = 0, q = extra;
  for (int x : d) {
    sum_d += x;
    q += x * (x + 1) / 2;
  }
  in.N = randn<double>(K, sum_d, rng);
  for (int n = 0; n < q; ++n) {
    MatR D = MatR::Zero(sum_d, sum_d);
    for (int r = 0, off = 0; r < (int)d.size(); off += d[r], ++r) {
      MatR g = randn<double>(d[r], d[r], rng);
      D.block(off, off, d[r], d[r]) = g + g.transpose();
    }
    in.V.push_back(in.N * D * in.N.transpose());
  }
  return in;
}

// Worst principal-angle sine after greedily pairing estimated with true blocks of equal size.
inline double worst_block_angle(const MatR& N_true, const std::vector<int>& d_true, const MatR& N_est,
                                const std::vector<int>& d_est) {
  if (d_true.size() != d_est.size()) return 1.0;
  std::vector<int> off_t{0}, off_e{0};
  for (int x : d_true) off_t.push_back(off_t.back() + x);
  for (int x : d_est) off_e.push_back(off_e.back() + x);
  std::vector<char> used(d_est.size(), 0);
  double worst = 0;
  for (std::size_t r = 0; r < d_true.size(); ++r) {
    double best = 1.0;
    int arg = -1;
    for (std::size_t e = 0; e < d_est.size(); ++e) {
      if (used[e] || d_est[e] != d_true[r]) continue;
      double a = max_principal_angle<double>(N_true.middleCols(off_t[r], d_true[r]), N_est.middleCols(off_e[e], d_est[e]));
      if (a < best) {
        best = a;
        arg = static_cast<int>(e);
      }
    }
    if (arg < 0) return 1.0;
    used[arg] = 1;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace btd::fixtures
