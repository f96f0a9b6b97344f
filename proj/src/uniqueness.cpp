#include "btd/uniqueness.hpp"

#include <algorithm>
#include <boost/math/special_functions/binomial.hpp>
#include <cmath>
#include <functional>
#include <numeric>

#include "btd/linalg.hpp"
#include "btd/minors.hpp"

namespace btd {

Verdict operator&&(Verdict a, Verdict b) {
  if (a == Verdict::no || b == Verdict::no) return Verdict::no;
  if (a == Verdict::yes && b == Verdict::yes) return Verdict::yes;
  return Verdict::not_evaluated;
}

Verdict operator||(Verdict a, Verdict b) {
  if (a == Verdict::yes || b == Verdict::yes) return Verdict::yes;
  if (a == Verdict::no && b == Verdict::no) return Verdict::no;
  return Verdict::not_evaluated;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    default: return "not evaluated";
  }
}

namespace {

double binom(long long n, long long k) {
  if (k < 0 || n < k) return 0.0;
  return boost::math::binomial_coefficient<double>(static_cast<unsigned>(n), static_cast<unsigned>(k));
}

// Calls fn on every k-subset of {0..n-1} in lexicographic order until fn returns false.
// Returns false when the subset count exceeds cap (nothing enumerated).
bool for_each_subset(int n, int k, long long cap, const std::function<bool(const std::vector<int>&)>& fn) {
  if (k < 0 || k > n) return true;
  if (binom(n, k) > double(cap)) return false;
  std::vector<int> s(k);
  std::iota(s.begin(), s.end(), 0);
  while (true) {
    if (!fn(s)) return true;
    int i = k - 1;
    while (i >= 0 && s[i] == n - k + i) --i;
    if (i < 0) return true;
    ++s[i];
    for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
  }
}

template <typename S>
Mat<S> hcat(const std::vector<Mat<S>>& blocks, const std::vector<int>& which) {
  Eigen::Index cols = 0;
  for (int w : which) cols += blocks[w].cols();
  Mat<S> m(blocks[which.empty() ? 0 : which[0]].rows(), cols);
  Eigen::Index c = 0;
  for (int w : which) {
    m.middleCols(c, blocks[w].cols()) = blocks[w];
    c += blocks[w].cols();
  }
  return m;
}

template <typename S>
KRank k_rank_blocks(const std::vector<Mat<S>>& blocks, double tol, long long cap) {
  const int R = static_cast<int>(blocks.size());
  KRank res;
  long long spent = 0;
  for (int k = 1; k <= R; ++k) {
    double cnt = binom(R, k);
    if (double(spent) + cnt > double(cap)) {
      res.exact = false;
      return res;
    }
    spent += static_cast<long long>(cnt);
    bool all_ok = true;
    for_each_subset(R, k, cap, [&](const std::vector<int>& s) {
      Mat<S> m = hcat(blocks, s);
      if (m.cols() > m.rows() || numerical_rank(m, tol) < m.cols()) {
        all_ok = false;
        return false;
      }
      return true;
    });
    if (!all_ok) return res;
    res.value = k;
  }
  return res;
}

template <typename S>
bool full_column_rank(const Mat<S>& m, double tol) {
  return m.cols() <= m.rows() && numerical_rank(m, tol) == m.cols();
}

}  // namespace

template <typename S>
KRank k_rank(const Mat<S>& A, double tol, long long cap) {
  std::vector<Mat<S>> cols;
  for (Eigen::Index c = 0; c < A.cols(); ++c) cols.push_back(A.col(c));
  return k_rank_blocks(cols, tol, cap);
}

template <typename S>
KRank k_prime_rank(const std::vector<Mat<S>>& blocks, double tol, long long cap) {
  return k_rank_blocks(blocks, tol, cap);
}

template <typename S>
NecessaryChecks check_necessary(const BlockTermDecomposition<S>& d, double tol) {
  d.validate();
  NecessaryChecks n;
  const int R = d.R();
  const Eigen::Index I = d.A.rows(), J = d.B[0].rows(), K = d.C[0].rows();
  Mat<S> ve(J * K, R);
  for (int r = 0; r < R; ++r) {
    Mat<S> e = d.E(r);
    ve.col(r) = Eigen::Map<const Vec<S>>(e.data(), J * K);
  }
  n.vecE_fcr = full_column_rank(ve, tol);
  n.aB_fcr = full_column_rank(a_kron_blocks(d.A, d.B), tol);
  n.aC_fcr = full_column_rank(a_kron_blocks(d.A, d.C), tol);
  (void)I;
  return n;
}

template <typename S>
UniquenessReport check_main_theorem(const BlockTermDecomposition<S>& d, const Tensor3<S>* t, double tol) {
  d.validate();
  UniquenessReport rep;
  const int R = d.R();
  const int I = static_cast<int>(d.A.rows()), J = static_cast<int>(d.B[0].rows()), K = static_cast<int>(d.C[0].rows());
  const std::vector<int> L = d.sizes();
  const int sumL = std::accumulate(L.begin(), L.end(), 0);
  const int minL = *std::min_element(L.begin(), L.end());
  std::vector<Mat<S>> E, Et;
  for (int r = 0; r < R; ++r) {
    E.push_back(d.E(r));
    Et.push_back(E.back().transpose());
  }
  for (int r = 0; r < R; ++r)
    if (numerical_rank(E[r], tol) != L[r]) rep.notes.push_back("term " + std::to_string(r) + " has rank below its size");

  rep.necessary = check_necessary(d, tol);
  Tensor3<S> composed;
  if (!t) {
    composed = compose(d);
    t = &composed;
  }
  rep.cond_T3_rank = numerical_rank(unfold(*t, 3), tol) == K;

  // d_r = dim null of the other E's stacked vertically.
  rep.d_positive = true;
  for (int r = 0; r < R; ++r) {
    std::vector<int> others;
    for (int q = 0; q < R; ++q)
      if (q != r) others.push_back(q);
    int rk = others.empty() ? 0 : numerical_rank(Mat<S>(hcat(Et, others)), tol);
    rep.d.push_back(K - rk);
    if (K - rk < 1) rep.d_positive = false;
    rep.Q_expected += (K - rk) * (K - rk + 1) / 2;
  }

  rep.r_A = numerical_rank(d.A, tol);
  KRank ka = k_rank(d.A, tol);
  rep.k_A = ka.value;
  const int s = R - rep.r_A + 2;

  auto subset_ranks_full = [&](const std::vector<Mat<S>>& blocks) -> Verdict {
    if (s > R) return Verdict::no;
    bool ok = true;
    bool done = for_each_subset(R, s, kSubsetCap, [&](const std::vector<int>& sub) {
      int want = 0;
      for (int r : sub) want += L[r];
      if (numerical_rank(Mat<S>(hcat(blocks, sub)), tol) != want) ok = false;
      return ok;
    });
    if (!done) return Verdict::not_evaluated;
    return verdict(ok);
  };
  rep.F_rank_ok = verdict(rep.k_A >= 2) && (ka.exact ? Verdict::yes : Verdict::not_evaluated) && subset_ranks_full(E);

  if (t->I >= 2 && t->J >= 2) {
    Mat<S> q2 = build_Q2(*t);
    rep.Q2_null_dim = static_cast<int>(q2.cols()) - numerical_rank(q2, tol);
    rep.Q2_dim_ok = verdict(rep.Q2_null_dim == rep.Q_expected);
  }
  rep.assumptions = verdict(rep.cond_T3_rank && rep.d_positive) && (rep.F_rank_ok || rep.Q2_dim_ok);

  rep.a = verdict(K >= sumL - minL + 1 && rep.k_A >= 2);
  rep.b = verdict(rep.r_A == R);
  Verdict g_rank = subset_ranks_full(Et);
  if (g_rank == Verdict::not_evaluated) {
    std::vector<Mat<S>> cb(d.C.begin(), d.C.end());
    KRank kc = k_prime_rank(cb, tol);
    g_rank = kc.exact ? verdict(kc.value >= s) : Verdict::not_evaluated;
    rep.G_rank_by_surrogate = true;
  }
  rep.c = verdict(rep.k_A == rep.r_A && rep.r_A < R) && rep.F_rank_ok && g_rank;
  {
    std::vector<int> all(R);
    std::iota(all.begin(), all.end(), 0);
    rep.d_cond = verdict(numerical_rank(Mat<S>(hcat(Et, all)), tol) == sumL);
  }
  std::vector<int> Ls = L;
  std::sort(Ls.begin(), Ls.end());
  long long pairs = 0;
  for (int a = 0; a < R; ++a)
    for (int b = a + 1; b < R; ++b) pairs += static_cast<long long>(L[a]) * L[b];
  rep.e_lhs = static_cast<long long>(K) * (K + 1) / 2 - rep.Q_expected;
  rep.e_rhs = (R >= 2 ? -static_cast<long long>(Ls[0]) * Ls[1] : 0) + pairs;
  rep.e = verdict(rep.e_lhs > rep.e_rhs);

  rep.S1_A_by_evd = rep.assumptions;
  rep.S2_overall_by_evd = rep.assumptions && (rep.b || rep.c);
  rep.S3_first_fm_selection = rep.assumptions && rep.a;
  rep.S4_first_fm_unique = rep.assumptions && rep.a && rep.e;
  rep.S5_overall_unique = rep.assumptions && ((rep.a && rep.b) || (rep.a && rep.c) || rep.d_cond);

  std::vector<Mat<S>> cb(d.C.begin(), d.C.end());
  rep.r_C = numerical_rank(Mat<S>(hcat(cb, [&] {
                             std::vector<int> all(R);
                             std::iota(all.begin(), all.end(), 0);
                             return all;
                           }())),
                           tol);
  ParamCount pc = parameter_count_S(I, J, K, L);
  rep.s_count = pc.S;
  rep.ijk = pc.IJK;
  return rep;
}

template <typename S>
bool check_k_rank_conditions(const BlockTermDecomposition<S>& d, double tol) {
  d.validate();
  const int R = d.R();
  const std::vector<int> L = d.sizes();
  const int sumL = std::accumulate(L.begin(), L.end(), 0);
  const int minL = *std::min_element(L.begin(), L.end());
  std::vector<int> all(R);
  std::iota(all.begin(), all.end(), 0);
  std::vector<Mat<S>> bb(d.B.begin(), d.B.end()), cb(d.C.begin(), d.C.end());
  const int r_C = numerical_rank(Mat<S>(hcat(cb, all)), tol);
  const int r_A = numerical_rank(d.A, tol);
  KRank ka = k_rank(d.A, tol);
  KRank kb = k_prime_rank(bb, tol);
  const int s = R - r_A + 2;
  bool first = r_C >= sumL - minL + 1 && kb.value >= s && ka.value >= 2;
  if (!first) return false;
  if (r_A == R) return true;
  KRank kc = k_prime_rank(cb, tol);
  return ka.value == r_A && r_A < R && kc.value >= s;
}

ParamCount parameter_count_S(int I, int J, int K, const std::vector<int>& sizes) {
  ParamCount p;
  for (int L : sizes) {
    if (L < 1 || L > std::min(J, K)) throw ArgumentError("parameter_count_S: L_r must lie in [1, min(J,K)]");
    p.S += (I - 1) + static_cast<long long>(J + K - L) * L;
  }
  p.IJK = static_cast<long long>(I) * J * K;
  p.passes = p.S < p.IJK;
  return p;
}

const GenericBound* GenericBoundsReport::find(const std::string& name) const {
  for (const auto& b : bounds)
    if (b.name == name) return &b;
  return nullptr;
}

GenericBoundsReport generic_bounds(int I, int J, int K, std::vector<int> L) {
  if (L.empty()) throw ArgumentError("generic_bounds: no sizes");
  std::sort(L.begin(), L.end());
  const int R = static_cast<int>(L.size());
  const long long sumL = std::accumulate(L.begin(), L.end(), 0LL);
  const int LR = L[R - 1];
  const int LR1 = R >= 2 ? L[R - 2] : 0;
  const bool equal = std::all_of(L.begin(), L.end(), [&](int x) { return x == L[0]; });
  // Sum of L_m..L_R with 1-based m.
  auto tail = [&](int m) {
    m = std::max(m, 1);
    long long s = 0;
    for (int r = m; r <= R; ++r) s += L[r - 1];
    return s;
  };
  auto kappa = [&](int dim) {
    int p = 0;
    while (p < R && tail(R - p) <= dim) ++p;
    return p;
  };
  long long pairs = 0;
  for (int a = 0; a < R; ++a)
    for (int b = a + 1; b < R; ++b) pairs += static_cast<long long>(L[a]) * L[b];

  GenericBoundsReport g;
  g.kappa_B = kappa(J);
  g.kappa_C = kappa(K);
  auto add = [&](std::string name, bool applicable, bool holds, bool verify, std::string detail) {
    g.bounds.push_back({std::move(name), applicable, applicable && holds, verify, std::move(detail)});
  };
  add("row1", true, I >= 2 && J >= sumL && K >= sumL, false, "I>=2, J>=sum L, K>=sum L");
  add("row2", true, I >= R && J >= sumL && K >= LR + 1, false, "I>=R, J>=sum L, K>=L_R+1");
  add("row2_swapped", true, I >= R && K >= sumL && J >= LR + 1, false, "I>=R, J>=L_R+1, K>=sum L");
  add("row3", true, I >= R && g.kappa_B + g.kappa_C >= R + 2, false,
      "I>=R and kappa_B+kappa_C>=R+2 (kappa_B=" + std::to_string(g.kappa_B) +
          ", kappa_C=" + std::to_string(g.kappa_C) + ")");
  if (equal) {
    const int l = L[0];
    double lhs = binom(J, l + 1) * binom(K, l + 1), rhs = binom(R + l, l + 1) - R;
    add("row4", true, I >= R && lhs >= rhs, true, "I>=R, C(J,L+1)C(K,L+1) >= C(R+L,L+1)-R");
  } else {
    add("row4", false, false, true, "requires equal sizes");
  }
  {
    const int m = std::min(I, R) - 1;
    const bool kpart = K >= tail(2) + 1;
    const bool jpart = J >= tail(m) && I >= 2;
    add("row5", true, kpart && jpart, false,
        std::string("K>=L_2+...+L_R+1: ") + (kpart ? "yes" : "no") + "; J>=L_{min(I,R)-1}+...+L_R and I>=2: " +
            (jpart ? "yes" : "no"));
    const bool kpart2 = J >= tail(2) + 1;
    const bool jpart2 = K >= tail(m) && I >= 2;
    add("row5_swapped", true, kpart2 && jpart2, false, "row5 with J and K exchanged");
  }
  {
    const double lhs = binom(I, 2) * binom(J, 2);
    add("row6", true, K >= sumL && J >= LR1 + LR && lhs >= double(pairs), true,
        "K>=sum L, J>=L_{R-1}+L_R, C(I,2)C(J,2)>=sum_{r1<r2} L_r1 L_r2");
    const double lhs2 = binom(I, 2) * binom(K, 2);
    add("row6_swapped", true, J >= sumL && K >= LR1 + LR && lhs2 >= double(pairs), true,
        "row6 with J and K exchanged");
  }
  if (equal) {
    const long long l = L[0];
    add("row7", true, I >= R && R <= (J - l) * (K - l), false, "equal L, I>=R, R<=(J-L)(K-L)");
  } else {
    add("row7", false, false, false, "requires equal sizes");
  }
  add("row8", true, I >= 2 && LR1 + LR <= J && sumL <= static_cast<long long>(I - 1) * (J - 1) && sumL <= K, false,
      "I>=2, L_{R-1}+L_R<=J, sum L<=(I-1)(J-1), sum L<=K");
  add("row8_swapped", true, I >= 2 && LR1 + LR <= K && sumL <= static_cast<long long>(I - 1) * (K - 1) && sumL <= J,
      false, "row8 with J and K exchanged");
  if (equal) {
    add("kruskal_type", true, std::min(I, R) + g.kappa_B + g.kappa_C >= 2 * R + 2, false,
        "generic k_A + k'_B + k'_C >= 2R+2");
  } else {
    add("kruskal_type", false, false, false, "requires equal sizes");
  }
  {
    // Generic first-factor uniqueness; the K used is min(K, sum L).
    const long long Ke = std::min<long long>(K, sumL);
    const bool base = static_cast<long long>(I) * J >= sumL && Ke - sumL + L[0] >= 1;
    bool ineq = false;
    if (R >= 2) ineq = double(Ke) >= -0.5 - std::sqrt(0.25 + 2.0 * L[0] * L[1] / (R - 1)) + double(sumL);
    add("first_factor_generic", R >= 2, base && ineq, true,
        "IJ>=sum L>=K, d_1>=1 and K>=-1/2-sqrt(1/4+2L_1L_2/(R-1))+sum L");
  }
  return g;
}

Family287 family_287(double p1, double p2, const Family287Params& P) {
  if (P.f.size() != 8 || P.g.size() != 7 || P.h.size() != 7) throw ArgumentError("family_287: f has 8 entries, g and h have 7");
  // 1-based accessors matching the formulas.
  auto f = [&](int i) { return P.f(i - 1); };
  auto g = [&](int i) { return P.g(i - 1); };
  auto h = [&](int i) { return P.h(i - 1); };
  const double d1 = P.d1, d2 = P.d2;
  Family287 fam;
  BlockTermDecomposition<double> can;
  can.A.resize(2, 3);
  can.A << d1, 1, 0, d2, 0, 1;
  MatR I8 = MatR::Identity(8, 8), I7 = MatR::Identity(7, 7);
  MatR B(8, 9), C(7, 9);
  B << P.f, I8;
  C << I7.leftCols(5), P.g, I7.col(5), I7.col(6), P.h;
  for (int r = 0; r < 3; ++r) {
    can.B.push_back(B.middleCols(3 * r, 3));
    can.C.push_back(C.middleCols(3 * r, 3));
  }
  fam.canonical_decomposition = can;
  fam.canonical = compose(can);
  fam.A = can.A;

  const double alpha = (f(1) * g(2) - g(1) + f(2) * g(3)) * p1 + (f(1) * h(2) - h(1) + f(2) * h(3)) * p2 + 1;
  const double beta = (f(3) * g(4) - f(5) + f(4) * g(5)) * d1 * p1 + (f(3) * h(4) + f(4) * h(5)) * d1 * p2;
  const double gamma = (f(6) * g(6) + f(7) * g(7)) * d2 * p1 + (f(6) * h(6) - f(8) + f(7) * h(7)) * d2 * p2;
  const double delta = beta + alpha - gamma * alpha;
  if (alpha == 0.0 || delta == 0.0) throw ArgumentError("family_287: alpha or delta vanishes");
  const double t1 = -p1 * gamma / delta, t2 = -p2 * beta / delta;
  const double t3 = (p2 + t2) / alpha, t4 = alpha * t1 - p1;
  const double q1 = h(1) * t3 + g(1) * t1 + 1, q2 = h(1) * t2 + g(1) * t4 + 1;
  const double r1 = h(2) * t3 + g(2) * t1, r2 = h(2) * t2 + g(2) * t4;
  const double s1 = h(3) * t3 + g(3) * t1, s2 = h(3) * t2 + g(3) * t4;
  const double tt = h(4) * p2 / delta, u = h(5) * p2 / delta, v = -g(6) * p1 / delta, w = -g(7) * p1 / delta;
  fam.alpha = alpha;
  fam.delta = delta;

  MatR E1 = MatR::Zero(8, 7);
  E1.row(0) << f(1), 1, 0, 0, 0, 0, 0;
  E1.row(1) << f(2), 0, 1, 0, 0, 0, 0;
  for (int j = 3; j <= 5; ++j) E1.row(j - 1) << f(j) * q1, f(j) * r1, f(j) * s1, f(j) * tt, f(j) * u, f(j) * v, f(j) * w;
  for (int j = 6; j <= 8; ++j)
    E1.row(j - 1) << f(j) * q2, f(j) * r2, f(j) * s2, f(j) * tt * alpha, f(j) * u * alpha, f(j) * v * alpha,
        f(j) * w * alpha;
  const MatR H1 = fam.canonical.horizontal(0), H2 = fam.canonical.horizontal(1);
  fam.E = {E1, H1 - d1 * E1, H2 - d2 * E1};
  return fam;
}

TwoTermAlternatives two_term_alternatives(const std::vector<VecR>& a, const std::vector<VecR>& b, const std::vector<VecR>& c) {
  if (a.size() != 2 || b.size() != 4 || c.size() != 4) throw ArgumentError("two_term_alternatives: need 2 a, 4 b, 4 c vectors");
  auto cols = [](std::initializer_list<VecR> v) {
    MatR m(v.begin()->size(), v.size());
    Eigen::Index k = 0;
    for (const auto& x : v) m.col(k++) = x;
    return m;
  };
  auto make = [&](std::vector<VecR> as, std::vector<MatR> bs, std::vector<MatR> cs) {
    BlockTermDecomposition<double> d;
    d.A.resize(as[0].size(), as.size());
    for (std::size_t r = 0; r < as.size(); ++r) d.A.col(r) = as[r];
    d.B = std::move(bs);
    d.C = std::move(cs);
    return d;
  };
  TwoTermAlternatives ex;
  // a1 o (b1c1' + b2c2' + b3c3') + a2 o (b1c1' + b2c2' + b4c4')
  ex.decompositions.push_back(make({a[0], a[1]}, {cols({b[0], b[1], b[2]}), cols({b[0], b[1], b[3]})},
                                   {cols({c[0], c[1], c[2]}), cols({c[0], c[1], c[3]})}));
  // a1 o (b3c3' - b4c4') + (a1+a2) o (b1c1' + b2c2' + b4c4')
  ex.decompositions.push_back(make({a[0], a[0] + a[1]}, {cols({b[2], b[3]}), cols({b[0], b[1], b[3]})},
                                   {cols({c[2], VecR(-c[3])}), cols({c[0], c[1], c[3]})}));
  // (a1+a2) o (b1c1' + b2c2' + b3c3') - a2 o (b3c3' - b4c4')
  ex.decompositions.push_back(make({a[0] + a[1], VecR(-a[1])}, {cols({b[0], b[1], b[2]}), cols({b[2], b[3]})},
                                   {cols({c[0], c[1], c[2]}), cols({c[2], VecR(-c[3])})}));
  ex.T2 = compose(ex.decompositions[0]);
  return ex;
}

nlohmann::json report_to_json(const UniquenessReport& r) {
  using nlohmann::json;
  json j;
  j["necessary"] = {{"vecE_full_column_rank", r.necessary.vecE_fcr},
                    {"aB_full_column_rank", r.necessary.aB_fcr},
                    {"aC_full_column_rank", r.necessary.aC_fcr}};
  j["assumptions"] = {{"T3_rank_equals_K", r.cond_T3_rank},
                      {"d", r.d},
                      {"d_positive", r.d_positive},
                      {"F_rank", to_string(r.F_rank_ok)},
                      {"Q2_null_dim", r.Q2_null_dim},
                      {"Q_expected", r.Q_expected},
                      {"Q2_dim", to_string(r.Q2_dim_ok)},
                      {"all", to_string(r.assumptions)}};
  j["conditions"] = {{"a", to_string(r.a)},
                     {"b", to_string(r.b)},
                     {"c", to_string(r.c)},
                     {"c_G_rank_by_surrogate", r.G_rank_by_surrogate},
                     {"d", to_string(r.d_cond)},
                     {"e", to_string(r.e)},
                     {"e_lhs", r.e_lhs},
                     {"e_rhs", r.e_rhs}};
  j["statements"] = {{"S1_A_by_evd", to_string(r.S1_A_by_evd)},
                     {"S2_overall_by_evd", to_string(r.S2_overall_by_evd)},
                     {"S3_first_factor_selection", to_string(r.S3_first_fm_selection)},
                     {"S4_first_factor_unique", to_string(r.S4_first_fm_unique)},
                     {"S5_overall_unique", to_string(r.S5_overall_unique)}};
  j["r_A"] = r.r_A;
  j["k_A"] = r.k_A;
  j["r_C"] = r.r_C;
  j["S"] = r.s_count;
  j["IJK"] = r.ijk;
  j["notes"] = r.notes;
  return j;
}

nlohmann::json bounds_to_json(const GenericBoundsReport& g) {
  nlohmann::json j;
  j["kappa_B"] = g.kappa_B;
  j["kappa_C"] = g.kappa_C;
  j["bounds"] = nlohmann::json::array();
  for (const auto& b : g.bounds)
    j["bounds"].push_back({{"name", b.name},
                           {"applicable", b.applicable},
                           {"holds", b.holds},
                           {"requires_verification", b.requires_verification},
                           {"detail", b.detail}});
  return j;
}

#define BTD_INST(S)                                                                                       \
  template KRank k_rank<S>(const Mat<S>&, double, long long);                                             \
  template KRank k_prime_rank<S>(const std::vector<Mat<S>>&, double, long long);                          \
  template NecessaryChecks check_necessary<S>(const BlockTermDecomposition<S>&, double);                  \
  template UniquenessReport check_main_theorem<S>(const BlockTermDecomposition<S>&, const Tensor3<S>*,    \
                                                  double);                                                \
  template bool check_k_rank_conditions<S>(const BlockTermDecomposition<S>&, double);
BTD_INST(double)
BTD_INST(cd)
#undef BTD_INST

}  // namespace btd
