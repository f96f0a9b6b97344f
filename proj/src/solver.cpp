#include "btd/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "btd/linalg.hpp"
#include "btd/minors.hpp"
#include "btd/uniqueness.hpp"

namespace btd {

template <typename S>
Mat<S> Phase1Result<S>::block(int r) const {
  int off = std::accumulate(d.begin(), d.begin() + r, 0);
  return N.middleCols(off, d[r]);
}

namespace {

// E ~ B C^T truncated to rank L.
template <typename S>
void factor_term(const Mat<S>& e, int L, Mat<S>& b, Mat<S>& c) {
  Eigen::BDCSVD<Mat<S>> svd(e, Eigen::ComputeThinU | Eigen::ComputeThinV);
  L = std::max(1, std::min<int>(L, static_cast<int>(svd.singularValues().size())));
  b = svd.matrixU().leftCols(L) * svd.singularValues().head(L).template cast<S>().asDiagonal();
  c = svd.matrixV().leftCols(L).conjugate();
}

template <typename S>
Mat<S> reshape(const Vec<S>& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Mat<S>>(v.data(), rows, cols);
}

// First-factor matrix: [vec(N_r^T H_1^T) ... vec(N_r^T H_I^T)] ~ u a^T.
template <typename S>
double first_factor_from_block(const Mat<S>& t3, int I, int J, const Mat<S>& Nr, Vec<S>& u, Vec<S>& a,
                               double* ratio = nullptr) {
  const Eigen::Index dr = Nr.cols();
  Mat<S> tn = t3 * Nr;  // rows i*J + j: H_i N_r
  Mat<S> w(dr * J, I);
  for (int i = 0; i < I; ++i) {
    Mat<S> hn = tn.middleRows(static_cast<Eigen::Index>(i) * J, J).transpose();  // d_r x J
    w.col(i) = Eigen::Map<const Vec<S>>(hn.data(), dr * J);
  }
  if (ratio) {
    VecR s = singular_values(w);
    *ratio = s.size() > 1 && s(0) > 0 ? s(1) / s(0) : 0.0;
  }
  return dominant_rank1(w, u, a);
}

template <typename S>
BlockTermDecomposition<S> from_terms(const Mat<S>& A, const std::vector<Mat<S>>& E, const std::vector<int>& L) {
  BlockTermDecomposition<S> d;
  d.A = A;
  for (std::size_t r = 0; r < E.size(); ++r) {
    Mat<S> b, c;
    factor_term(E[r], L[r], b, c);
    d.B.push_back(b);
    d.C.push_back(c);
  }
  return d;
}

template <typename S>
std::vector<int> ranks_of(const std::vector<Mat<S>>& E, double tol) {
  std::vector<int> L;
  for (const auto& e : E) L.push_back(std::max(1, numerical_rank(e, tol)));
  return L;
}

}  // namespace

std::vector<DCandidate> d_candidates(int R, int sum_d) {
  std::vector<DCandidate> out;
  if (R < 1 || sum_d < R) return out;
  std::vector<int> cur;
  std::function<void(int, int, int)> rec = [&](int left, int parts, int minv) {
    if (parts == 0) {
      if (left == 0) {
        int q = 0;
        for (int x : cur) q += x * (x + 1) / 2;
        out.push_back({cur, q});
      }
      return;
    }
    for (int v = minv; v * parts <= left; ++v) {
      cur.push_back(v);
      rec(left - v, parts - 1, v);
      cur.pop_back();
    }
  };
  rec(sum_d, R, 1);
  return out;
}

int q_min(int R, int sum_d) {
  auto c = d_candidates(R, sum_d);
  if (c.empty()) throw ArgumentError("q_min: no admissible d-tuple");
  int q = c[0].Q;
  for (const auto& x : c) q = std::min(q, x.Q);
  return q;
}

template <typename S>
Phase1Result<S> phase1_recover_A(const Tensor3<S>& t, const SolverOptions& opts) {
  const int I = t.I, J = t.J, K = t.K;
  Phase1Result<S> res;
  Mat<S> q2 = build_Q2(t);
  Mat<S> t3 = unfold(t, 3);
  MatR Dm = build_D(K);

  Mat<S> G;
  SJBDProblem<S> prob;
  SJBDOptions so;
  so.seed = opts.seed;
  so.omega = opts.omega;
  so.variant = opts.evd_variant;
  int sum_d = 0, R = 0;
  if (opts.mode == SolveMode::scenario2) {
    if (!opts.known_R || !opts.known_sum_L)
      throw ArgumentError("scenario 2 requires the number of terms and the sum of the sizes");
    R = *opts.known_R;
    sum_d = R * K - (R - 1) * *opts.known_sum_L;
    if (sum_d < R || sum_d > K) throw Diagnostic("scenario 2: implied sum of d_r is inconsistent with K and R");
    res.Q = q_min(R, sum_d);
    G = smallest_right_singular(q2, res.Q);
    prob.mode = SJBDMode::approximate;
    prob.hint_R = R;
    prob.hint_sum_d = sum_d;
    so.split_all = true;
  } else {
    const double tol = opts.rank_tol;
    G = null_space(q2, tol);
    res.Q = static_cast<int>(G.cols());
    prob.mode = SJBDMode::exact;
    // Scenario 1 uses the caller's tolerance for every rank decision.
    so.rank_tol = opts.mode == SolveMode::scenario1 ? tol : 1e-8;
  }
  if (res.Q < 1) throw Diagnostic("Q2 has a trivial null space");

  for (Eigen::Index q = 0; q < G.cols(); ++q) {
    Vec<S> v = Dm.template cast<S>() * G.col(q);
    prob.V.push_back(reshape<S>(v, K, K));
  }
  SJBDSolution<S> sol = solve_sjbd(prob, so);
  for (auto& s : sol.diagnostics) res.diagnostics.push_back("sjbd: " + s);

  if (opts.mode == SolveMode::scenario2) {
    // Columns of T3 N are a_r (x) (E_r n): cluster their first-mode directions.
    Mat<S> dirs(I, sol.N.cols());
    for (Eigen::Index c = 0; c < sol.N.cols(); ++c) {
      Vec<S> y = t3 * sol.N.col(c);
      Mat<S> m = Eigen::Map<const Mat<S>>(y.data(), J, I);  // column i = block i
      Vec<S> uu, vv;
      dominant_rank1<S>(m, uu, vv);
      dirs.col(c) = vv;
    }
    auto groups = cluster_directions<S>(dirs, R);
    Mat<S> Nn(K, sol.N.cols());
    Eigen::Index off = 0;
    for (const auto& g : groups) {
      for (int c : g) Nn.col(off++) = sol.N.col(c);
      res.d.push_back(static_cast<int>(g.size()));
    }
    res.N = Nn;
  } else {
    res.N = sol.N;
    res.d = sol.d;
    int need = 0;
    for (int dr : res.d) need += dr * (dr + 1) / 2;
    if (need != res.Q) {
      res.assumption_violated = true;
      res.diagnostics.push_back("dim null Q2 = " + std::to_string(res.Q) + " differs from sum C(d_r+1,2) = " +
                                std::to_string(need));
    }
  }

  const int Rd = static_cast<int>(res.d.size());
  res.A.resize(I, Rd);
  for (int r = 0; r < Rd; ++r) {
    Vec<S> u, a;
    double ratio = 0;
    first_factor_from_block<S>(t3, I, J, res.block(r), u, a, &ratio);
    if (opts.mode == SolveMode::exact && ratio > 1e-6)
      res.diagnostics.push_back("first-factor matrix for term " + std::to_string(r) + " is not rank one");
    res.A.col(r) = a;
    res.u.push_back(u);
  }
  return res;
}

template <typename S>
BlockTermDecomposition<S> phase2_case1(const Tensor3<S>& t, const Phase1Result<S>& p1) {
  const int sum_d = std::accumulate(p1.d.begin(), p1.d.end(), 0);
  if (sum_d != t.K) throw ArgumentError("case 1 requires K = sum of the sizes");
  BlockTermDecomposition<S> d;
  d.A = p1.A;
  for (std::size_t r = 0; r < p1.d.size(); ++r)
    d.B.push_back(reshape<S>(p1.u[r], p1.d[r], t.J).transpose());
  d.C = recover_third_factor(t, d.A, d.B);
  return d;
}

template <typename S>
BlockTermDecomposition<S> phase2_case2(const Tensor3<S>& t, const Mat<S>& A, const std::vector<int>& L,
                                       double tol) {
  const int R = static_cast<int>(A.cols());
  if (numerical_rank(A, 1e-8) < R) throw ArgumentError("case 2 requires A of full column rank");
  Mat<S> t1 = unfold(t, 1);
  Mat<S> ev = t1 * pinv<S>(A.transpose(), 1e-12);
  std::vector<Mat<S>> E;
  for (int r = 0; r < R; ++r) E.push_back(reshape<S>(ev.col(r), t.J, t.K));
  return from_terms<S>(A, E, L.empty() ? ranks_of(E, tol) : L);
}

std::vector<std::vector<int>> default_case3_subsets(int R, int r_A) {
  const int s = R - r_A + 2;
  if (s < 2 || s > R) throw ArgumentError("case 3 requires 2 <= r_A <= R");
  const int M = (R + s - 1) / s;
  std::vector<std::vector<int>> out;
  for (int m = 0; m < M; ++m) {
    int start = m + 1 < M ? m * s : R - s;
    std::vector<int> om(s);
    std::iota(om.begin(), om.end(), start);
    out.push_back(om);
  }
  return out;
}

template <typename S>
BlockTermDecomposition<S> gevd_two_slice_btd(const Tensor3<S>& q, int n_terms, double tol, std::uint64_t seed,
                                             double cluster_tol) {
  if (q.I != 2) throw ArgumentError("gevd_two_slice_btd: first dimension must be 2");
  const Mat<S> h1 = q.horizontal(0), h2 = q.horizontal(1);
  const Eigen::Index J = q.J, K = q.K;
  Mat<S> hb(J, 2 * K), hc(K, 2 * J);
  hb << h1, h2;
  hc << h1.transpose(), h2.transpose();
  const int rho = numerical_rank(hb, tol);
  if (rho < 1) throw Diagnostic("gevd: zero tensor");
  if (numerical_rank(hc, tol) != rho) throw Diagnostic("gevd: row and column ranks of the slices differ");
  Mat<S> ub = orth(hb, 0.0, rho), uc = orth(hc, 0.0, rho);
  Mat<S> m1 = ub.adjoint() * h1 * uc.conjugate(), m2 = ub.adjoint() * h2 * uc.conjugate();
  Rng rng(seed);
  Mat<S> mix = randn<S>(2, 2, rng);
  Mat<S> g1 = mix(0, 0) * m1 + mix(0, 1) * m2;
  Mat<S> g2 = mix(1, 0) * m1 + mix(1, 1) * m2;
  Eigen::FullPivLU<Mat<S>> lu(g1);
  if (!lu.isInvertible()) throw Diagnostic("gevd: singular pencil");
  Mat<S> Z = g2 * lu.inverse();
  EvdResult<S> ev = eigen_subspaces<S>(Z, n_terms, cluster_tol);
  Mat<S> B = ub * ev.N;
  Mat<S> bp = pinv<S>(B, 1e-12);
  Mat<S> y1 = bp * h1, y2 = bp * h2;
  BlockTermDecomposition<S> d;
  const int R = static_cast<int>(ev.d.size());
  d.A.resize(2, R);
  Eigen::Index off = 0;
  for (int r = 0; r < R; ++r) {
    const Eigen::Index L = ev.d[r];
    Mat<S> f(L * K, 2);
    Mat<S> b1 = y1.middleRows(off, L), b2 = y2.middleRows(off, L);
    f.col(0) = Eigen::Map<const Vec<S>>(b1.data(), L * K);
    f.col(1) = Eigen::Map<const Vec<S>>(b2.data(), L * K);
    Vec<S> g, a;
    dominant_rank1<S>(f, g, a);
    d.A.col(r) = a;
    d.B.push_back(B.middleCols(off, L));
    d.C.push_back(reshape<S>(g, L, K).transpose());
    off += L;
  }
  return d;
}

template <typename S>
BlockTermDecomposition<S> phase2_case3(const Tensor3<S>& t, const Mat<S>& A, int r_A,
                                       const std::vector<std::vector<int>>& subsets_in, const std::vector<int>& L,
                                       double tol, std::uint64_t seed, Case3Info* info) {
  const int R = static_cast<int>(A.cols());
  const auto subsets = subsets_in.empty() ? default_case3_subsets(R, r_A) : subsets_in;
  std::vector<bool> covered(R, false);
  for (const auto& om : subsets)
    for (int r : om) {
      if (r < 0 || r >= R) throw ArgumentError("case 3: subset index out of range");
      covered[r] = true;
    }
  if (std::find(covered.begin(), covered.end(), false) != covered.end())
    throw ArgumentError("case 3: subsets do not cover all terms");

  Mat<S> t1 = unfold(t, 1);
  Mat<S> ua = orth(A, 0.0, r_A);
  std::vector<Mat<S>> Ehat(R);
  std::vector<bool> have(R, false);
  if (info) info->subsets = subsets;
  for (std::size_t m = 0; m < subsets.size(); ++m) {
    const auto& om = subsets[m];
    std::vector<int> ex;
    for (int r = 0; r < R; ++r)
      if (std::find(om.begin(), om.end(), r) == om.end()) ex.push_back(r);
    Mat<S> y;
    if (ex.empty()) {
      y = Mat<S>::Identity(r_A, r_A);
    } else {
      Mat<S> aex(A.rows(), ex.size());
      for (std::size_t p = 0; p < ex.size(); ++p) aex.col(p) = A.col(ex[p]);
      y = null_space<S>(aex.transpose() * ua, 1e-8);
    }
    if (y.cols() < 2) throw Diagnostic("case 3: fewer than two admissible mixing vectors for subset " + std::to_string(m));
    Mat<S> h = ua * y.leftCols(2);  // I x 2
    Mat<S> qm = t1 * h;             // JK x 2
    Tensor3<S> q(2, t.J, t.K);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < t.J; ++j)
        for (int k = 0; k < t.K; ++k) q(i, j, k) = qm(j + k * t.J, i);
    if (info) {
      Mat<S> hb(t.J, 2 * t.K);
      hb << q.horizontal(0), q.horizontal(1);
      info->subset_ranks.push_back(numerical_rank(hb, tol));
    }
    BlockTermDecomposition<S> sub;
    try {
      sub = gevd_two_slice_btd(q, static_cast<int>(om.size()), tol, seed + m);
    } catch (const Diagnostic& e) {
      throw Diagnostic("case 3: sub-decomposition failed for subset " + std::to_string(m) + ": " + e.what());
    }
    // Identify terms through their mixed first-factor vectors h^T a_r.
    Mat<S> expected = h.transpose() * A;
    std::vector<bool> used(sub.R(), false);
    for (int r : om) {
      double best = -1;
      int bi = -1;
      for (int s = 0; s < sub.R(); ++s) {
        if (used[s]) continue;
        double c = std::abs(expected.col(r).dot(sub.A.col(s))) /
                   std::max(expected.col(r).norm() * sub.A.col(s).norm(), 1e-300);
        if (c > best) best = c, bi = s;
      }
      if (bi < 0) throw Diagnostic("case 3: could not match terms of subset " + std::to_string(m));
      used[bi] = true;
      if (!have[r]) {
        Ehat[r] = sub.E(bi);
        have[r] = true;
      }
    }
  }

  // Global scales: sum_r x_r a_r (x) vec(E^_r) = vec(T1).
  const Eigen::Index JK = static_cast<Eigen::Index>(t.J) * t.K;
  Mat<S> sys(JK * A.rows(), R);
  for (int r = 0; r < R; ++r)
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      sys.col(r).segment(i * JK, JK) = A(i, r) * Eigen::Map<const Vec<S>>(Ehat[r].data(), JK);
  Vec<S> rhs = Eigen::Map<const Vec<S>>(t1.data(), t1.size());
  Vec<S> x = sys.completeOrthogonalDecomposition().solve(rhs);
  std::vector<Mat<S>> E;
  for (int r = 0; r < R; ++r) E.push_back(x(r) * Ehat[r]);
  return from_terms<S>(A, E, L.empty() ? ranks_of(E, tol) : L);
}

std::vector<int> estimate_L_from_d(const std::vector<int>& d, int K, int R) {
  if (R != static_cast<int>(d.size())) throw ArgumentError("estimate_L_from_d: R differs from the length of d");
  const int sum_d = std::accumulate(d.begin(), d.end(), 0);
  double shift = 0;
  if (K != sum_d) {
    if (R < 2) throw Diagnostic("estimate_L_from_d: sizes are not determined by d for a single term");
    shift = double(K - sum_d) / double(R - 1);
  }
  if (std::abs(shift - std::round(shift)) > 0.25)
    throw Diagnostic("estimate_L_from_d: non-integral size estimate");
  std::vector<int> L;
  for (int x : d) {
    int l = x + static_cast<int>(std::lround(shift));
    if (l < 1) throw Diagnostic("estimate_L_from_d: non-positive size estimate");
    L.push_back(l);
  }
  return L;
}

std::vector<int> estimate_L_from_rank_system(const std::vector<std::pair<std::vector<int>, int>>& subset_ranks,
                                             int R) {
  const Eigen::Index M = subset_ranks.size();
  MatR inc = MatR::Zero(M, R);
  VecR b(M);
  for (Eigen::Index m = 0; m < M; ++m) {
    for (int r : subset_ranks[m].first) {
      if (r < 0 || r >= R) throw ArgumentError("rank system: index out of range");
      inc(m, r) = 1.0;
    }
    b(m) = subset_ranks[m].second;
  }
  if (numerical_rank<double>(inc, 1e-10) < R) throw Diagnostic("rank system: incidence matrix is rank deficient");
  VecR x = inc.colPivHouseholderQr().solve(b);
  std::vector<int> L;
  for (int r = 0; r < R; ++r) {
    if (std::abs(x(r) - std::round(x(r))) > 0.25) throw Diagnostic("rank system: non-integral size estimate");
    int l = static_cast<int>(std::lround(x(r)));
    if (l < 1) throw Diagnostic("rank system: non-positive size estimate");
    L.push_back(l);
  }
  return L;
}

template <typename S>
SolveReport<S> decompose(const Tensor3<S>& t_in, const SolverOptions& opts) {
  SolveReport<S> rep;
  if (!t_in.all_finite()) throw ArgumentError("decompose: tensor has non-finite entries");
  if (t_in.norm() == 0.0) throw ArgumentError("decompose: zero tensor");
  const bool noisy = opts.mode != SolveMode::exact;
  const double dtol = noisy ? std::max(opts.rank_tol, 1e-6) : 1e-8;

  Tensor3<S> t = t_in;
  Mat<S> mixing;
  if (opts.mode == SolveMode::exact) {
    const int r3 = numerical_rank(unfold(t_in, 3), opts.rank_tol);
    if (r3 < t_in.K) {
      Compression<S> c = compress_third_mode(t_in, opts.rank_tol);
      t = c.t;
      mixing = c.mixing;
      rep.compressed = true;
    }
  }
  rep.K_used = t.K;

  Phase1Result<S> p1 = phase1_recover_A(t, opts);
  rep.Q = p1.Q;
  rep.detected_d = p1.d;
  rep.R = static_cast<int>(p1.d.size());
  rep.diagnostics = p1.diagnostics;
  if (p1.assumption_violated) rep.ok = false;
  const int R = rep.R;
  const int sum_d = std::accumulate(p1.d.begin(), p1.d.end(), 0);

  std::vector<int> Lnoisy;
  if (noisy) {
    try {
      Lnoisy = estimate_L_from_d(p1.d, t.K, R);
    } catch (const Diagnostic& e) {
      rep.diagnostics.push_back(e.what());
    }
  }

  int chosen = static_cast<int>(opts.case_hint);
  const int r_A = numerical_rank(p1.A, dtol);
  if (chosen == 0) {
    std::vector<std::string> failed;
    if (sum_d == t.K)
      chosen = 1;
    else
      failed.push_back("case 1: K != sum d_r");
    if (!chosen) {
      if (R <= t.I && r_A == R)
        chosen = 2;
      else
        failed.push_back("case 2: A not of full column rank");
    }
    if (!chosen) {
      KRank ka = k_rank(p1.A, dtol);
      if (ka.exact && ka.value == r_A && r_A < R && r_A >= 2)
        chosen = 3;
      else
        failed.push_back("case 3: k_A = r_A < R fails");
    }
    if (!chosen) {
      std::string msg = "no case applicable:";
      for (auto& f : failed) msg += " [" + f + "]";
      throw Diagnostic(msg);
    }
  }
  rep.case_used = chosen;

  BlockTermDecomposition<S> dec;
  if (chosen == 1) {
    dec = phase2_case1(t, p1);
  } else if (chosen == 2) {
    dec = phase2_case2(t, p1.A, Lnoisy, opts.rank_tol);
  } else {
    Case3Info info;
    dec = phase2_case3(t, p1.A, r_A, opts.case3_subsets, Lnoisy, noisy ? dtol : opts.rank_tol, opts.seed, &info);
    std::vector<std::pair<std::vector<int>, int>> sr;
    for (std::size_t m = 0; m < info.subsets.size(); ++m) sr.emplace_back(info.subsets[m], info.subset_ranks[m]);
    try {
      auto Lrs = estimate_L_from_rank_system(sr, R);
      if (Lrs != dec.sizes()) rep.diagnostics.push_back("rank-system sizes differ from term ranks");
    } catch (const Diagnostic&) {
      // too few subsets to determine the sizes this way; term ranks are used
    }
  }
  if (rep.compressed)
    for (auto& c : dec.C) c = mixing.transpose() * c;
  rep.decomposition = dec;
  rep.detected_L = dec.sizes();
  rep.residual = relative_residual(t_in, dec);
  if (!noisy && rep.residual > 1e-6) {
    rep.ok = false;
    rep.diagnostics.push_back("residual too large for exact data");
  }
  return rep;
}

#define BTD_INST(S)                                                                                        \
  template struct Phase1Result<S>;                                                                         \
  template Phase1Result<S> phase1_recover_A<S>(const Tensor3<S>&, const SolverOptions&);                   \
  template BlockTermDecomposition<S> phase2_case1<S>(const Tensor3<S>&, const Phase1Result<S>&);           \
  template BlockTermDecomposition<S> phase2_case2<S>(const Tensor3<S>&, const Mat<S>&,                     \
                                                     const std::vector<int>&, double);                     \
  template BlockTermDecomposition<S> phase2_case3<S>(const Tensor3<S>&, const Mat<S>&, int,                \
                                                     const std::vector<std::vector<int>>&,                 \
                                                     const std::vector<int>&, double, std::uint64_t,       \
                                                     Case3Info*);                                          \
  template BlockTermDecomposition<S> gevd_two_slice_btd<S>(const Tensor3<S>&, int, double, std::uint64_t, \
                                                           double);                                        \
  template SolveReport<S> decompose<S>(const Tensor3<S>&, const SolverOptions&);
BTD_INST(double)
BTD_INST(cd)
#undef BTD_INST

}  // namespace btd
