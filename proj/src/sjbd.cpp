#include "btd/sjbd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "btd/linalg.hpp"

namespace btd {

template <typename S>
Mat<S> SJBDSolution<S>::block(int r) const {
  int off = std::accumulate(d.begin(), d.begin() + r, 0);
  return N.middleCols(off, d[r]);
}

template <typename S>
Mat<S> build_commutant_matrix(const std::vector<Mat<S>>& V) {
  if (V.empty()) throw ArgumentError("commutant: no matrices");
  const Eigen::Index K = V[0].rows();
  const Eigen::Index K2 = K * K;
  Mat<S> M = Mat<S>::Zero(K2 * V.size(), K2);
  // Row (a + bK) of block q encodes entry (a,b) of U V_q - V_q U^T; column x + yK is U_xy.
  for (std::size_t q = 0; q < V.size(); ++q) {
    const Mat<S>& v = V[q];
    if (v.rows() != K || v.cols() != K) throw ArgumentError("commutant: matrices must be K x K");
    for (Eigen::Index b = 0; b < K; ++b)
      for (Eigen::Index a = 0; a < K; ++a) {
        const Eigen::Index row = q * K2 + a + b * K;
        for (Eigen::Index c = 0; c < K; ++c) {
          M(row, a + c * K) += v(c, b);
          M(row, b + c * K) -= v(a, c);
        }
      }
  }
  return M;
}

template <typename S>
CommutantBasis<S> commutant_basis(const SJBDProblem<S>& p, std::optional<int> r_target, double tol) {
  Mat<S> M = build_commutant_matrix(p.V);
  const Eigen::Index K = p.V[0].rows();
  Mat<S> ns;
  if (p.mode == SJBDMode::exact) {
    ns = null_space(M, tol);
  } else {
    if (!r_target) throw ArgumentError("commutant_basis: approximate mode requires r_target");
    ns = smallest_right_singular(M, *r_target);
  }
  CommutantBasis<S> cb;
  cb.R = static_cast<int>(ns.cols());
  for (Eigen::Index r = 0; r < ns.cols(); ++r)
    cb.U.push_back(Eigen::Map<const Mat<S>>(ns.col(r).data(), K, K));
  return cb;
}

std::vector<std::vector<int>> agglomerate(const MatR& dist, Linkage link, int n_clusters,
                                          double threshold) {
  const int n = static_cast<int>(dist.rows());
  std::vector<std::vector<int>> cl(n);
  for (int i = 0; i < n; ++i) cl[i] = {i};
  auto linkage = [&](const std::vector<int>& x, const std::vector<int>& y) {
    double acc = link == Linkage::single ? std::numeric_limits<double>::infinity() : 0.0;
    for (int a : x)
      for (int b : y) {
        if (link == Linkage::single)
          acc = std::min(acc, dist(a, b));
        else
          acc += dist(a, b);
      }
    return link == Linkage::single ? acc : acc / double(x.size() * y.size());
  };
  while (static_cast<int>(cl.size()) > std::max(n_clusters, 1)) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i < cl.size(); ++i)
      for (std::size_t j = i + 1; j < cl.size(); ++j) {
        double l = linkage(cl[i], cl[j]);
        if (l < best) best = l, bi = i, bj = j;
      }
    if (n_clusters <= 0 && best > threshold) break;
    cl[bi].insert(cl[bi].end(), cl[bj].begin(), cl[bj].end());
    std::sort(cl[bi].begin(), cl[bi].end());
    cl.erase(cl.begin() + bj);
  }
  std::sort(cl.begin(), cl.end());
  return cl;
}

template <typename S>
std::vector<std::vector<int>> cluster_directions(const Mat<S>& X, int n_clusters) {
  const Eigen::Index n = X.cols();
  Mat<S> u = X;
  for (Eigen::Index c = 0; c < n; ++c) {
    double nc = u.col(c).norm();
    if (nc > 0) u.col(c) /= nc;
  }
  MatR dist(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b) dist(a, b) = 1.0 - std::min(1.0, std::abs(u.col(a).dot(u.col(b))));
  return agglomerate(dist, Linkage::average, n_clusters);
}

template <typename S>
EvdResult<S> eigen_subspaces(const Mat<S>& Z, int n_clusters, double cluster_tol) {
  const Eigen::Index K = Z.rows();
  MatC zc = Z.template cast<cd>();
  Eigen::ComplexEigenSolver<MatC> es(zc, false);
  const VecC lam = es.eigenvalues();
  double scale = lam.cwiseAbs().maxCoeff();
  if (scale == 0.0) scale = 1.0;
  MatR dist(K, K);
  for (Eigen::Index a = 0; a < K; ++a)
    for (Eigen::Index b = 0; b < K; ++b) dist(a, b) = std::abs(lam(a) - lam(b));
  auto groups = n_clusters > 0 ? agglomerate(dist, Linkage::single, n_clusters)
                               : agglomerate(dist, Linkage::single, 0, cluster_tol * scale);

  EvdResult<S> res;
  std::vector<cd> means;
  for (const auto& g : groups) {
    cd m = 0;
    for (int i : g) m += lam(i);
    means.push_back(m / double(g.size()));
  }
  std::vector<Mat<S>> blocks(groups.size());
  std::vector<bool> done(groups.size(), false);
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (done[c]) continue;
    const int dc = static_cast<int>(groups[c].size());
    const cd mu = means[c];
    auto null_of = [&](const auto& shifted, auto& out, double& sep) {
      using M = std::decay_t<decltype(shifted)>;
      Eigen::BDCSVD<M> svd(shifted, Eigen::ComputeFullV);
      const VecR& s = svd.singularValues();
      out = svd.matrixV().rightCols(dc);
      const double kept = s(K - dc);
      const double next = K - dc - 1 >= 0 ? s(K - dc - 1) : std::numeric_limits<double>::infinity();
      sep = next > 0 ? kept / next : 1.0;
    };
    double sep = 0;
    if constexpr (is_complex_v<S>) {
      Mat<S> out;
      null_of(Mat<S>(Z - mu * Mat<S>::Identity(K, K)), out, sep);
      blocks[c] = out;
    } else {
      const bool self_conj = std::abs(mu.imag()) <= 1e-12 * scale;
      if (self_conj) {
        MatR out;
        null_of(MatR(Z - mu.real() * MatR::Identity(K, K)), out, sep);
        blocks[c] = out;
      } else {
        // Conjugate pair of clusters: real and imaginary parts of one complex basis.
        MatC out;
        null_of(MatC(zc - mu * MatC::Identity(K, K)), out, sep);
        std::size_t partner = groups.size();
        for (std::size_t c2 = c + 1; c2 < groups.size(); ++c2)
          if (!done[c2] && static_cast<int>(groups[c2].size()) == dc &&
              std::abs(means[c2] - std::conj(mu)) <= 1e-6 * scale + 1e-3 * std::abs(mu.imag())) {
            partner = c2;
            break;
          }
        blocks[c] = out.real();
        if (partner < groups.size()) {
          blocks[partner] = out.imag();
          done[partner] = true;
        } else {
          res.status += "unpaired complex eigenvalue cluster; ";
        }
      }
    }
    if (sep > 1e-2) {
      res.ok = false;
      res.status += "eigenvalue cluster " + std::to_string(c) + " poorly separated; ";
    }
    done[c] = true;
  }
  Eigen::Index total = 0;
  for (const auto& b : blocks) total += b.cols();
  res.N.resize(K, total);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    res.N.middleCols(off, b.cols()) = b;
    res.d.push_back(static_cast<int>(b.cols()));
    off += b.cols();
  }
  return res;
}

template <typename S>
EvdResult<S> simultaneous_evd_single(const std::vector<Mat<S>>& U, std::uint64_t seed, int n_clusters,
                                     double cluster_tol) {
  if (U.empty()) throw ArgumentError("simultaneous_evd_single: empty basis");
  Rng rng(seed);
  Mat<S> mu = randn<S>(static_cast<Eigen::Index>(U.size()), 1, rng);
  Mat<S> Z = Mat<S>::Zero(U[0].rows(), U[0].cols());
  for (std::size_t r = 0; r < U.size(); ++r) Z += mu(r, 0) * U[r];
  return eigen_subspaces(Z, n_clusters, cluster_tol);
}

namespace {

// Columns b_k (x) c_k.
template <typename S>
Mat<S> khatri_rao(const Mat<S>& b, const Mat<S>& c) {
  Mat<S> out(b.rows() * c.rows(), b.cols());
  for (Eigen::Index k = 0; k < b.cols(); ++k)
    for (Eigen::Index i = 0; i < b.rows(); ++i) out.col(k).segment(i * c.rows(), c.rows()) = b(i, k) * c.col(k);
  return out;
}

template <typename S>
Mat<S> ls_solve(const Mat<S>& a, const Mat<S>& rhs) {
  return a.completeOrthogonalDecomposition().solve(rhs);
}

}  // namespace

template <typename S>
EvdResult<S> simultaneous_evd_cpd(const std::vector<Mat<S>>& U, double omega, std::uint64_t seed,
                                  int n_clusters, int max_iter, double als_tol) {
  if (U.empty()) throw ArgumentError("simultaneous_evd_cpd: empty basis");
  const Eigen::Index K = U[0].rows();
  const Eigen::Index K2 = K * K;
  const int Rt = static_cast<int>(U.size());

  // Basis of span(U) with the identity direction split off and re-added as omega * I.
  Mat<S> X(K2, Rt);
  for (int r = 0; r < Rt; ++r) X.col(r) = Eigen::Map<const Vec<S>>(U[r].data(), K2);
  Mat<S> qx = orth(X, 0.0, Rt);
  Vec<S> e = Vec<S>::Zero(K2);
  for (Eigen::Index k = 0; k < K; ++k) e(k + k * K) = S(1.0 / std::sqrt(double(K)));
  Mat<S> y = qx - e * (e.adjoint() * qx);
  Mat<S> qy = Rt > 1 ? orth(y, 0.0, Rt - 1) : Mat<S>(K2, 0);
  std::vector<Mat<S>> slices;
  for (Eigen::Index r = 0; r < qy.cols(); ++r) slices.push_back(Eigen::Map<const Mat<S>>(qy.col(r).data(), K, K));
  slices.push_back(S(omega) * Mat<S>::Identity(K, K));
  const int Rs = static_cast<int>(slices.size());

  // Initialization from one generic combination.
  EvdResult<S> init = simultaneous_evd_single(U, seed, n_clusters);
  Mat<S> C = init.N;
  if (C.cols() != K) throw Diagnostic("simultaneous_evd_cpd: initialization did not return K eigenvectors");
  Mat<S> B = C.inverse().transpose();
  Mat<S> Af(Rs, K);
  Mat<S> Cinv = C.inverse();
  for (int r = 0; r < Rs; ++r) Af.row(r) = (Cinv * slices[r] * C).diagonal().transpose();

  Mat<S> Uvec(K2, Rs), Uh(K, K * Rs), Uht(K, K * Rs);
  for (int r = 0; r < Rs; ++r) {
    Uvec.col(r) = Eigen::Map<const Vec<S>>(slices[r].data(), K2);
    Uh.middleCols(r * K, K) = slices[r];
    Uht.middleCols(r * K, K) = slices[r].transpose();
  }
  double norm_u = Uvec.norm();
  double prev = std::numeric_limits<double>::infinity();
  EvdResult<S> res;
  int it = 0;
  for (; it < max_iter; ++it) {
    // U_r = C diag(Af_r) B^T; vec(U_r) = (B kr C) Af_r^T.
    Af = ls_solve<S>(khatri_rao<S>(B, C), Uvec).transpose();
    Mat<S> G(K * Rs, K);  // stacked (diag(Af_r) B^T)^T = B diag(Af_r)
    for (int r = 0; r < Rs; ++r) G.middleRows(r * K, K) = B * Af.row(r).transpose().asDiagonal();
    C = ls_solve<S>(G, Mat<S>(Uh.transpose())).transpose();
    for (int r = 0; r < Rs; ++r) G.middleRows(r * K, K) = C * Af.row(r).transpose().asDiagonal();
    B = ls_solve<S>(G, Mat<S>(Uht.transpose())).transpose();
    double err = (Uvec - khatri_rao<S>(B, C) * Af.transpose()).norm() / norm_u;
    if (std::abs(prev - err) <= als_tol * std::max(prev, 1e-300) || err < 1e-15) {
      prev = err;
      break;
    }
    prev = err;
  }
  if (it >= max_iter) {
    res.ok = false;
    res.status = "ALS reached the iteration limit; best iterate returned";
  }

  auto groups = cluster_directions<S>(Af, n_clusters);
  res.N.resize(K, K);
  Eigen::Index off = 0;
  for (const auto& g : groups) {
    for (int k : g) {
      res.N.col(off++) = C.col(k).normalized();
      res.perm.push_back(k);
    }
    res.d.push_back(static_cast<int>(g.size()));
  }
  return res;
}

template <typename S>
std::vector<Mat<S>> recover_block_coefficients(const std::vector<Mat<S>>& V, const Mat<S>& N,
                                               const std::vector<int>& d) {
  const Eigen::Index K = N.rows();
  Eigen::Index nunk = 0;
  for (int dr : d) nunk += dr * (dr + 1) / 2;
  Mat<S> X(K * K, nunk);
  std::vector<std::tuple<int, int>> where;  // global (row, col) of each unknown inside D
  Eigen::Index col = 0, off = 0;
  for (int dr : d) {
    for (int b = 0; b < dr; ++b)
      for (int a = 0; a <= b; ++a) {
        Mat<S> m = N.col(off + a) * N.col(off + b).transpose();
        if (a != b) m += N.col(off + b) * N.col(off + a).transpose();
        X.col(col++) = Eigen::Map<Vec<S>>(m.data(), K * K);
        where.emplace_back(static_cast<int>(off + a), static_cast<int>(off + b));
      }
    off += dr;
  }
  Mat<S> rhs(K * K, V.size());
  for (std::size_t q = 0; q < V.size(); ++q) rhs.col(q) = Eigen::Map<const Vec<S>>(V[q].data(), K * K);
  Mat<S> coef = X.colPivHouseholderQr().solve(rhs);
  std::vector<Mat<S>> D;
  for (std::size_t q = 0; q < V.size(); ++q) {
    Mat<S> dq = Mat<S>::Zero(off, off);
    for (Eigen::Index u = 0; u < nunk; ++u) {
      auto [a, b] = where[u];
      dq(a, b) = dq(b, a) = coef(u, q);
    }
    D.push_back(dq);
  }
  return D;
}

template <typename S>
SJBDSolution<S> solve_sjbd(const SJBDProblem<S>& p, const SJBDOptions& opts) {
  if (p.V.empty()) throw ArgumentError("solve_sjbd: no matrices");
  const Eigen::Index K = p.V[0].rows();
  SJBDSolution<S> sol;
  std::vector<Mat<S>> V;
  for (const auto& v : p.V) {
    if (v.rows() != K || v.cols() != K) throw ArgumentError("solve_sjbd: matrices must be K x K");
    if (p.mode == SJBDMode::exact && (v - v.transpose()).norm() > 1e-8 * std::max(v.norm(), 1e-300))
      sol.diagnostics.push_back("input matrix not symmetric; symmetrized");
    V.push_back((v + v.transpose()) / S(2.0));
  }

  // Restrict to the joint column space so that N is square in the reduced problem.
  Mat<S> stacked(K, K * V.size());
  for (std::size_t q = 0; q < V.size(); ++q) stacked.middleCols(q * K, K) = V[q];
  int rho;
  if (p.mode == SJBDMode::exact)
    rho = numerical_rank(stacked, opts.rank_tol);
  else
    rho = p.hint_sum_d.value_or(static_cast<int>(K));
  if (rho < 1 || rho > K) throw Diagnostic("solve_sjbd: invalid joint column-space dimension");
  Mat<S> W = orth(stacked, 0.0, rho);
  std::vector<Mat<S>> Vr;
  for (const auto& v : V) Vr.push_back(W.adjoint() * v * W.conjugate());

  SJBDProblem<S> reduced{Vr, p.mode, p.hint_R, p.hint_sum_d};
  CommutantBasis<S> cb = commutant_basis(reduced, p.mode == SJBDMode::exact ? std::nullopt : p.hint_R,
                                         opts.rank_tol);
  sol.R = cb.R;
  if (cb.R < 1) throw Diagnostic("solve_sjbd: empty commutant");
  const int n_clusters = opts.split_all ? rho : cb.R;

  EvdResult<S> ev = opts.variant == EvdVariant::single
                        ? simultaneous_evd_single(cb.U, opts.seed, n_clusters)
                        : simultaneous_evd_cpd(cb.U, opts.omega, opts.seed, n_clusters, opts.max_iter,
                                               opts.als_tol);
  if (!ev.ok) sol.diagnostics.push_back(ev.status);
  sol.N = W * ev.N;
  sol.d = ev.d;
  sol.D = recover_block_coefficients(V, sol.N, sol.d);

  int qneed = 0, dmin = std::numeric_limits<int>::max();
  for (int dr : sol.d) qneed += dr * (dr + 1) / 2, dmin = std::min(dmin, dr);
  if (static_cast<int>(V.size()) < qneed || (dmin >= 2 && V.size() < 3)) {
    sol.no_guarantee = true;
    sol.diagnostics.push_back("fewer matrices than the number of free block coefficients; uniqueness not guaranteed");
  }
  if (p.mode == SJBDMode::exact && numerical_rank(sol.N, 1e-8) < sol.N.cols())
    sol.diagnostics.push_back("N is numerically rank deficient");
  return sol;
}

#define BTD_INST(S)                                                                                 \
  template struct SJBDSolution<S>;                                                                  \
  template Mat<S> build_commutant_matrix<S>(const std::vector<Mat<S>>&);                            \
  template CommutantBasis<S> commutant_basis<S>(const SJBDProblem<S>&, std::optional<int>, double); \
  template std::vector<std::vector<int>> cluster_directions<S>(const Mat<S>&, int);                 \
  template EvdResult<S> eigen_subspaces<S>(const Mat<S>&, int, double);                             \
  template EvdResult<S> simultaneous_evd_single<S>(const std::vector<Mat<S>>&, std::uint64_t, int,  \
                                                   double);                                         \
  template EvdResult<S> simultaneous_evd_cpd<S>(const std::vector<Mat<S>>&, double, std::uint64_t,  \
                                                int, int, double);                                  \
  template std::vector<Mat<S>> recover_block_coefficients<S>(const std::vector<Mat<S>>&,            \
                                                             const Mat<S>&, const std::vector<int>&); \
  template SJBDSolution<S> solve_sjbd<S>(const SJBDProblem<S>&, const SJBDOptions&);
BTD_INST(double)
BTD_INST(cd)
#undef BTD_INST

}  // namespace btd
