#include "btd/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "btd/linalg.hpp"

namespace btd {

template <typename S>
Mat<S> Tensor3<S>::horizontal(int i) const {
  Mat<S> h(J, K);
  for (int j = 0; j < J; ++j)
    for (int k = 0; k < K; ++k) h(j, k) = (*this)(i, j, k);
  return h;
}

template <typename S>
Mat<S> Tensor3<S>::frontal(int k) const {
  Mat<S> f(I, J);
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j) f(i, j) = (*this)(i, j, k);
  return f;
}

template <typename S>
double Tensor3<S>::norm() const {
  double s = 0;
  for (const S& v : values) s += std::norm(v);
  return std::sqrt(s);
}

template <typename S>
bool Tensor3<S>::all_finite() const {
  for (const S& v : values)
    if (!std::isfinite(std::real(v)) || !std::isfinite(std::imag(v))) return false;
  return true;
}

template <typename S>
std::vector<int> BlockTermDecomposition<S>::sizes() const {
  std::vector<int> L;
  for (const auto& b : B) L.push_back(static_cast<int>(b.cols()));
  return L;
}

template <typename S>
void BlockTermDecomposition<S>::validate() const {
  const std::size_t R = A.cols();
  if (B.size() != R || C.size() != R) throw ArgumentError("decomposition: term count differs from columns of A");
  for (std::size_t r = 0; r < R; ++r) {
    if (B[r].cols() != C[r].cols()) throw ArgumentError("decomposition: B_r and C_r column counts differ");
    if (B[r].cols() < 1) throw ArgumentError("decomposition: empty term");
    if (r > 0 && (B[r].rows() != B[0].rows() || C[r].rows() != C[0].rows()))
      throw ArgumentError("decomposition: inconsistent factor row counts");
    if (A.col(r).norm() == 0.0) throw ArgumentError("decomposition: zero column in A");
  }
}

template <typename S>
Mat<S> unfold(const Tensor3<S>& t, int mode) {
  const int I = t.I, J = t.J, K = t.K;
  Mat<S> m;
  switch (mode) {
    case 1:
      m.resize(std::size_t(J) * K, I);
      for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j)
          for (int k = 0; k < K; ++k) m(j + k * J, i) = t(i, j, k);
      break;
    case 2:
      m.resize(std::size_t(I) * K, J);
      for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j)
          for (int k = 0; k < K; ++k) m(i * K + k, j) = t(i, j, k);
      break;
    case 3:
      m.resize(std::size_t(I) * J, K);
      for (int i = 0; i < I; ++i)
        for (int j = 0; j < J; ++j)
          for (int k = 0; k < K; ++k) m(i * J + j, k) = t(i, j, k);
      break;
    default:
      throw ArgumentError("unfold: mode must be 1, 2 or 3");
  }
  return m;
}

template <typename S>
Tensor3<S> fold3(const Mat<S>& m, int I, int J) {
  if (m.rows() != Eigen::Index(I) * J) throw ArgumentError("fold3: row count is not I*J");
  Tensor3<S> t(I, J, static_cast<int>(m.cols()));
  for (int i = 0; i < I; ++i)
    for (int j = 0; j < J; ++j)
      for (int k = 0; k < t.K; ++k) t(i, j, k) = m(i * J + j, k);
  return t;
}

template <typename S>
Tensor3<S> compose(const BlockTermDecomposition<S>& d, int I, int J, int K) {
  d.validate();
  if (d.A.rows() != I) throw ArgumentError("compose: A row count differs from I");
  Tensor3<S> t(I, J, K);
  for (int r = 0; r < d.R(); ++r) {
    if (d.B[r].rows() != J || d.C[r].rows() != K) throw ArgumentError("compose: factor dimension mismatch");
    Mat<S> e = d.E(r);
    for (int i = 0; i < I; ++i) {
      S a = d.A(i, r);
      for (int j = 0; j < J; ++j)
        for (int k = 0; k < K; ++k) t(i, j, k) += a * e(j, k);
    }
  }
  return t;
}

template <typename S>
Tensor3<S> compose(const BlockTermDecomposition<S>& d) {
  if (d.B.empty()) throw ArgumentError("compose: no terms");
  return compose(d, static_cast<int>(d.A.rows()), static_cast<int>(d.B[0].rows()),
                 static_cast<int>(d.C[0].rows()));
}

template <typename S>
BlockTermDecomposition<S> random_btd(int I, int J, int K, const std::vector<int>& sizes,
                                     std::uint64_t seed) {
  if (I < 1 || J < 1 || K < 1 || sizes.empty()) throw ArgumentError("random_btd: empty dimensions");
  for (int L : sizes)
    if (L < 1 || L > std::min(J, K)) throw ArgumentError("random_btd: L_r must be in [1, min(J,K)]");
  Rng rng(seed);
  BlockTermDecomposition<S> d;
  const int R = static_cast<int>(sizes.size());
  // Draw order: A, then B_1, C_1, B_2, C_2, ...
  d.A = randn<S>(I, R, rng);
  for (int r = 0; r < R; ++r) {
    d.B.push_back(randn<S>(J, sizes[r], rng));
    d.C.push_back(randn<S>(K, sizes[r], rng));
  }
  return d;
}

template <typename S>
Tensor3<S> add_noise(const Tensor3<S>& t, const NoiseSpec& spec) {
  const double nt = t.norm();
  if (nt == 0.0) throw ArgumentError("add_noise: zero tensor");
  if (spec.exact()) return t;
  if (!std::isfinite(spec.snr_db)) throw ArgumentError("add_noise: snr must be finite or +inf");
  Rng rng(spec.seed);
  Mat<S> n = randn<S>(static_cast<Eigen::Index>(t.values.size()), 1, rng);
  const double c = nt / (n.norm() * std::pow(10.0, spec.snr_db / 20.0));
  Tensor3<S> out = t;
  for (std::size_t p = 0; p < out.values.size(); ++p) out.values[p] += S(c) * n(p, 0);
  return out;
}

template <typename S>
Compression<S> compress_third_mode(const Tensor3<S>& t, double tol) {
  Mat<S> t3 = unfold(t, 3);
  Eigen::BDCSVD<Mat<S>> svd(t3, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecR& s = svd.singularValues();
  int r = 0;
  if (s.size() && s(0) > 0)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > tol * s(0)) ++r;
  Compression<S> c;
  c.original_rank = r;
  c.t = fold3<S>(svd.matrixU().leftCols(r), t.I, t.J);
  c.mixing = s.head(r).template cast<S>().asDiagonal() * svd.matrixV().leftCols(r).adjoint();
  return c;
}

template <typename S>
Mat<S> a_kron_blocks(const Mat<S>& A, const std::vector<Mat<S>>& B) {
  Eigen::Index cols = 0;
  for (const auto& b : B) cols += b.cols();
  const Eigen::Index I = A.rows(), J = B.empty() ? 0 : B[0].rows();
  Mat<S> w(I * J, cols);
  Eigen::Index c = 0;
  for (std::size_t r = 0; r < B.size(); ++r) {
    for (Eigen::Index i = 0; i < I; ++i) w.block(i * J, c, J, B[r].cols()) = A(i, r) * B[r];
    c += B[r].cols();
  }
  return w;
}

template <typename S>
std::vector<Mat<S>> recover_third_factor(const Tensor3<S>& t, const Mat<S>& A,
                                         const std::vector<Mat<S>>& B) {
  Mat<S> w = a_kron_blocks(A, B);
  Mat<S> ct = w.completeOrthogonalDecomposition().solve(unfold(t, 3));
  std::vector<Mat<S>> C;
  Eigen::Index c = 0;
  for (const auto& b : B) {
    C.push_back(ct.middleRows(c, b.cols()).transpose());
    c += b.cols();
  }
  return C;
}

template <typename S>
Mat<S> term_matrix(const BlockTermDecomposition<S>& d) {
  const Eigen::Index I = d.A.rows();
  const Eigen::Index JK = d.B.empty() ? 0 : d.B[0].rows() * d.C[0].rows();
  Mat<S> m(I * JK, d.R());
  for (int r = 0; r < d.R(); ++r) {
    Mat<S> e = d.E(r);
    Eigen::Map<const Vec<S>> ve(e.data(), JK);
    for (Eigen::Index i = 0; i < I; ++i) m.col(r).segment(i * JK, JK) = d.A(i, r) * ve;
  }
  return m;
}

template <typename S>
MatchResult<S> match_decompositions(const BlockTermDecomposition<S>& truth,
                                    const BlockTermDecomposition<S>& est) {
  const int R = truth.R();
  if (est.R() != R) throw ArgumentError("match_decompositions: different numbers of terms");
  Mat<S> mt = term_matrix(truth), me = term_matrix(est);
  if (mt.rows() != me.rows()) throw ArgumentError("match_decompositions: different tensor dimensions");

  // Greedy assignment on absolute normalized correlation of the term vectors.
  MatR corr(R, R);
  for (int a = 0; a < R; ++a)
    for (int b = 0; b < R; ++b) {
      double den = mt.col(a).norm() * me.col(b).norm();
      corr(a, b) = den > 0 ? std::abs(mt.col(a).dot(me.col(b))) / den : 0.0;
    }
  MatchResult<S> res;
  res.perm.assign(R, -1);
  std::vector<bool> used_t(R, false), used_e(R, false);
  for (int step = 0; step < R; ++step) {
    double best = -1;
    int ba = 0, bb = 0;
    for (int a = 0; a < R; ++a)
      for (int b = 0; b < R; ++b)
        if (!used_t[a] && !used_e[b] && corr(a, b) > best) best = corr(a, b), ba = a, bb = b;
    used_t[ba] = used_e[bb] = true;
    res.perm[ba] = bb;
  }

  // The scale of a_r is fixed through E_r so that A-perturbations are not absorbed.
  Mat<S> aest(truth.A.rows(), R);
  Mat<S> mperm(mt.rows(), R);
  res.scales.resize(R);
  for (int r = 0; r < R; ++r) {
    const int e = res.perm[r];
    Mat<S> et = truth.E(r), ee = est.E(e);
    double nee = ee.squaredNorm();
    S mu = nee > 0 ? S((ee.array().conjugate() * et.array()).sum() / nee) : S(0);
    if (std::abs(mu) == 0.0) {
      double na = est.A.col(e).squaredNorm();
      mu = na > 0 ? S(1) / (est.A.col(e).dot(truth.A.col(r)) / na) : S(1);
    }
    res.scales[r] = mu;
    aest.col(r) = est.A.col(e) / mu;
    mperm.col(r) = me.col(e);
  }
  res.err_A = (truth.A - aest).norm() / truth.A.norm();
  res.err_terms = (mt - mperm).norm() / mt.norm();
  return res;
}

template <typename S>
double relative_residual(const Tensor3<S>& t, const BlockTermDecomposition<S>& d) {
  Tensor3<S> c = compose(d, t.I, t.J, t.K);
  double num = 0;
  for (std::size_t p = 0; p < c.values.size(); ++p) num += std::norm(t.values[p] - c.values[p]);
  return std::sqrt(num) / t.norm();
}

#define BTD_INST(S)                                                                           \
  template struct Tensor3<S>;                                                                 \
  template struct BlockTermDecomposition<S>;                                                  \
  template Mat<S> unfold<S>(const Tensor3<S>&, int);                                          \
  template Tensor3<S> fold3<S>(const Mat<S>&, int, int);                                      \
  template Tensor3<S> compose<S>(const BlockTermDecomposition<S>&, int, int, int);            \
  template Tensor3<S> compose<S>(const BlockTermDecomposition<S>&);                           \
  template BlockTermDecomposition<S> random_btd<S>(int, int, int, const std::vector<int>&,    \
                                                   std::uint64_t);                            \
  template Tensor3<S> add_noise<S>(const Tensor3<S>&, const NoiseSpec&);                      \
  template Compression<S> compress_third_mode<S>(const Tensor3<S>&, double);                  \
  template std::vector<Mat<S>> recover_third_factor<S>(const Tensor3<S>&, const Mat<S>&,      \
                                                       const std::vector<Mat<S>>&);           \
  template Mat<S> a_kron_blocks<S>(const Mat<S>&, const std::vector<Mat<S>>&);              \
  template Mat<S> term_matrix<S>(const BlockTermDecomposition<S>&);                           \
  template MatchResult<S> match_decompositions<S>(const BlockTermDecomposition<S>&,           \
                                                  const BlockTermDecomposition<S>&);          \
  template double relative_residual<S>(const Tensor3<S>&, const BlockTermDecomposition<S>&);
BTD_INST(double)
BTD_INST(cd)
#undef BTD_INST

}  // namespace btd
