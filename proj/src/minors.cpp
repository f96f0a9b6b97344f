#include "btd/minors.hpp"

#include "btd/linalg.hpp"

namespace btd {

namespace idx {
std::vector<std::pair<int, int>> wedge_pairs(int n) {
  std::vector<std::pair<int, int>> p;
  p.reserve(num_wedge(n));
  for (int b = 1; b < n; ++b)
    for (int a = 0; a < b; ++a) p.emplace_back(a, b);
  return p;
}
}  // namespace idx

MatR build_PK(int k) {
  if (k < 1) throw ArgumentError("build_PK: k must be positive");
  MatR p = MatR::Zero(static_cast<Eigen::Index>(k) * k, idx::num_sym(k));
  for (int k1 = 0; k1 < k; ++k1)
    for (int k2 = 0; k2 < k; ++k2) p(k1 * k + k2, idx::sym(std::min(k1, k2), std::max(k1, k2))) = 1.0;
  return p;
}

MatR build_D(int k) {
  MatR d = build_PK(k);
  for (int k1 = 0; k1 < k; ++k1)
    for (int k2 = 0; k2 < k; ++k2)
      if (k1 != k2) d(k1 * k + k2, idx::sym(std::min(k1, k2), std::max(k1, k2))) = 0.5;
  return d;
}

template <typename S>
MinorMatrixSet<S> build_minor_set(const Tensor3<S>& t, bool with_R2) {
  MinorMatrixSet<S> m;
  m.Q2 = build_Q2(t);
  if (with_R2) m.R2 = build_R2(t);
  m.PK = build_PK(t.K);
  m.D = build_D(t.K);
  return m;
}

template <typename S>
Rank1Check rank1_membership(const Tensor3<S>& t, const Vec<S>& f, double tol) {
  if (f.size() != t.K) throw ArgumentError("rank1_membership: f must have K entries");
  Rank1Check res{};
  Mat<S> t3 = unfold(t, 3);
  Vec<S> mf = t3 * f;  // vec of the I x J combination, row-major (i*J+j)
  Mat<S> m = Eigen::Map<const Mat<S>>(mf.data(), t.J, t.I).transpose();
  const double scale = mf.squaredNorm();
  if (scale == 0.0) {
    res.direct = res.via_R2 = true;
    return res;
  }
  VecR s = singular_values(m);
  res.direct_ratio = s.size() > 1 ? s(1) / s(0) : 0.0;
  res.direct = res.direct_ratio <= tol;

  // R2 (f (x) f) is twice the vector of 2x2 minors of the slice combination.
  Mat<S> r2 = build_R2(t);
  Vec<S> ff(static_cast<Eigen::Index>(t.K) * t.K);
  for (int k2 = 0; k2 < t.K; ++k2)
    for (int k1 = 0; k1 < t.K; ++k1) ff(k2 * t.K + k1) = f(k1) * f(k2);
  Vec<S> minors = r2 * ff / S(2.0);
  // ||C2(M)||_F / ||M||_F^2 is comparable to sigma_2 / sigma_1 near rank one.
  res.r2_ratio = minors.norm() / scale;
  res.via_R2 = res.r2_ratio <= tol;
  return res;
}

template <typename S>
Vec<S> wedge(const Vec<S>& x, const Vec<S>& y) {
  if (x.size() != y.size()) throw ArgumentError("wedge: length mismatch");
  const int n = static_cast<int>(x.size());
  Vec<S> w(idx::num_wedge(n));
  for (int b = 1; b < n; ++b)
    for (int a = 0; a < b; ++a) w(idx::wedge(a, b)) = x(a) * y(b) - x(b) * y(a);
  return w;
}

template <typename S>
Vec<S> symprod(const Vec<S>& x, const Vec<S>& y) {
  if (x.size() != y.size()) throw ArgumentError("symprod: length mismatch");
  const int n = static_cast<int>(x.size());
  Vec<S> w(idx::num_sym(n));
  for (int b = 0; b < n; ++b)
    for (int a = 0; a <= b; ++a) w(idx::sym(a, b)) = x(a) * y(b) + x(b) * y(a);
  return w;
}

template <typename S>
Mat<S> wedge_block(const Mat<S>& bi, const Mat<S>& bj) {
  if (bi.rows() != bj.rows()) throw ArgumentError("wedge_block: row mismatch");
  Mat<S> out(idx::num_wedge(bi.rows()), bi.cols() * bj.cols());
  for (Eigen::Index l1 = 0; l1 < bi.cols(); ++l1)
    for (Eigen::Index l2 = 0; l2 < bj.cols(); ++l2)
      out.col(l1 * bj.cols() + l2) = wedge<S>(bi.col(l1), bj.col(l2));
  return out;
}

template <typename S>
Mat<S> symprod_block(const Mat<S>& ci, const Mat<S>& cj) {
  if (ci.rows() != cj.rows()) throw ArgumentError("symprod_block: row mismatch");
  Mat<S> out(idx::num_sym(ci.rows()), ci.cols() * cj.cols());
  for (Eigen::Index l1 = 0; l1 < ci.cols(); ++l1)
    for (Eigen::Index l2 = 0; l2 < cj.cols(); ++l2)
      out.col(l1 * cj.cols() + l2) = symprod<S>(ci.col(l1), cj.col(l2));
  return out;
}

template <typename S>
Vec<S> expand_sym(const Vec<S>& s, int n) {
  if (s.size() != idx::num_sym(n)) throw ArgumentError("expand_sym: length mismatch");
  Vec<S> out(static_cast<Eigen::Index>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) out(a * n + b) = s(idx::sym(std::min(a, b), std::max(a, b)));
  return out;
}

template <typename S>
FactorMinorForm<S> build_phi_s2(const BlockTermDecomposition<S>& d) {
  d.validate();
  const int R = d.R();
  const Eigen::Index I = d.A.rows(), J = d.B[0].rows(), K = d.C[0].rows();
  const auto pairs = idx::wedge_pairs(R);
  Eigen::Index cols = 0;
  for (auto [r1, r2] : pairs) cols += d.B[r1].cols() * d.B[r2].cols();
  FactorMinorForm<S> f;
  f.Phi.resize(idx::num_wedge(I) * idx::num_wedge(J), cols);
  f.S2.resize(idx::num_sym(K), cols);
  Eigen::Index c = 0;
  for (auto [r1, r2] : pairs) {
    Vec<S> aw = wedge<S>(d.A.col(r1), d.A.col(r2));
    Mat<S> bw = wedge_block(d.B[r1], d.B[r2]);
    Mat<S> cs = symprod_block(d.C[r1], d.C[r2]);
    const Eigen::Index w = bw.cols();
    for (Eigen::Index p = 0; p < aw.size(); ++p) f.Phi.block(p * bw.rows(), c, bw.rows(), w) = aw(p) * bw;
    f.S2.middleCols(c, w) = cs;
    c += w;
  }
  return f;
}

template <typename S>
Mat<S> compound2(const Mat<S>& m) {
  if (m.rows() < 2 || m.cols() < 2) throw ArgumentError("compound2: needs at least 2 rows and 2 columns");
  const auto rp = idx::wedge_pairs(static_cast<int>(m.rows()));
  const auto cp = idx::wedge_pairs(static_cast<int>(m.cols()));
  Mat<S> out(rp.size(), cp.size());
  for (std::size_t a = 0; a < rp.size(); ++a)
    for (std::size_t b = 0; b < cp.size(); ++b) {
      auto [i1, i2] = rp[a];
      auto [j1, j2] = cp[b];
      out(a, b) = m(i1, j1) * m(i2, j2) - m(i1, j2) * m(i2, j1);
    }
  return out;
}

#define BTD_INST(S)                                                                  \
  template MinorMatrixSet<S> build_minor_set<S>(const Tensor3<S>&, bool);            \
  template Rank1Check rank1_membership<S>(const Tensor3<S>&, const Vec<S>&, double); \
  template Vec<S> wedge<S>(const Vec<S>&, const Vec<S>&);                            \
  template Vec<S> symprod<S>(const Vec<S>&, const Vec<S>&);                          \
  template Mat<S> wedge_block<S>(const Mat<S>&, const Mat<S>&);                      \
  template Mat<S> symprod_block<S>(const Mat<S>&, const Mat<S>&);                    \
  template Vec<S> expand_sym<S>(const Vec<S>&, int);                                 \
  template FactorMinorForm<S> build_phi_s2<S>(const BlockTermDecomposition<S>&);     \
  template Mat<S> compound2<S>(const Mat<S>&);
BTD_INST(double)
BTD_INST(cd)
#undef BTD_INST

}  // namespace btd
