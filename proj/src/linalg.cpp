#include "btd/linalg.hpp"

#include <algorithm>
#include <cstdlib>

namespace btd {

double default_rank_tol() {
  if (const char* env = std::getenv("BTD_RANK_TOL")) {
    char* end = nullptr;
    double v = std::strtod(env, &end);
    if (end != env && v > 0) return v;
  }
  return kDefaultRankTol;
}

template <typename S>
VecR singular_values(const Mat<S>& m) {
  if (m.size() == 0) return VecR();
  Eigen::BDCSVD<Mat<S>> svd(m);
  return svd.singularValues();
}

template <typename S>
int numerical_rank(const Mat<S>& m, double tol) {
  VecR s = singular_values(m);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) ++r;
  return r;
}

template <typename S>
Mat<S> null_space(const Mat<S>& m, double tol) {
  const Eigen::Index n = m.cols();
  if (m.rows() == 0 || n == 0) return Mat<S>::Identity(n, n);
  Eigen::BDCSVD<Mat<S>> svd(m, Eigen::ComputeFullV);
  const VecR& s = svd.singularValues();
  int r = 0;
  if (s(0) > 0)
    for (Eigen::Index i = 0; i < s.size(); ++i)
      if (s(i) > tol * s(0)) ++r;
  return svd.matrixV().rightCols(n - r);
}

template <typename S>
Mat<S> smallest_right_singular(const Mat<S>& m, int n) {
  const Eigen::Index c = m.cols();
  if (n > c) throw ArgumentError("smallest_right_singular: n exceeds column count");
  Eigen::BDCSVD<Mat<S>> svd(m, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(n);
}

template <typename S>
Mat<S> orth(const Mat<S>& m, double tol, int rank) {
  if (m.size() == 0) return Mat<S>(m.rows(), 0);
  Eigen::BDCSVD<Mat<S>> svd(m, Eigen::ComputeThinU);
  int r = rank;
  if (r < 0) {
    const VecR& s = svd.singularValues();
    r = 0;
    if (s(0) > 0)
      for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > tol * s(0)) ++r;
  }
  return svd.matrixU().leftCols(r);
}

template <typename S>
Mat<S> pinv(const Mat<S>& m, double tol) {
  if (m.size() == 0) return Mat<S>::Zero(m.cols(), m.rows());
  Eigen::BDCSVD<Mat<S>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VecR& s = svd.singularValues();
  Vec<S> inv = Vec<S>::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * s(0)) inv(i) = S(1.0 / s(i));
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

template <typename S>
double dominant_rank1(const Mat<S>& m, Vec<S>& u, Vec<S>& v) {
  Eigen::BDCSVD<Mat<S>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  double s = svd.singularValues()(0);
  u = svd.matrixU().col(0) * S(s);
  v = svd.matrixV().col(0).conjugate();
  return s;
}

template <typename S>
double max_principal_angle(const Mat<S>& a, const Mat<S>& b) {
  Mat<S> qa = orth(a, 0.0, static_cast<int>(a.cols()));
  Mat<S> qb = orth(b, 0.0, static_cast<int>(b.cols()));
  Mat<S> res = qb - qa * (qa.adjoint() * qb);
  Mat<S> res2 = qa - qb * (qb.adjoint() * qa);
  VecR s1 = singular_values(res), s2 = singular_values(res2);
  double m1 = s1.size() ? s1(0) : 0.0, m2 = s2.size() ? s2(0) : 0.0;
  return std::max(m1, m2);
}

template <typename S>
Mat<S> kron(const Mat<S>& a, const Mat<S>& b) {
  Mat<S> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

#define BTD_INST(S)                                                         \
  template VecR singular_values<S>(const Mat<S>&);                          \
  template int numerical_rank<S>(const Mat<S>&, double);                    \
  template Mat<S> null_space<S>(const Mat<S>&, double);                     \
  template Mat<S> smallest_right_singular<S>(const Mat<S>&, int);           \
  template Mat<S> orth<S>(const Mat<S>&, double, int);                      \
  template Mat<S> pinv<S>(const Mat<S>&, double);                           \
  template double dominant_rank1<S>(const Mat<S>&, Vec<S>&, Vec<S>&);       \
  template double max_principal_angle<S>(const Mat<S>&, const Mat<S>&);     \
  template Mat<S> kron<S>(const Mat<S>&, const Mat<S>&);
BTD_INST(double)
BTD_INST(cd)
#undef BTD_INST

}  // namespace btd
