#pragma once

// Header-only Q2/R2 kernels so that integer and floating scalars share one code path.

namespace btd {

namespace detail {

template <typename T>
inline void q2_row(const Tensor3<T>& t, int i1, int i2, int j1, int j2, T* row, long long stride) {
  const int K = t.K;
  const T* a = &t(i1, j1, 0);  // t_{i1 j1 .}
  const T* b = &t(i2, j2, 0);  // t_{i2 j2 .}
  const T* c = &t(i1, j2, 0);  // t_{i1 j2 .}
  const T* e = &t(i2, j1, 0);  // t_{i2 j1 .}
  for (int k2 = 0; k2 < K; ++k2)
    for (int k1 = 0; k1 <= k2; ++k1)
      row[idx::sym(k1, k2) * stride] =
          a[k1] * b[k2] + a[k2] * b[k1] - c[k1] * e[k2] - c[k2] * e[k1];
}

template <typename T>
void check_q2_dims(const Tensor3<T>& t) {
  if (t.I < 2 || t.J < 2) throw ArgumentError("build_Q2: requires I >= 2 and J >= 2");
}

}  // namespace detail

template <typename T>
Mat<T> build_Q2_serial(const Tensor3<T>& t) {
  detail::check_q2_dims(t);
  const long long nj = idx::num_wedge(t.J);
  Mat<T> q(idx::num_wedge(t.I) * nj, idx::num_sym(t.K));
  const long long stride = q.rows();
  for (int i2 = 1; i2 < t.I; ++i2)
    for (int i1 = 0; i1 < i2; ++i1)
      for (int j2 = 1; j2 < t.J; ++j2)
        for (int j1 = 0; j1 < j2; ++j1) {
          long long row = idx::wedge(i1, i2) * nj + idx::wedge(j1, j2);
          detail::q2_row(t, i1, i2, j1, j2, q.data() + row, stride);
        }
  return q;
}

template <typename T>
Mat<T> build_Q2(const Tensor3<T>& t) {
  detail::check_q2_dims(t);
  const long long nj = idx::num_wedge(t.J);
  const long long rows = idx::num_wedge(t.I) * nj;
  Mat<T> q(rows, idx::num_sym(t.K));
  const auto ip = idx::wedge_pairs(t.I);
  const auto jp = idx::wedge_pairs(t.J);
  const long long stride = rows;
#pragma omp parallel for schedule(static)
  for (long long row = 0; row < rows; ++row) {
    const auto& pi = ip[row / nj];
    const auto& pj = jp[row % nj];
    detail::q2_row(t, pi.first, pi.second, pj.first, pj.second, q.data() + row, stride);
  }
  return q;
}

template <typename T>
Mat<T> build_R2(const Tensor3<T>& t) {
  Mat<T> q = build_Q2(t);
  const int K = t.K;
  Mat<T> r(q.rows(), static_cast<Eigen::Index>(K) * K);
  for (int k1 = 0; k1 < K; ++k1)
    for (int k2 = 0; k2 < K; ++k2)
      r.col(static_cast<Eigen::Index>(k2) * K + k1) = q.col(idx::sym(std::min(k1, k2), std::max(k1, k2)));
  return r;
}

}  // namespace btd
