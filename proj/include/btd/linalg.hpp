#pragma once

#include <vector>

#include "btd/types.hpp"

namespace btd {

template <typename S>
VecR singular_values(const Mat<S>& m);

// Number of singular values above tol * sigma_max.
template <typename S>
int numerical_rank(const Mat<S>& m, double tol = kDefaultRankTol);

// Orthonormal basis of the right null space.
template <typename S>
Mat<S> null_space(const Mat<S>& m, double tol = kDefaultRankTol);

// The n right singular vectors with smallest singular values.
template <typename S>
Mat<S> smallest_right_singular(const Mat<S>& m, int n);

// Orthonormal basis of the column space (rank by tol, or fixed when rank >= 0).
template <typename S>
Mat<S> orth(const Mat<S>& m, double tol = kDefaultRankTol, int rank = -1);

template <typename S>
Mat<S> pinv(const Mat<S>& m, double tol = kDefaultRankTol);

// Best rank-1 approximation m ~ u * v^T (plain transpose); returns sigma.
template <typename S>
double dominant_rank1(const Mat<S>& m, Vec<S>& u, Vec<S>& v);

// Sine of the largest principal angle between the column spaces of a and b.
template <typename S>
double max_principal_angle(const Mat<S>& a, const Mat<S>& b);

template <typename S>
Mat<S> kron(const Mat<S>& a, const Mat<S>& b);

// Standard normal entries; circularly symmetric with unit variance when complex.
template <typename S, typename Rng>
Mat<S> randn(Eigen::Index rows, Eigen::Index cols, Rng& rng);

// Binomial coefficient C(n,2) and C(n+1,2).
inline long long choose2(long long n) { return n < 2 ? 0 : n * (n - 1) / 2; }

}  // namespace btd

#include <random>

namespace btd {

template <typename S, typename Rng>
Mat<S> randn(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Mat<S> m(rows, cols);
  // Column-major fill order; each complex entry draws re then im.
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      if constexpr (is_complex_v<S>) {
        double re = nd(rng), im = nd(rng);
        m(i, j) = cd(re, im) / std::sqrt(2.0);
      } else {
        m(i, j) = nd(rng);
      }
    }
  return m;
}

}  // namespace btd
