#pragma once

#include <utility>
#include <vector>

#include "btd/tensor.hpp"

namespace btd {

// Pair enumeration shared by Q2, wedge products, compound matrices and the term pairs of Phi/S2.
// Pairs (a,b) are 0-based; "colex" means b is the outer (slow) index.
namespace idx {
// a < b: position of (a,b) among strictly increasing pairs.
inline long long wedge(long long a, long long b) { return a + b * (b - 1) / 2; }
// a <= b: position of (a,b) among non-decreasing pairs.
inline long long sym(long long a, long long b) { return a + b * (b + 1) / 2; }
inline long long num_wedge(long long n) { return n * (n - 1) / 2; }
inline long long num_sym(long long n) { return n * (n + 1) / 2; }
// All strictly increasing pairs in wedge order.
std::vector<std::pair<int, int>> wedge_pairs(int n);
}  // namespace idx

// Q2 entry kernel over any ring scalar T (double, complex, integers).
// Rows (i1<i2, j1<j2) at wedge(i)*C(J,2)+wedge(j); columns (k1<=k2) at sym(k1,k2).
template <typename T>
Mat<T> build_Q2_serial(const Tensor3<T>& t);
template <typename T>
Mat<T> build_Q2(const Tensor3<T>& t);  // OpenMP over row blocks, same result as the serial kernel

// R2 with all K^2 columns; column k2*K+k1 holds the (k1,k2) quadratic form.
template <typename T>
Mat<T> build_R2(const Tensor3<T>& t);

MatR build_PK(int k);
MatR build_D(int k);

template <typename S>
struct MinorMatrixSet {
  Mat<S> Q2;
  Mat<S> R2;  // empty unless requested
  MatR PK;
  MatR D;
};

template <typename S>
MinorMatrixSet<S> build_minor_set(const Tensor3<S>& t, bool with_R2 = false);

struct Rank1Check {
  bool direct;   // SVD of sum_k f_k T_k
  bool via_R2;   // R2 (f (x) f) = 0
  double direct_ratio;
  double r2_ratio;
};

template <typename S>
Rank1Check rank1_membership(const Tensor3<S>& t, const Vec<S>& f, double tol = 1e-8);

template <typename S>
Vec<S> wedge(const Vec<S>& x, const Vec<S>& y);
template <typename S>
Vec<S> symprod(const Vec<S>& x, const Vec<S>& y);
// Columns enumerate (l1,l2) with l2 fastest.
template <typename S>
Mat<S> wedge_block(const Mat<S>& bi, const Mat<S>& bj);
template <typename S>
Mat<S> symprod_block(const Mat<S>& ci, const Mat<S>& cj);
// P_n expansion of a symmetric-product vector back to n^2 entries.
template <typename S>
Vec<S> expand_sym(const Vec<S>& s, int n);

template <typename S>
struct FactorMinorForm {
  Mat<S> Phi;
  Mat<S> S2;
};

// Term pairs (r1<r2) in wedge order; Q2 = Phi * S2^T.
template <typename S>
FactorMinorForm<S> build_phi_s2(const BlockTermDecomposition<S>& d);

template <typename S>
Mat<S> compound2(const Mat<S>& m);

}  // namespace btd

#include "btd/minors_impl.hpp"
