#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "btd/types.hpp"

namespace btd {

// Dense I x J x K array, lexicographic (i,j,k) storage with k fastest.
template <typename S>
struct Tensor3 {
  int I = 0, J = 0, K = 0;
  std::vector<S> values;

  static constexpr Field field = field_of<S>();

  Tensor3() = default;
  Tensor3(int i, int j, int k) : I(i), J(j), K(k), values(std::size_t(i) * j * k, S(0)) {}

  S& operator()(int i, int j, int k) { return values[(std::size_t(i) * J + j) * K + k]; }
  const S& operator()(int i, int j, int k) const {
    return values[(std::size_t(i) * J + j) * K + k];
  }

  // Horizontal slice H_i (J x K).
  Mat<S> horizontal(int i) const;
  // Frontal slice T_k (I x J).
  Mat<S> frontal(int k) const;
  double norm() const;
  bool all_finite() const;
};

template <typename S>
struct BlockTermDecomposition {
  Mat<S> A;               // I x R
  std::vector<Mat<S>> B;  // J x L_r
  std::vector<Mat<S>> C;  // K x L_r

  int R() const { return static_cast<int>(A.cols()); }
  std::vector<int> sizes() const;
  Mat<S> E(int r) const { return B[r] * C[r].transpose(); }
  // Throws ArgumentError when shapes are inconsistent or a column of A is zero.
  void validate() const;
};

// mode 1: JK x I, mode 2: IK x J, mode 3: IJ x K.
template <typename S>
Mat<S> unfold(const Tensor3<S>& t, int mode);

// Inverse of unfold(., 3).
template <typename S>
Tensor3<S> fold3(const Mat<S>& m, int I, int J);

template <typename S>
Tensor3<S> compose(const BlockTermDecomposition<S>& d, int I, int J, int K);
template <typename S>
Tensor3<S> compose(const BlockTermDecomposition<S>& d);

template <typename S>
BlockTermDecomposition<S> random_btd(int I, int J, int K, const std::vector<int>& sizes,
                                     std::uint64_t seed);

struct NoiseSpec {
  double snr_db = std::numeric_limits<double>::infinity();
  std::uint64_t seed = 0;
  bool exact() const { return snr_db == std::numeric_limits<double>::infinity(); }
};

template <typename S>
Tensor3<S> add_noise(const Tensor3<S>& t, const NoiseSpec& spec);

template <typename S>
struct Compression {
  Tensor3<S> t;       // I x J x K~ with unfold(t,3) orthonormal columns
  Mat<S> mixing;      // K~ x K, unfold(original,3) = unfold(t,3) * mixing
  int original_rank;  // K~
};

template <typename S>
Compression<S> compress_third_mode(const Tensor3<S>& t, double tol = kDefaultRankTol);

// [a_1 (x) B_1 ... a_R (x) B_R], IJ x sum(L).
template <typename S>
Mat<S> a_kron_blocks(const Mat<S>& A, const std::vector<Mat<S>>& B);

// C blocks from unfold(t,3) = [a_1 (x) B_1 ...] C^T in least squares.
template <typename S>
std::vector<Mat<S>> recover_third_factor(const Tensor3<S>& t, const Mat<S>& A,
                                         const std::vector<Mat<S>>& B);

// [a_1 (x) vec(E_1) ... a_R (x) vec(E_R)], IJK x R.
template <typename S>
Mat<S> term_matrix(const BlockTermDecomposition<S>& d);

template <typename S>
struct MatchResult {
  std::vector<int> perm;  // perm[r] = index in est matched to truth term r
  std::vector<S> scales;  // est a column times 1/scales[r] approximates truth a_r
  double err_A = 0;
  double err_terms = 0;
};

template <typename S>
MatchResult<S> match_decompositions(const BlockTermDecomposition<S>& truth,
                                    const BlockTermDecomposition<S>& est);

template <typename S>
double relative_residual(const Tensor3<S>& t, const BlockTermDecomposition<S>& d);

}  // namespace btd
