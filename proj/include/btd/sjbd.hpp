#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "btd/types.hpp"

namespace btd {

enum class SJBDMode { exact, approximate };
enum class EvdVariant { single, cpd };

template <typename S>
struct SJBDProblem {
  std::vector<Mat<S>> V;  // symmetric K x K
  SJBDMode mode = SJBDMode::exact;
  std::optional<int> hint_R;
  std::optional<int> hint_sum_d;
};

struct SJBDOptions {
  EvdVariant variant = EvdVariant::single;
  double omega = 2.0;
  std::uint64_t seed = 0;
  double rank_tol = 1e-8;  // commutant null space and column-space rank
  int max_iter = 500;
  double als_tol = 1e-12;
  // Return every eigenvector as its own block (used when d is found later by clustering).
  bool split_all = false;
};

template <typename S>
struct SJBDSolution {
  Mat<S> N;                // K x sum(d)
  std::vector<int> d;
  std::vector<Mat<S>> D;   // sum(d) x sum(d) block diagonal, one per V_q
  int R = 0;
  bool no_guarantee = false;
  std::vector<std::string> diagnostics;

  Mat<S> block(int r) const;
};

// K^2 Q x K^2 matrix; null space = { vec(U) : U V_q = V_q U^T for all q }.
template <typename S>
Mat<S> build_commutant_matrix(const std::vector<Mat<S>>& V);

template <typename S>
struct CommutantBasis {
  int R = 0;
  std::vector<Mat<S>> U;
};

// Exact mode: null space at tol. Approximate mode: the r_target smallest right singular vectors.
template <typename S>
CommutantBasis<S> commutant_basis(const SJBDProblem<S>& p, std::optional<int> r_target,
                                  double tol = 1e-8);

// Groups of indices from agglomerative clustering.
// Either cut at n_clusters, or merge while the linkage distance is <= threshold.
enum class Linkage { single, average };
std::vector<std::vector<int>> agglomerate(const MatR& dist, Linkage link, int n_clusters,
                                          double threshold = 0.0);

// Clusters unit directions modulo sign/scale (columns of X) into n groups.
template <typename S>
std::vector<std::vector<int>> cluster_directions(const Mat<S>& X, int n_clusters);

template <typename S>
struct EvdResult {
  Mat<S> N;
  std::vector<int> d;
  std::vector<int> perm;  // cpd variant: column order of C grouped by cluster
  bool ok = true;
  std::string status;
};

// Eigen-subspaces of a matrix whose eigenvalues are grouped into n_clusters clusters
// (or by relative gap cluster_tol when n_clusters <= 0).
template <typename S>
EvdResult<S> eigen_subspaces(const Mat<S>& Z, int n_clusters, double cluster_tol = 1e-6);

template <typename S>
EvdResult<S> simultaneous_evd_single(const std::vector<Mat<S>>& U, std::uint64_t seed,
                                     int n_clusters = -1, double cluster_tol = 1e-6);

template <typename S>
EvdResult<S> simultaneous_evd_cpd(const std::vector<Mat<S>>& U, double omega, std::uint64_t seed,
                                  int n_clusters, int max_iter = 500, double als_tol = 1e-12);

// Least-squares block-diagonal symmetric D_q with V_q ~ N D_q N^T.
template <typename S>
std::vector<Mat<S>> recover_block_coefficients(const std::vector<Mat<S>>& V, const Mat<S>& N,
                                               const std::vector<int>& d);

template <typename S>
SJBDSolution<S> solve_sjbd(const SJBDProblem<S>& p, const SJBDOptions& opts = {});

}  // namespace btd
