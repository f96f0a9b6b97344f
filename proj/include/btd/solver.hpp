#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "btd/sjbd.hpp"
#include "btd/tensor.hpp"

namespace btd {

enum class SolveMode { exact, scenario1, scenario2 };
enum class CaseChoice { automatic = 0, one = 1, two = 2, three = 3 };

struct SolverOptions {
  CaseChoice case_hint = CaseChoice::automatic;
  SolveMode mode = SolveMode::exact;
  std::optional<int> known_R;
  std::optional<int> known_sum_L;
  double rank_tol = default_rank_tol();
  double omega = 2.0;
  std::uint64_t seed = 0;
  EvdVariant evd_variant = EvdVariant::single;
  // Case 3 subsets (0-based); empty selects the default covering.
  std::vector<std::vector<int>> case3_subsets;
};

template <typename S>
struct Phase1Result {
  Mat<S> A;
  Mat<S> N;
  std::vector<int> d;
  int Q = 0;
  // Rank-one factors from step 6: vec(N_r^T E_r^T), one per term.
  std::vector<Vec<S>> u;
  std::vector<std::string> diagnostics;
  bool assumption_violated = false;

  Mat<S> block(int r) const;
};

template <typename S>
struct SolveReport {
  BlockTermDecomposition<S> decomposition;
  std::vector<int> detected_d;
  std::vector<int> detected_L;
  int R = 0;
  int case_used = 0;
  int Q = 0;
  bool compressed = false;
  int K_used = 0;
  double residual = 0;
  bool ok = true;
  std::vector<std::string> diagnostics;
};

template <typename S>
Phase1Result<S> phase1_recover_A(const Tensor3<S>& t, const SolverOptions& opts);

template <typename S>
BlockTermDecomposition<S> phase2_case1(const Tensor3<S>& t, const Phase1Result<S>& p1);

// L empty: ranks of E_r at opts tolerance; otherwise truncation ranks.
template <typename S>
BlockTermDecomposition<S> phase2_case2(const Tensor3<S>& t, const Mat<S>& A, const std::vector<int>& L = {},
                                       double tol = kDefaultRankTol);

struct Case3Info {
  std::vector<std::vector<int>> subsets;
  std::vector<int> subset_ranks;
};

template <typename S>
BlockTermDecomposition<S> phase2_case3(const Tensor3<S>& t, const Mat<S>& A, int r_A,
                                       const std::vector<std::vector<int>>& subsets = {},
                                       const std::vector<int>& L = {}, double tol = kDefaultRankTol,
                                       std::uint64_t seed = 0, Case3Info* info = nullptr);

// Default covering of {0..R-1} by consecutive subsets of size R - r_A + 2.
std::vector<std::vector<int>> default_case3_subsets(int R, int r_A);

// Two-slice tensor (I = 2) by a generalized EVD of two generic slice mixtures.
template <typename S>
BlockTermDecomposition<S> gevd_two_slice_btd(const Tensor3<S>& q, int n_terms = -1,
                                             double tol = kDefaultRankTol, std::uint64_t seed = 0,
                                             double cluster_tol = 1e-6);

std::vector<int> estimate_L_from_d(const std::vector<int>& d, int K, int R);

std::vector<int> estimate_L_from_rank_system(const std::vector<std::pair<std::vector<int>, int>>& subset_ranks,
                                             int R);

// Sorted d-tuples with sum_d = R K - (R-1) sum_L, each with sum C(d_r+1,2).
struct DCandidate {
  std::vector<int> d;
  int Q;
};
std::vector<DCandidate> d_candidates(int R, int sum_d);
int q_min(int R, int sum_d);

template <typename S>
SolveReport<S> decompose(const Tensor3<S>& t, const SolverOptions& opts = {});

}  // namespace btd
