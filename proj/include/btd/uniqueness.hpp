#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "btd/tensor.hpp"

namespace btd {

inline constexpr long long kSubsetCap = 1000000;

// Three-valued verdict; not_evaluated when a subset enumeration would exceed the cap.
enum class Verdict { no = 0, yes = 1, not_evaluated = 2 };
inline Verdict verdict(bool b) { return b ? Verdict::yes : Verdict::no; }
Verdict operator&&(Verdict a, Verdict b);
Verdict operator||(Verdict a, Verdict b);
std::string to_string(Verdict v);

struct KRank {
  int value = 0;
  bool exact = true;  // false: cap exceeded, value is a lower bound
};

template <typename S>
KRank k_rank(const Mat<S>& A, double tol = kDefaultRankTol, long long cap = kSubsetCap);
template <typename S>
KRank k_prime_rank(const std::vector<Mat<S>>& blocks, double tol = kDefaultRankTol,
                   long long cap = kSubsetCap);

struct NecessaryChecks {
  bool vecE_fcr = false;
  bool aB_fcr = false;
  bool aC_fcr = false;
};

template <typename S>
NecessaryChecks check_necessary(const BlockTermDecomposition<S>& d, double tol = kDefaultRankTol);

struct UniquenessReport {
  NecessaryChecks necessary;
  // assumptions
  bool cond_T3_rank = false;
  std::vector<int> d;
  bool d_positive = false;
  Verdict F_rank_ok = Verdict::no;
  Verdict Q2_dim_ok = Verdict::not_evaluated;
  int Q_expected = 0;
  int Q2_null_dim = -1;
  Verdict assumptions = Verdict::no;
  // conditions
  Verdict a = Verdict::no, b = Verdict::no, c = Verdict::no, d_cond = Verdict::no, e = Verdict::no;
  bool G_rank_by_surrogate = false;
  long long e_lhs = 0, e_rhs = 0;
  // statements
  Verdict S1_A_by_evd = Verdict::no;
  Verdict S2_overall_by_evd = Verdict::no;
  Verdict S3_first_fm_selection = Verdict::no;
  Verdict S4_first_fm_unique = Verdict::no;
  Verdict S5_overall_unique = Verdict::no;
  // supporting quantities
  int r_A = 0, k_A = 0, r_C = 0;
  long long s_count = 0, ijk = 0;
  std::vector<std::string> notes;
};

template <typename S>
UniquenessReport check_main_theorem(const BlockTermDecomposition<S>& d, const Tensor3<S>* t = nullptr,
                                    double tol = 1e-8);

// r_C, k'_B and k_A bounds that give uniqueness of the first factor, and of the whole decomposition when r_A < R.
template <typename S>
bool check_k_rank_conditions(const BlockTermDecomposition<S>& d, double tol = 1e-8);

struct ParamCount {
  long long S = 0;
  long long IJK = 0;
  bool passes = false;
};
ParamCount parameter_count_S(int I, int J, int K, const std::vector<int>& sizes);

struct GenericBound {
  std::string name;
  bool applicable = true;
  bool holds = false;
  bool requires_verification = false;  // true when the bound additionally needs a rank check
  std::string detail;
};

struct GenericBoundsReport {
  std::vector<GenericBound> bounds;
  int kappa_B = 0, kappa_C = 0;
  const GenericBound* find(const std::string& name) const;
};

GenericBoundsReport generic_bounds(int I, int J, int K, std::vector<int> sizes);

// Two-parameter family of alternative decompositions for the canonical 2 x 8 x 7 tensor.
struct Family287Params {
  double d1 = 0, d2 = 0;
  VecR f = VecR::Zero(8);
  VecR g = VecR::Zero(7);
  VecR h = VecR::Zero(7);
};

struct Family287 {
  Tensor3<double> canonical;         // built from A = [[d1,1,0],[d2,0,1]], B, C
  BlockTermDecomposition<double> canonical_decomposition;
  MatR A;                            // shared first factor
  std::vector<MatR> E;               // alternative E~_1..E~_3
  double alpha = 0, delta = 0;
};

Family287 family_287(double p1, double p2, const Family287Params& params);

struct TwoTermAlternatives {
  Tensor3<double> T2;
  std::vector<BlockTermDecomposition<double>> decompositions;  // original, alternative 1, alternative 2
};

// Vectors: a (2 of length I), b (4 of length J), c (4 of length K).
TwoTermAlternatives two_term_alternatives(const std::vector<VecR>& a, const std::vector<VecR>& b,
                                 const std::vector<VecR>& c);

nlohmann::json report_to_json(const UniquenessReport& r);
nlohmann::json bounds_to_json(const GenericBoundsReport& g);

}  // namespace btd
