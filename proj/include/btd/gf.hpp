#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "btd/types.hpp"

namespace btd {

// Polynomial over GF(2) as a bit mask, bit i = coefficient of x^i.
bool gf2_poly_irreducible(std::uint64_t poly);

// GF(p) for a prime p < 2^31, or GF(2^k) for k <= 20 given a reduction polynomial.
class GFField {
 public:
  static GFField prime(std::uint32_t p);
  // poly = 0 picks x^15+x+1 for k = 15; other k must pass a polynomial.
  static GFField binary(int k = 15, std::uint64_t poly = 0);

  std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    if (binary_) return a ^ b;
    std::uint32_t s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  std::uint32_t sub(std::uint32_t a, std::uint32_t b) const {
    if (binary_) return a ^ b;
    return a >= b ? a - b : a + p_ - b;
  }
  std::uint32_t neg(std::uint32_t a) const { return binary_ || a == 0 ? a : p_ - a; }
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    if (binary_) {
      if (a == 0 || b == 0) return 0;
      return exp_[log_[a] + log_[b]];
    }
    return static_cast<std::uint32_t>(std::uint64_t(a) * b % p_);
  }
  std::uint32_t inv(std::uint32_t a) const;
  // Image of an integer under Z -> field (binary fields use the parity).
  std::uint32_t from_int(long long v) const;

  std::uint64_t order() const { return order_; }
  bool is_binary() const { return binary_; }
  std::uint32_t characteristic() const { return binary_ ? 2 : p_; }
  int degree() const { return k_; }
  std::uint64_t polynomial() const { return poly_; }
  std::string name() const;

 private:
  bool binary_ = false;
  std::uint32_t p_ = 2;
  int k_ = 1;
  std::uint64_t poly_ = 0;
  std::uint64_t order_ = 2;
  std::vector<std::uint32_t> exp_;  // doubled length so log sums need no reduction
  std::vector<std::uint32_t> log_;
};

struct GFMatrix {
  int rows = 0, cols = 0;
  std::vector<std::uint32_t> data;  // row-major

  GFMatrix() = default;
  GFMatrix(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0) {}
  std::uint32_t& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  std::uint32_t operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
  GFMatrix transpose() const;
};

GFMatrix gf_random(const GFField& f, int rows, int cols, Rng& rng);
GFMatrix gf_multiply_bt(const GFField& f, const GFMatrix& a, const GFMatrix& b);  // a * b^T

// Row-echelon elimination; the parallel kernel distributes row updates with OpenMP.
int gf_rank(const GFField& f, GFMatrix m);
int gf_rank_serial(const GFField& f, GFMatrix m);
// Independent ordering: column-by-column on the transpose, pivots taken from the bottom.
int gf_rank_alt(const GFField& f, GFMatrix m);

// Factor-form minor matrices over the field; blocks hold one matrix per term.
GFMatrix gf_phi(const GFField& f, const GFMatrix& A, const std::vector<GFMatrix>& B);
GFMatrix gf_s2(const GFField& f, const std::vector<GFMatrix>& C);

enum class GFVerdict { certified, inconclusive, cannot_be_full_rank };
std::string to_string(GFVerdict v);

struct GFVerificationResult {
  int I = 0, J = 0, K = 0, R = 0;
  std::vector<int> L;
  std::string field;
  int trials = 0;
  int trials_run = 0;
  GFVerdict verdict = GFVerdict::inconclusive;
  int witnessed_rank = -1;  // best rank over the trials
  int expected = 0;
  int certified_trial = -1;
  std::string reason;
};

inline constexpr std::uint32_t kDefaultPrime = 2147483647u;  // 2^31 - 1

// Full column rank of Phi(A,B) for random A (I x R) and B_r (J x L_r).
GFVerificationResult verify_phi_full_rank(int I, int J, const std::vector<int>& L, int trials = 5,
                                          std::uint64_t seed = 0, const GFField& field = GFField::binary());

// rank Q2 = C(K+1,2) - sum C(d_r+1,2) for random factors; K is clipped to sum L.
GFVerificationResult verify_generic_q2_dim(int I, int J, int K, const std::vector<int>& L, int trials = 5,
                                           std::uint64_t seed = 0,
                                           const GFField& field = GFField::prime(kDefaultPrime));

// Known configurations where Phi is generically rank deficient.
bool is_known_phi_exception(int I, int J, const std::vector<int>& L);

struct PhiConfig {
  int I, J;
  std::vector<int> L;  // sorted ascending
};
// All (I, J, L) with 2 <= I, J <= max_dim, R >= 2 and the two counting conditions of the Phi check.
std::vector<PhiConfig> enumerate_phi_configs(int max_dim);

// Exact rank over the rationals by fraction-free elimination.
int rational_rank(const std::vector<std::vector<long long>>& m);

// Lifts the factors of a verify_generic_q2_dim trial (prime field only) to integers,
// forms Q2 exactly over Z and returns its rank over Q.
int lifted_q2_rational_rank(int I, int J, int K, const std::vector<int>& L, std::uint64_t seed, int trial,
                            const GFField& field = GFField::prime(kDefaultPrime));

nlohmann::json gf_result_to_json(const GFVerificationResult& r);

}  // namespace btd
