#include "btd/gf.hpp"

#include <algorithm>
#include <bit>
#include <boost/multiprecision/cpp_int.hpp>
#include <functional>
#include <numeric>

#include "btd/minors.hpp"

namespace btd {

namespace {

int poly_degree(std::uint64_t p) { return p == 0 ? -1 : 63 - std::countl_zero(p); }

std::uint64_t poly_mod(std::uint64_t a, std::uint64_t m) {
  const int dm = poly_degree(m);
  for (int da = poly_degree(a); da >= dm; da = poly_degree(a)) a ^= m << (da - dm);
  return a;
}

// Product of two residues modulo poly, both below degree k.
std::uint64_t poly_mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t poly, int k) {
  std::uint64_t r = 0;
  while (b) {
    if (b & 1) r ^= a;
    b >>= 1;
    a <<= 1;
    if (a >> k & 1) a ^= poly;
  }
  return r;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t n) {
  std::vector<std::uint64_t> f;
  for (std::uint64_t q = 2; q * q <= n; ++q)
    if (n % q == 0) {
      f.push_back(q);
      while (n % q == 0) n /= q;
    }
  if (n > 1) f.push_back(n);
  return f;
}

std::string poly_string(std::uint64_t p) {
  std::string s;
  for (int i = poly_degree(p); i >= 0; --i) {
    if (!(p >> i & 1)) continue;
    if (!s.empty()) s += "+";
    s += i == 0 ? "1" : i == 1 ? "x" : "x^" + std::to_string(i);
  }
  return s;
}

}  // namespace

bool gf2_poly_irreducible(std::uint64_t poly) {
  const int d = poly_degree(poly);
  if (d < 1) return false;
  if (d == 1) return true;
  for (std::uint64_t q = 2; poly_degree(q) <= d / 2; ++q)
    if (poly_mod(poly, q) == 0) return false;
  return true;
}

GFField GFField::prime(std::uint32_t p) {
  if (p < 2 || p >= (1u << 31)) throw ArgumentError("GFField::prime: p must lie in [2, 2^31)");
  for (std::uint64_t q = 2; q * q <= p; ++q)
    if (p % q == 0) throw ArgumentError("GFField::prime: " + std::to_string(p) + " is not prime");
  GFField f;
  f.p_ = p;
  f.order_ = p;
  return f;
}

GFField GFField::binary(int k, std::uint64_t poly) {
  if (k < 1 || k > 20) throw ArgumentError("GFField::binary: k must lie in [1, 20]");
  if (poly == 0) {
    if (k != 15) throw ArgumentError("GFField::binary: a reduction polynomial is required for k != 15");
    poly = (1u << 15) | 0b11;
  }
  if (poly_degree(poly) != k) throw ArgumentError("GFField::binary: polynomial degree differs from k");
  if (!gf2_poly_irreducible(poly)) throw ArgumentError("GFField::binary: " + poly_string(poly) + " is reducible");
  GFField f;
  f.binary_ = true;
  f.k_ = k;
  f.poly_ = poly;
  f.order_ = std::uint64_t(1) << k;
  const std::uint64_t n = f.order_ - 1;
  auto pw = [&](std::uint64_t g, std::uint64_t e) {
    std::uint64_t r = 1;
    while (e) {
      if (e & 1) r = poly_mulmod(r, g, poly, k);
      g = poly_mulmod(g, g, poly, k);
      e >>= 1;
    }
    return r;
  };
  const auto qs = prime_factors(n);
  std::uint64_t gen = 0;
  for (std::uint64_t g = (k == 1 ? 1 : 2); g <= n && gen == 0; ++g) {
    bool prim = true;
    for (auto q : qs)
      if (pw(g, n / q) == 1) prim = false;
    if (prim) gen = g;
  }
  f.exp_.assign(2 * n + 1, 0);
  f.log_.assign(f.order_, 0);
  std::uint64_t x = 1;
  for (std::uint64_t i = 0; i < n; ++i) {
    f.exp_[i] = f.exp_[i + n] = static_cast<std::uint32_t>(x);
    f.log_[x] = static_cast<std::uint32_t>(i);
    x = poly_mulmod(x, gen, poly, k);
  }
  return f;
}

std::uint32_t GFField::inv(std::uint32_t a) const {
  if (a == 0) throw ArgumentError("GFField::inv: zero has no inverse");
  if (binary_) return exp_[(order_ - 1) - log_[a]];
  std::uint64_t r = 1, b = a, e = p_ - 2;
  while (e) {
    if (e & 1) r = r * b % p_;
    b = b * b % p_;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(r);
}

std::uint32_t GFField::from_int(long long v) const {
  const long long m = binary_ ? 2 : p_;
  long long r = v % m;
  return static_cast<std::uint32_t>(r < 0 ? r + m : r);
}

std::string GFField::name() const {
  if (binary_) return "GF(2^" + std::to_string(k_) + ") mod " + poly_string(poly_);
  return "GF(" + std::to_string(p_) + ")";
}

GFMatrix GFMatrix::transpose() const {
  GFMatrix t(cols, rows);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) t(c, r) = (*this)(r, c);
  return t;
}

GFMatrix gf_random(const GFField& f, int rows, int cols, Rng& rng) {
  std::uniform_int_distribution<std::uint64_t> dist(0, f.order() - 1);
  GFMatrix m(rows, cols);
  for (auto& x : m.data) x = static_cast<std::uint32_t>(dist(rng));
  return m;
}

GFMatrix gf_multiply_bt(const GFField& f, const GFMatrix& a, const GFMatrix& b) {
  if (a.cols != b.cols) throw ArgumentError("gf_multiply_bt: inner dimension mismatch");
  GFMatrix out(a.rows, b.rows);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.rows; ++j) {
      std::uint32_t s = 0;
      for (int k = 0; k < a.cols; ++k) s = f.add(s, f.mul(a(i, k), b(j, k)));
      out(i, j) = s;
    }
  return out;
}

namespace {

template <bool Parallel>
int rank_kernel(const GFField& f, GFMatrix& m) {
  int rank = 0;
  for (int c = 0; c < m.cols && rank < m.rows; ++c) {
    int piv = -1;
    for (int r = rank; r < m.rows; ++r)
      if (m(r, c) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    if (piv != rank)
      std::swap_ranges(m.data.begin() + std::size_t(piv) * m.cols, m.data.begin() + std::size_t(piv + 1) * m.cols,
                       m.data.begin() + std::size_t(rank) * m.cols);
    const std::uint32_t pinv = f.inv(m(rank, c));
    const int prow = rank;
#pragma omp parallel for schedule(static) if (Parallel)
    for (int r = prow + 1; r < m.rows; ++r) {
      const std::uint32_t x = m(r, c);
      if (x == 0) continue;
      const std::uint32_t fac = f.mul(x, pinv);
      for (int j = c; j < m.cols; ++j) m(r, j) = f.sub(m(r, j), f.mul(fac, m(prow, j)));
    }
    ++rank;
  }
  return rank;
}

}  // namespace

int gf_rank(const GFField& f, GFMatrix m) { return rank_kernel<true>(f, m); }
int gf_rank_serial(const GFField& f, GFMatrix m) { return rank_kernel<false>(f, m); }

int gf_rank_alt(const GFField& f, GFMatrix m) {
  GFMatrix t = m.transpose();
  std::vector<char> used(t.rows, 0);
  int rank = 0;
  for (int c = t.cols - 1; c >= 0; --c) {
    int piv = -1;
    for (int r = t.rows - 1; r >= 0; --r)
      if (!used[r] && t(r, c) != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    used[piv] = 1;
    ++rank;
    const std::uint32_t pinv = f.inv(t(piv, c));
    for (int r = 0; r < t.rows; ++r) {
      if (used[r] || t(r, c) == 0) continue;
      const std::uint32_t fac = f.mul(t(r, c), pinv);
      for (int j = 0; j <= c; ++j) t(r, j) = f.sub(t(r, j), f.mul(fac, t(piv, j)));
    }
  }
  return rank;
}

namespace {

// Phi and S2 over any commutative ring given as add/sub/mul callables on element type T.
template <typename T, typename Add, typename Sub, typename Mul>
struct MinorForms {
  Add add;
  Sub sub;
  Mul mul;

  using Block = std::vector<std::vector<T>>;  // rows x cols

  static int rows(const Block& b) { return static_cast<int>(b.size()); }
  static int cols(const Block& b) { return b.empty() ? 0 : static_cast<int>(b[0].size()); }

  std::vector<std::vector<T>> phi(const Block& A, const std::vector<Block>& B) const {
    const int I = rows(A), R = cols(A), J = rows(B[0]);
    const long long nj = idx::num_wedge(J);
    const auto tp = idx::wedge_pairs(R);
    const auto ip = idx::wedge_pairs(I);
    const auto jp = idx::wedge_pairs(J);
    long long ncol = 0;
    for (auto [r1, r2] : tp) ncol += cols(B[r1]) * cols(B[r2]);
    std::vector<std::vector<T>> out(idx::num_wedge(I) * nj, std::vector<T>(ncol, T(0)));
    long long c = 0;
    for (auto [r1, r2] : tp) {
      for (std::size_t p = 0; p < ip.size(); ++p) {
        auto [i1, i2] = ip[p];
        T aw = sub(mul(A[i1][r1], A[i2][r2]), mul(A[i2][r1], A[i1][r2]));
        for (std::size_t q = 0; q < jp.size(); ++q) {
          auto [j1, j2] = jp[q];
          long long col = c;
          for (int l1 = 0; l1 < cols(B[r1]); ++l1)
            for (int l2 = 0; l2 < cols(B[r2]); ++l2, ++col) {
              T bw = sub(mul(B[r1][j1][l1], B[r2][j2][l2]), mul(B[r1][j2][l1], B[r2][j1][l2]));
              out[p * nj + q][col] = mul(aw, bw);
            }
        }
      }
      c += cols(B[r1]) * cols(B[r2]);
    }
    return out;
  }

  std::vector<std::vector<T>> s2(const std::vector<Block>& C) const {
    const int R = static_cast<int>(C.size()), K = rows(C[0]);
    const auto tp = idx::wedge_pairs(R);
    long long ncol = 0;
    for (auto [r1, r2] : tp) ncol += cols(C[r1]) * cols(C[r2]);
    std::vector<std::vector<T>> out(idx::num_sym(K), std::vector<T>(ncol, T(0)));
    long long c = 0;
    for (auto [r1, r2] : tp) {
      for (int k2 = 0; k2 < K; ++k2)
        for (int k1 = 0; k1 <= k2; ++k1) {
          long long col = c;
          for (int l1 = 0; l1 < cols(C[r1]); ++l1)
            for (int l2 = 0; l2 < cols(C[r2]); ++l2, ++col)
              out[idx::sym(k1, k2)][col] =
                  add(mul(C[r1][k1][l1], C[r2][k2][l2]), mul(C[r1][k2][l1], C[r2][k1][l2]));
        }
      c += cols(C[r1]) * cols(C[r2]);
    }
    return out;
  }
};

template <typename T, typename Add, typename Sub, typename Mul>
MinorForms<T, Add, Sub, Mul> make_forms(Add a, Sub s, Mul m) {
  return {a, s, m};
}

using GFBlock = std::vector<std::vector<std::uint32_t>>;

GFBlock to_block(const GFMatrix& m) {
  GFBlock b(m.rows, std::vector<std::uint32_t>(m.cols));
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < m.cols; ++c) b[r][c] = m(r, c);
  return b;
}

GFMatrix from_block(const GFBlock& b, int ncols) {
  GFMatrix m(static_cast<int>(b.size()), ncols);
  for (int r = 0; r < m.rows; ++r)
    for (int c = 0; c < ncols; ++c) m(r, c) = b[r][c];
  return m;
}

auto gf_forms(const GFField& f) {
  return make_forms<std::uint32_t>([&f](std::uint32_t a, std::uint32_t b) { return f.add(a, b); },
                                   [&f](std::uint32_t a, std::uint32_t b) { return f.sub(a, b); },
                                   [&f](std::uint32_t a, std::uint32_t b) { return f.mul(a, b); });
}

long long pair_product_sum(const std::vector<int>& L) {
  long long s = 0;
  for (std::size_t a = 0; a < L.size(); ++a)
    for (std::size_t b = a + 1; b < L.size(); ++b) s += static_cast<long long>(L[a]) * L[b];
  return s;
}

struct TrialFactors {
  GFMatrix A;
  std::vector<GFMatrix> B, C;
};

TrialFactors draw_factors(const GFField& f, int I, int J, int K, const std::vector<int>& L, std::uint64_t seed,
                          int trial) {
  std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(trial)};
  Rng rng(sq);
  TrialFactors t;
  t.A = gf_random(f, I, static_cast<int>(L.size()), rng);
  for (int l : L) t.B.push_back(gf_random(f, J, l, rng));
  for (int l : L) t.C.push_back(gf_random(f, K, l, rng));
  return t;
}

void validate_sizes(const std::vector<int>& L, const char* who) {
  if (L.empty()) throw ArgumentError(std::string(who) + ": no sizes");
  for (int l : L)
    if (l < 1) throw ArgumentError(std::string(who) + ": sizes must be positive");
}

}  // namespace

GFMatrix gf_phi(const GFField& f, const GFMatrix& A, const std::vector<GFMatrix>& B) {
  if (static_cast<int>(B.size()) != A.cols) throw ArgumentError("gf_phi: one B block per column of A");
  if (A.rows < 2) throw ArgumentError("gf_phi: needs I >= 2");
  std::vector<GFBlock> bb;
  long long ncol = 0;
  for (const auto& b : B) bb.push_back(to_block(b));
  for (auto [r1, r2] : idx::wedge_pairs(A.cols)) ncol += static_cast<long long>(B[r1].cols) * B[r2].cols;
  auto rows = gf_forms(f).phi(to_block(A), bb);
  return from_block(rows, static_cast<int>(ncol));
}

GFMatrix gf_s2(const GFField& f, const std::vector<GFMatrix>& C) {
  if (C.empty()) throw ArgumentError("gf_s2: no blocks");
  std::vector<GFBlock> cb;
  long long ncol = 0;
  for (const auto& c : C) cb.push_back(to_block(c));
  for (auto [r1, r2] : idx::wedge_pairs(static_cast<int>(C.size())))
    ncol += static_cast<long long>(C[r1].cols) * C[r2].cols;
  auto rows = gf_forms(f).s2(cb);
  return from_block(rows, static_cast<int>(ncol));
}

std::string to_string(GFVerdict v) {
  switch (v) {
    case GFVerdict::certified: return "certified";
    case GFVerdict::cannot_be_full_rank: return "cannot be full rank";
    default: return "inconclusive";
  }
}

GFVerificationResult verify_phi_full_rank(int I, int J, const std::vector<int>& L, int trials, std::uint64_t seed,
                                          const GFField& field) {
  validate_sizes(L, "verify_phi_full_rank");
  if (I < 2 || J < 2) throw ArgumentError("verify_phi_full_rank: needs I >= 2 and J >= 2");
  if (trials < 1) throw ArgumentError("verify_phi_full_rank: trials must be positive");
  GFVerificationResult res;
  res.I = I;
  res.J = J;
  res.R = static_cast<int>(L.size());
  res.L = L;
  res.field = field.name();
  res.trials = trials;
  res.expected = static_cast<int>(pair_product_sum(L));
  if (res.R == 1) {
    res.verdict = GFVerdict::certified;
    res.witnessed_rank = 0;
    res.reason = "single term: Phi has no columns";
    return res;
  }
  std::vector<int> Ls = L;
  std::sort(Ls.begin(), Ls.end());
  const long long nrows = idx::num_wedge(I) * idx::num_wedge(J);
  if (nrows < res.expected) {
    res.verdict = GFVerdict::cannot_be_full_rank;
    res.reason = "C(I,2)C(J,2) < sum of L_r1 L_r2";
    return res;
  }
  if (J < Ls[res.R - 2] + Ls[res.R - 1]) {
    res.verdict = GFVerdict::cannot_be_full_rank;
    res.reason = "J < L_{R-1} + L_R";
    return res;
  }
  for (int t = 0; t < trials; ++t) {
    TrialFactors fac = draw_factors(field, I, J, 1, L, seed, t);
    int rk = gf_rank(field, gf_phi(field, fac.A, fac.B));
    ++res.trials_run;
    res.witnessed_rank = std::max(res.witnessed_rank, rk);
    if (rk == res.expected) {
      res.verdict = GFVerdict::certified;
      res.certified_trial = t;
      return res;
    }
  }
  res.reason = "no trial reached full column rank; retry with a new seed or a larger field";
  return res;
}

GFVerificationResult verify_generic_q2_dim(int I, int J, int K, const std::vector<int>& L, int trials,
                                           std::uint64_t seed, const GFField& field) {
  validate_sizes(L, "verify_generic_q2_dim");
  if (I < 2 || J < 2 || K < 1) throw ArgumentError("verify_generic_q2_dim: needs I >= 2, J >= 2, K >= 1");
  if (trials < 1) throw ArgumentError("verify_generic_q2_dim: trials must be positive");
  const int sumL = std::accumulate(L.begin(), L.end(), 0);
  GFVerificationResult res;
  res.I = I;
  res.J = J;
  res.R = static_cast<int>(L.size());
  res.L = L;
  res.field = field.name();
  res.trials = trials;
  if (K > sumL) {
    res.reason = "K clipped to sum L = " + std::to_string(sumL);
    K = sumL;
  }
  res.K = K;
  for (int l : L)
    if (l > std::min(J, K)) throw ArgumentError("verify_generic_q2_dim: L_r exceeds min(J,K)");
  long long null_dim = 0;
  for (int l : L) {
    long long d = std::max(0, K - (sumL - l));
    null_dim += d * (d + 1) / 2;
  }
  res.expected = static_cast<int>(idx::num_sym(K) - null_dim);
  if (res.R == 1) {
    res.verdict = GFVerdict::certified;
    res.witnessed_rank = 0;
    res.reason = "single term: Q2 vanishes";
    return res;
  }
  for (int t = 0; t < trials; ++t) {
    TrialFactors fac = draw_factors(field, I, J, K, L, seed, t);
    GFMatrix q2 = gf_multiply_bt(field, gf_phi(field, fac.A, fac.B), gf_s2(field, fac.C));
    int rk = gf_rank(field, q2);
    ++res.trials_run;
    res.witnessed_rank = std::max(res.witnessed_rank, rk);
    if (rk == res.expected) {
      res.verdict = GFVerdict::certified;
      res.certified_trial = t;
      return res;
    }
  }
  if (res.reason.empty()) res.reason = "rank below the generic value in every trial; retry with a new seed or prime";
  return res;
}

bool is_known_phi_exception(int I, int J, const std::vector<int>& L) {
  if (J != 5) return false;
  std::vector<int> Ls = L;
  std::sort(Ls.begin(), Ls.end());
  const int R = static_cast<int>(Ls.size());
  if (R < 2 || Ls[R - 1] != 4) return false;
  for (int r = 0; r + 1 < R; ++r)
    if (Ls[r] != 1) return false;
  return (I == 2 && R == 3) || (I == 4 && R == 9) || (I == 5 && R == 12);
}

std::vector<PhiConfig> enumerate_phi_configs(int max_dim) {
  std::vector<PhiConfig> out;
  for (int I = 2; I <= max_dim; ++I)
    for (int J = 2; J <= max_dim; ++J) {
      const long long cap = idx::num_wedge(I) * idx::num_wedge(J);
      std::vector<int> L;
      // Non-decreasing sequences; the pair sum only grows as terms are appended.
      std::function<void(int, long long, int)> rec = [&](int lo, long long pairs, int sum) {
        const int R = static_cast<int>(L.size());
        if (R >= 2 && L[R - 2] + L[R - 1] <= J) out.push_back({I, J, L});
        for (int l = lo; l <= J; ++l) {
          long long np = pairs + static_cast<long long>(l) * sum;
          if (np > cap) break;
          L.push_back(l);
          rec(l, np, sum + l);
          L.pop_back();
        }
      };
      rec(1, 0, 0);
    }
  return out;
}

namespace {

using boost::multiprecision::cpp_int;

int bareiss_rank(std::vector<std::vector<cpp_int>> m) {
  const int rows = static_cast<int>(m.size());
  if (rows == 0) return 0;
  const int cols = static_cast<int>(m[0].size());
  cpp_int prev = 1;
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (m[r][c] != 0) {
        piv = r;
        break;
      }
    if (piv < 0) continue;
    std::swap(m[piv], m[rank]);
    for (int r = rank + 1; r < rows; ++r) {
      for (int j = c + 1; j < cols; ++j) m[r][j] = (m[rank][c] * m[r][j] - m[r][c] * m[rank][j]) / prev;
      m[r][c] = 0;
    }
    prev = m[rank][c];
    ++rank;
  }
  return rank;
}

}  // namespace

int rational_rank(const std::vector<std::vector<long long>>& m) {
  std::vector<std::vector<cpp_int>> c;
  for (const auto& row : m) c.emplace_back(row.begin(), row.end());
  return bareiss_rank(std::move(c));
}

int lifted_q2_rational_rank(int I, int J, int K, const std::vector<int>& L, std::uint64_t seed, int trial,
                            const GFField& field) {
  if (field.is_binary()) throw ArgumentError("lifted_q2_rational_rank: prime fields only");
  validate_sizes(L, "lifted_q2_rational_rank");
  const int sumL = std::accumulate(L.begin(), L.end(), 0);
  K = std::min(K, sumL);
  if (L.size() < 2) return 0;
  TrialFactors fac = draw_factors(field, I, J, K, L, seed, trial);
  using Block = std::vector<std::vector<cpp_int>>;
  auto lift = [](const GFMatrix& g) {
    Block b(g.rows, std::vector<cpp_int>(g.cols));
    for (int r = 0; r < g.rows; ++r)
      for (int c = 0; c < g.cols; ++c) b[r][c] = g(r, c);
    return b;
  };
  auto forms = make_forms<cpp_int>([](const cpp_int& a, const cpp_int& b) { return cpp_int(a + b); },
                                   [](const cpp_int& a, const cpp_int& b) { return cpp_int(a - b); },
                                   [](const cpp_int& a, const cpp_int& b) { return cpp_int(a * b); });
  std::vector<Block> B, C;
  for (const auto& b : fac.B) B.push_back(lift(b));
  for (const auto& c : fac.C) C.push_back(lift(c));
  Block phi = forms.phi(lift(fac.A), B);
  Block s2 = forms.s2(C);
  const std::size_t inner = phi.empty() ? 0 : phi[0].size();
  Block q2(phi.size(), std::vector<cpp_int>(s2.size()));
  for (std::size_t i = 0; i < phi.size(); ++i)
    for (std::size_t j = 0; j < s2.size(); ++j) {
      cpp_int s = 0;
      for (std::size_t k = 0; k < inner; ++k) s += phi[i][k] * s2[j][k];
      q2[i][j] = s;
    }
  return bareiss_rank(std::move(q2));
}

nlohmann::json gf_result_to_json(const GFVerificationResult& r) {
  return {{"I", r.I},
          {"J", r.J},
          {"K", r.K},
          {"R", r.R},
          {"L", r.L},
          {"field", r.field},
          {"trials", r.trials},
          {"trials_run", r.trials_run},
          {"verdict", to_string(r.verdict)},
          {"witnessed_rank", r.witnessed_rank},
          {"expected", r.expected},
          {"certified_trial", r.certified_trial},
          {"reason", r.reason}};
}

}  // namespace btd
