#include "btd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "btd/linalg.hpp"
#include "btd/solver.hpp"

namespace btd {

void ExperimentConfig::validate() const {
  if (I < 2 || J < 2 || K < 1) throw ArgumentError("experiment: dimensions must be at least 2 x 2 x 1");
  if (sizes.size() < 2) throw ArgumentError("experiment: needs at least two terms");
  for (int l : sizes)
    if (l < 1 || l > std::min(J, K)) throw ArgumentError("experiment: sizes must lie in [1, min(J,K)]");
  if (num_trials < 1) throw ArgumentError("experiment: num_trials must be positive");
  if (snr_db.empty()) throw ArgumentError("experiment: empty SNR grid");
  if (!(cond_cap >= 1.0)) throw ArgumentError("experiment: condition cap must be at least 1");
}

int ExperimentResult::frequency_of(const std::vector<int>& L, std::size_t s) const {
  std::vector<int> key = L;
  std::sort(key.begin(), key.end());
  for (std::size_t c = 0; c < candidates.size(); ++c)
    if (candidates[c] == key) return freq[c][s];
  return 0;
}

std::vector<std::vector<int>> candidate_L_tuples(int R, int K, int sum_L) {
  std::vector<std::vector<int>> out;
  if (R < 2) return out;
  const int sum_d = R * K - (R - 1) * sum_L;
  for (const auto& c : d_candidates(R, sum_d)) {
    std::vector<int> L;
    try {
      L = estimate_L_from_d(c.d, K, R);
    } catch (const Diagnostic&) {
      continue;
    }
    std::sort(L.begin(), L.end());
    out.push_back(L);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double unfolding_condition(const Tensor3<double>& t) {
  double worst = 0;
  for (int mode : {1, 3}) {
    VecR s = singular_values<double>(unfold(t, mode));
    const double lo = s(s.size() - 1);
    worst = std::max(worst, lo > 0 ? s(0) / lo : std::numeric_limits<double>::infinity());
  }
  return worst;
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32)};
  for (auto p : path) {
    words.push_back(static_cast<std::uint32_t>(p));
    words.push_back(static_cast<std::uint32_t>(p >> 32));
  }
  std::seed_seq sq(words.begin(), words.end());
  Rng rng(sq);
  return rng();
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / double(v.size());
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const int R = static_cast<int>(cfg.sizes.size());
  const int sum_L = std::accumulate(cfg.sizes.begin(), cfg.sizes.end(), 0);
  const std::size_t nsnr = cfg.snr_db.size();
  ExperimentResult res;
  res.config = cfg;
  res.candidates = candidate_L_tuples(R, cfg.K, sum_L);
  res.outcomes.assign(nsnr, std::vector<TrialOutcome>(cfg.num_trials));
  std::vector<long long> rejected(cfg.num_trials, 0);
  std::vector<std::string> draw_error(cfg.num_trials);

#pragma omp parallel for schedule(dynamic)
  for (int trial = 0; trial < cfg.num_trials; ++trial) {
    BlockTermDecomposition<double> truth;
    Tensor3<double> t;
    bool accepted = false;
    for (int attempt = 0; attempt < cfg.max_draws_per_trial; ++attempt) {
      truth = random_btd<double>(cfg.I, cfg.J, cfg.K, cfg.sizes,
                                 derive_seed(cfg.seed, {std::uint64_t(trial), std::uint64_t(attempt)}));
      t = compose(truth);
      if (unfolding_condition(t) <= cfg.cond_cap) {
        accepted = true;
        break;
      }
      ++rejected[trial];
    }
    if (!accepted) {
      draw_error[trial] = "no draw met the condition cap";
      continue;
    }
    for (std::size_t s = 0; s < nsnr; ++s) {
      TrialOutcome& out = res.outcomes[s][trial];
      NoiseSpec ns{cfg.snr_db[s], derive_seed(cfg.seed, {std::uint64_t(trial), 1ull << 40, s})};
      Tensor3<double> noisy = add_noise(t, ns);
      SolverOptions so;
      so.omega = cfg.omega;
      so.evd_variant = cfg.evd_variant;
      so.seed = derive_seed(cfg.seed, {std::uint64_t(trial), 1ull << 41, s});
      if (!ns.exact()) {
        so.mode = SolveMode::scenario2;
        so.known_R = R;
        so.known_sum_L = sum_L;
      }
      try {
        SolveReport<double> rep = decompose(noisy, so);
        out.solved = true;
        out.detected_L = rep.detected_L;
        std::sort(out.detected_L.begin(), out.detected_L.end());
        if (rep.decomposition.R() == R) {
          auto m = match_decompositions(truth, rep.decomposition);
          out.err_A = m.err_A;
          out.err_terms = m.err_terms;
        }
      } catch (const std::exception& e) {
        out.failure = e.what();
      }
    }
  }

  for (int trial = 0; trial < cfg.num_trials; ++trial) {
    if (!draw_error[trial].empty()) throw Diagnostic("experiment: trial " + std::to_string(trial) + ": " + draw_error[trial]);
    res.rejected_draws += rejected[trial];
  }
  res.freq.assign(res.candidates.size(), std::vector<int>(nsnr, 0));
  res.other.assign(nsnr, 0);
  res.failed.assign(nsnr, 0);
  for (std::size_t s = 0; s < nsnr; ++s) {
    std::vector<double> ea, et;
    for (const auto& o : res.outcomes[s]) {
      if (!o.solved) {
        ++res.failed[s];
        continue;
      }
      auto it = std::find(res.candidates.begin(), res.candidates.end(), o.detected_L);
      if (it == res.candidates.end())
        ++res.other[s];
      else
        ++res.freq[it - res.candidates.begin()][s];
      if (std::isfinite(o.err_A)) ea.push_back(o.err_A);
      if (std::isfinite(o.err_terms)) et.push_back(o.err_terms);
    }
    res.mean_err_A.push_back(mean(ea));
    res.median_err_A.push_back(median(ea));
    res.mean_err_terms.push_back(mean(et));
    res.median_err_terms.push_back(median(et));
  }
  return res;
}

std::string format_snr(double snr_db) {
  if (std::isinf(snr_db)) return "inf";
  std::ostringstream os;
  os << snr_db;
  return os.str();
}

std::string format_tuple(const std::vector<int>& L) {
  std::string s = "(";
  for (std::size_t i = 0; i < L.size(); ++i) s += (i ? " " : "") + std::to_string(L[i]);
  return s + ")";
}

void write_frequency_csv(std::ostream& os, const ExperimentResult& r) {
  os << "L";
  for (double s : r.config.snr_db) os << ',' << format_snr(s);
  os << '\n';
  for (std::size_t c = 0; c < r.candidates.size(); ++c) {
    os << format_tuple(r.candidates[c]);
    for (int v : r.freq[c]) os << ',' << v;
    os << '\n';
  }
  os << "other";
  for (int v : r.other) os << ',' << v;
  os << "\nfailed";
  for (int v : r.failed) os << ',' << v;
  os << '\n';
}

void write_error_csv(std::ostream& os, const ExperimentResult& r) {
  os.precision(17);
  os << "snr_db,trials,solved,mean_err_A,median_err_A,mean_err_terms,median_err_terms\n";
  for (std::size_t s = 0; s < r.config.snr_db.size(); ++s)
    os << format_snr(r.config.snr_db[s]) << ',' << r.config.num_trials << ','
       << (r.config.num_trials - r.failed[s]) << ',' << r.mean_err_A[s] << ',' << r.median_err_A[s] << ','
       << r.mean_err_terms[s] << ',' << r.median_err_terms[s] << '\n';
}

}  // namespace btd
