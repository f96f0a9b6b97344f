#pragma once

#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "btd/sjbd.hpp"
#include "btd/tensor.hpp"

namespace btd {

inline constexpr double kInfSnr = std::numeric_limits<double>::infinity();

struct ExperimentConfig {
  int I = 0, J = 0, K = 0;
  std::vector<int> sizes;
  std::vector<double> snr_db;  // kInfSnr runs the exact solver
  int num_trials = 100;
  double cond_cap = 10.0;      // max(cond T_(1), cond T_(3)) accepted
  EvdVariant evd_variant = EvdVariant::single;
  double omega = 2.0;
  std::uint64_t seed = 0;
  int max_draws_per_trial = 10000;

  void validate() const;
};

struct TrialOutcome {
  bool solved = false;
  std::vector<int> detected_L;  // sorted ascending
  double err_A = std::numeric_limits<double>::quiet_NaN();
  double err_terms = std::numeric_limits<double>::quiet_NaN();
  std::string failure;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<std::vector<int>> candidates;  // sorted L-tuples consistent with R and sum L
  std::vector<std::vector<int>> freq;        // [candidate][snr]
  std::vector<int> other;                    // detected tuple outside the candidate set, per snr
  std::vector<int> failed;                   // solver raised, per snr
  std::vector<double> mean_err_A, median_err_A, mean_err_terms, median_err_terms;
  long long rejected_draws = 0;
  std::vector<std::vector<TrialOutcome>> outcomes;  // [snr][trial]

  int frequency_of(const std::vector<int>& sorted_L, std::size_t snr_index) const;
};

// Sorted L-tuples whose d-tuples share sum d = R K - (R-1) sum L.
std::vector<std::vector<int>> candidate_L_tuples(int R, int K, int sum_L);

// max(cond T_(1), cond T_(3)) using the min(rows, cols)-th singular value.
double unfolding_condition(const Tensor3<double>& t);

// Derives an independent 64-bit seed from a base seed and a list of indices.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

// CSV: header "L,<snr>,<snr>..." then one row per candidate, then "other" and "failed".
void write_frequency_csv(std::ostream& os, const ExperimentResult& r);
// CSV: snr_db,trials,solved,mean_err_A,median_err_A,mean_err_terms,median_err_terms
void write_error_csv(std::ostream& os, const ExperimentResult& r);

std::string format_snr(double snr_db);
std::string format_tuple(const std::vector<int>& L);

}  // namespace btd
