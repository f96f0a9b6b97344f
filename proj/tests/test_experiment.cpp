#include <gtest/gtest.h>

#include <sstream>

#include "btd/experiment.hpp"

using namespace btd;

TEST(Experiment, CandidateTuples) {
  auto c = candidate_L_tuples(3, 8, 9);
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0], (std::vector<int>{2, 2, 5}));
  EXPECT_EQ(c[1], (std::vector<int>{2, 3, 4}));
  EXPECT_EQ(c[2], (std::vector<int>{3, 3, 3}));
  EXPECT_EQ(candidate_L_tuples(4, 10, 10).size(), 9u);
}

TEST(Experiment, SeedsAreDeterministicAndDistinct) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
}

TEST(Experiment, ExactRunRecoversEverything) {
  ExperimentConfig cfg;
  cfg.I = 3;
  cfg.J = 8;
  cfg.K = 8;
  cfg.sizes = {2, 3, 4};
  cfg.snr_db = {kInfSnr, 50};
  cfg.num_trials = 6;
  cfg.seed = 5;
  auto r = run_experiment(cfg);
  EXPECT_EQ(r.frequency_of({4, 3, 2}, 0), 6);
  EXPECT_LT(r.median_err_A[0], 1e-8);
  EXPECT_LT(r.median_err_A[1], 1e-2);
  std::ostringstream f, e;
  write_frequency_csv(f, r);
  write_error_csv(e, r);
  EXPECT_EQ(f.str().substr(0, 11), "L,inf,50\n(2");
  int lines = 0;
  for (char ch : f.str()) lines += ch == '\n';
  EXPECT_EQ(lines, 1 + 3 + 2);
  EXPECT_NE(e.str().find("snr_db,trials,solved"), std::string::npos);
  auto again = run_experiment(cfg);
  EXPECT_EQ(again.median_err_A, r.median_err_A);
}

TEST(Experiment, ConditionCapRejects) {
  ExperimentConfig cfg;
  cfg.I = 3;
  cfg.J = 8;
  cfg.K = 8;
  cfg.sizes = {2, 3, 4};
  cfg.snr_db = {kInfSnr};
  cfg.num_trials = 2;
  cfg.cond_cap = 1.0;
  cfg.max_draws_per_trial = 3;
  EXPECT_THROW(run_experiment(cfg), Diagnostic);
  cfg.snr_db.clear();
  EXPECT_THROW(run_experiment(cfg), ArgumentError);
}
