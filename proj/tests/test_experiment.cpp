#include <gtest/gtest.h>

#include <cmath>

#include "support/multinomial_band.hpp"
#include "vpr/experiment.hpp"
#include "vpr/stochastic.hpp"

using namespace vpr;

namespace {

const HmmModel& default_model() {
  static const HmmModel model = build_model(generate_default_map(), NoiseSpec(1.0));
  return model;
}

}  // namespace

TEST(SampleTrajectory, DeterministicAndStartsAtInitialState) {
  const auto& m = default_model();
  const auto a = sample_trajectory(m.transition, m.observation, 5, 50, 123);
  const auto b = sample_trajectory(m.transition, m.observation, 5, 50, 123);
  EXPECT_EQ(a.true_states, b.true_states);
  EXPECT_EQ(a.measurements, b.measurements);
  EXPECT_EQ(a.initial_state, 5);
  ASSERT_EQ(a.true_states.size(), 50u);

  NodeId prev = a.initial_state;
  for (std::size_t k = 0; k < a.true_states.size(); ++k) {
    EXPECT_GT(m.transition.probability(a.true_states[k], prev), 0.0);
    EXPECT_GT(m.observation.matrix()(a.measurements[k] - 1, a.true_states[k] - 1), 0.0);
    prev = a.true_states[k];
  }
  const auto c = sample_trajectory(m.transition, m.observation, 5, 50, 124);
  EXPECT_NE(a.measurements, c.measurements);
}

TEST(SampleTrajectory, SingleStepFrequenciesMatchColumn) {
  const auto& m = default_model();
  for (NodeId state : {1, 40}) {
    std::vector<std::uint64_t> counts(105, 0);
    for (std::uint64_t s = 0; s < 100'000; ++s) {
      const auto t = sample_trajectory(m.transition, m.observation, state, 1, trial_seed(9, s));
      ++counts[static_cast<std::size_t>(t.true_states[0] - 1)];
    }
    const auto band = vpr::testing::multinomial_band(m.transition.matrix().col(state - 1), counts);
    EXPECT_TRUE(band.inside) << "state " << state << " worst z " << band.worst_z << " > "
                             << band.critical_z;
  }
}

TEST(Rng, CategoricalInverseCdf) {
  Rng rng(3);
  Eigen::Vector3d p(0.0, 1.0, 0.0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(rng.categorical(p), 1);
  EXPECT_THROW(rng.categorical(Eigen::Vector2d::Zero()), std::invalid_argument);
}

TEST(Accuracy, Fractions) {
  std::vector<NodeId> truth(50, 1);
  std::vector<NodeId> est = truth;
  EXPECT_EQ(accuracy(truth, est), 1.0);
  for (int k = 0; k < 12; ++k) est[static_cast<std::size_t>(k)] = 2;
  EXPECT_DOUBLE_EQ(accuracy(truth, est), 0.76);
  EXPECT_EQ(accuracy(std::vector<NodeId>{1, 2, 3}, std::vector<NodeId>{2, 3, 1}), 0.0);
  EXPECT_THROW(accuracy(std::vector<NodeId>{1}, std::vector<NodeId>{1, 2}), std::invalid_argument);
  EXPECT_THROW(accuracy(std::vector<NodeId>{}, std::vector<NodeId>{}), std::invalid_argument);
}

TEST(TrialSeed, DistinctAndStable) {
  EXPECT_EQ(trial_seed(0, 0), splitmix64(splitmix64(0) ^ 0));
  EXPECT_NE(trial_seed(0, 0), trial_seed(0, 1));
  EXPECT_NE(trial_seed(0, 1), trial_seed(1, 0));
}

TEST(RunExperiment, SingleStateMapIsAlwaysRight) {
  const RoadGraph g(1, {{1, 1, 1.0}});
  const auto model = build_model(g, NoiseSpec(1.0));
  ExperimentConfig c;
  c.initial_state = 1;
  c.trials = 1;
  c.steps = 10;
  const auto r = run_experiment(model, c);
  EXPECT_EQ(r.filter_mean, 1.0);
  EXPECT_EQ(r.smoother_mean, 1.0);
}

TEST(RunExperiment, DeterministicAcrossThreadCounts) {
  ExperimentConfig c;
  c.trials = 64;
  c.master_seed = 31;
  c.threads = 1;
  const auto serial = run_experiment(default_model(), c);
  c.threads = 4;
  const auto parallel = run_experiment(default_model(), c);
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(run_experiment(default_model(), c), parallel);
}

TEST(RunExperiment, SummaryConsistentWithTrials) {
  ExperimentConfig c;
  c.trials = 40;
  c.master_seed = 8;
  const auto r = run_experiment(default_model(), c);
  ASSERT_EQ(r.filter_accuracy.size(), 40u);
  double sum = 0.0;
  for (std::size_t t = 0; t < 40; ++t) {
    EXPECT_EQ(r.seeds[t], trial_seed(8, t));
    for (double acc : {r.filter_accuracy[t], r.smoother_accuracy[t]}) {
      EXPECT_GE(acc, 0.0);
      EXPECT_LE(acc, 1.0);
      EXPECT_NEAR(acc * 50, std::round(acc * 50), 1e-9);
    }
    sum += r.filter_accuracy[t];
  }
  EXPECT_NEAR(r.filter_mean, sum / 40, 1e-12);
  EXPECT_GT(r.filter_std, 0.0);
}

TEST(RunExperiment, PerfectSensorNeverMisses) {
  const RoadGraph g = generate_default_map();
  const HmmModel model{build_transition_matrix(g), build_confusion_base(g),
                       ObservationMatrix(Eigen::MatrixXd::Identity(105, 105))};
  ExperimentConfig c;
  c.trials = 20;
  const auto r = run_experiment(model, c);
  for (double acc : r.filter_accuracy) EXPECT_EQ(acc, 1.0);
  for (double acc : r.smoother_accuracy) EXPECT_EQ(acc, 1.0);
}

TEST(RunExperiment, InvalidConfig) {
  ExperimentConfig c;
  c.initial_state = 106;
  EXPECT_THROW(run_experiment(default_model(), c), std::invalid_argument);
  c.initial_state = 5;
  c.trials = 0;
  EXPECT_THROW(run_experiment(default_model(), c), std::invalid_argument);
  c.trials = 1;
  c.map_source = "/nonexistent/map.json";
  EXPECT_ANY_THROW(run_experiment(c));
}

TEST(ParallelFor, PropagatesErrors) {
  EXPECT_THROW(parallel_for(10, 3,
                            [](std::size_t i) {
                              if (i == 7) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(ReplicateTable1, ThreeRowsWithExpectedOrdering) {
  const auto rows = replicate_table1(0, 200, 2);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].initial_state, 5);
  EXPECT_EQ(rows[1].sigma, 2.0);
  EXPECT_EQ(rows[2].initial_state, 90);
  for (const auto& row : rows) {
    EXPECT_GE(row.result.smoother_mean, row.result.filter_mean) << row.label;
    EXPECT_EQ(row.result.filter_accuracy.size(), 200u);
  }
  EXPECT_LT(rows[1].result.filter_mean, rows[0].result.filter_mean);
  EXPECT_LT(rows[1].result.smoother_mean, rows[0].result.smoother_mean);
  EXPECT_DOUBLE_EQ(rows[0].reference_smoother, 0.88);
}
