#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vpr/inference.hpp"
#include "vpr/map_model.hpp"
#include "vpr/sensor_model.hpp"

namespace vpr {

struct HmmModel {
  TransitionMatrix transition;
  ConfusionBase confusion;
  ObservationMatrix observation;

  int size() const { return transition.size(); }
};

HmmModel build_model(const RoadGraph& graph, NoiseSpec noise,
                     double diagonal_target = kDefaultDiagonalTarget);

/// "default" selects generate_default_map(); anything else is a map file path.
RoadGraph load_map_source(const std::string& source);

struct TrajectorySample {
  NodeId initial_state = 0;
  std::vector<NodeId> true_states;   // x_1..x_T
  std::vector<NodeId> measurements;  // y_1..y_T
};

/// x_k ~ column x_{k-1} of A, y_k ~ column x_k of obs, by inverse CDF in
/// ascending id order from an mt19937_64 stream seeded with `seed`.
TrajectorySample sample_trajectory(const TransitionMatrix& transition, const ObservationMatrix& obs,
                                   NodeId initial_state, int steps, std::uint64_t seed);

/// Fraction of positions where the estimate equals the true state.
double accuracy(std::span<const NodeId> true_states, std::span<const NodeId> estimates);

/// Seed of trial t: splitmix64(splitmix64(master_seed) ^ t).
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial);

struct TrialOutcome {
  std::uint64_t seed = 0;
  TrajectorySample sample;
  std::vector<NodeId> filter_estimates;
  std::vector<NodeId> smoother_estimates;
  double filter_accuracy = 0.0;
  double smoother_accuracy = 0.0;
};

TrialOutcome run_trial(const HmmModel& model, NodeId initial_state, int steps, std::uint64_t seed);

struct ExperimentConfig {
  NodeId initial_state = 5;
  double sigma = 1.0;
  int steps = 50;
  int trials = 1;
  std::uint64_t master_seed = 0;
  std::string map_source = "default";
  /// Worker threads; 0 picks std::thread::hardware_concurrency(). Results do
  /// not depend on it.
  int threads = 1;
};

struct ExperimentResult {
  std::vector<double> filter_accuracy;
  std::vector<double> smoother_accuracy;
  std::vector<std::uint64_t> seeds;
  double filter_mean = 0.0;
  double filter_std = 0.0;
  double smoother_mean = 0.0;
  double smoother_std = 0.0;

  bool operator==(const ExperimentResult&) const = default;
};

/// Runs trials 0..trials-1 in parallel; outcomes are returned in trial order.
/// Errors are rethrown as std::runtime_error naming the failing trial.
std::vector<TrialOutcome> run_trials(const HmmModel& model, const ExperimentConfig& config);

ExperimentResult summarize(std::span<const TrialOutcome> outcomes);

ExperimentResult run_experiment(const HmmModel& model, const ExperimentConfig& config);
ExperimentResult run_experiment(const ExperimentConfig& config);

struct Table1Row {
  std::string label;
  NodeId initial_state = 0;
  double sigma = 0.0;
  double reference_filter = 0.0;
  double reference_smoother = 0.0;
  ExperimentResult result;
};

/// The three reference scenarios (start 5 / sigma 1, start 5 / sigma 2,
/// start 90 / sigma 1) at T = 50 on the default map.
std::vector<Table1Row> replicate_table1(std::uint64_t master_seed, int trials, int threads = 1);

/// Calls body(i) for i in [0, count) on `threads` workers. The first
/// exception thrown by any worker is rethrown after all workers join.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace vpr
