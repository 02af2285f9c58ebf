#include "vpr/experiment.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "vpr/io.hpp"
#include "vpr/stochastic.hpp"

namespace vpr {
namespace {

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

HmmModel build_model(const RoadGraph& graph, NoiseSpec noise, double diagonal_target) {
  ConfusionBase base = build_confusion_base(graph, diagonal_target);
  ObservationMatrix obs = apply_gaussian_noise(base, noise);
  return {build_transition_matrix(graph), std::move(base), std::move(obs)};
}

RoadGraph load_map_source(const std::string& source) {
  if (source == "default") return generate_default_map();
  return load_map(read_text_file(source));
}

TrajectorySample sample_trajectory(const TransitionMatrix& transition, const ObservationMatrix& obs,
                                   NodeId initial_state, int steps, std::uint64_t seed) {
  if (transition.size() != obs.size()) throw std::invalid_argument("model size mismatch");
  if (initial_state < 1 || initial_state > transition.size()) {
    throw std::invalid_argument("initial state " + std::to_string(initial_state) + " out of range");
  }
  if (steps < 0) throw std::invalid_argument("steps must be nonnegative");

  Rng rng(seed);
  TrajectorySample out;
  out.initial_state = initial_state;
  out.true_states.reserve(static_cast<std::size_t>(steps));
  out.measurements.reserve(static_cast<std::size_t>(steps));
  NodeId x = initial_state;
  for (int k = 0; k < steps; ++k) {
    x = rng.categorical(transition.matrix().col(x - 1)) + 1;
    out.true_states.push_back(x);
    out.measurements.push_back(rng.categorical(obs.matrix().col(x - 1)) + 1);
  }
  return out;
}

double accuracy(std::span<const NodeId> true_states, std::span<const NodeId> estimates) {
  if (true_states.size() != estimates.size()) {
    throw std::invalid_argument("accuracy: length mismatch (" + std::to_string(true_states.size()) +
                                " vs " + std::to_string(estimates.size()) + ")");
  }
  if (true_states.empty()) throw std::invalid_argument("accuracy: empty sequence");
  std::size_t hits = 0;
  for (std::size_t k = 0; k < true_states.size(); ++k) hits += true_states[k] == estimates[k];
  return static_cast<double>(hits) / static_cast<double>(true_states.size());
}

std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t trial) {
  return splitmix64(splitmix64(master_seed) ^ trial);
}

TrialOutcome run_trial(const HmmModel& model, NodeId initial_state, int steps, std::uint64_t seed) {
  TrialOutcome out;
  out.seed = seed;
  out.sample = sample_trajectory(model.transition, model.observation, initial_state, steps, seed);
  const InferenceResult inferred =
      infer(model.transition, model.observation, out.sample.measurements,
            InitialBelief::point_mass(model.size(), initial_state));
  for (const auto& b : inferred.filtered) out.filter_estimates.push_back(map_estimate(b));
  for (const auto& b : inferred.smoothed) out.smoother_estimates.push_back(map_estimate(b));
  out.filter_accuracy = accuracy(out.sample.true_states, out.filter_estimates);
  out.smoother_accuracy = accuracy(out.sample.true_states, out.smoother_estimates);
  return out;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next = count;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<TrialOutcome> run_trials(const HmmModel& model, const ExperimentConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (config.steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (config.initial_state < 1 || config.initial_state > model.size()) {
    throw std::invalid_argument("initial state " + std::to_string(config.initial_state) +
                                " not in map of " + std::to_string(model.size()) + " nodes");
  }
  std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(config.trials));
  parallel_for(outcomes.size(), config.threads, [&](std::size_t t) {
    try {
      outcomes[t] = run_trial(model, config.initial_state, config.steps,
                              trial_seed(config.master_seed, t));
    } catch (const std::exception& e) {
      throw std::runtime_error("trial " + std::to_string(t) + ": " + e.what());
    }
  });
  return outcomes;
}

ExperimentResult summarize(std::span<const TrialOutcome> outcomes) {
  ExperimentResult r;
  for (const auto& o : outcomes) {
    r.filter_accuracy.push_back(o.filter_accuracy);
    r.smoother_accuracy.push_back(o.smoother_accuracy);
    r.seeds.push_back(o.seed);
  }
  r.filter_mean = mean_of(r.filter_accuracy);
  r.filter_std = sample_std(r.filter_accuracy, r.filter_mean);
  r.smoother_mean = mean_of(r.smoother_accuracy);
  r.smoother_std = sample_std(r.smoother_accuracy, r.smoother_mean);
  return r;
}

ExperimentResult run_experiment(const HmmModel& model, const ExperimentConfig& config) {
  const auto outcomes = run_trials(model, config);
  return summarize(outcomes);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const HmmModel model = build_model(load_map_source(config.map_source), NoiseSpec(config.sigma));
  return run_experiment(model, config);
}

std::vector<Table1Row> replicate_table1(std::uint64_t master_seed, int trials, int threads) {
  std::vector<Table1Row> rows = {
      {"Initial state=5 Sigma = 1", 5, 1.0, 0.76, 0.88, {}},
      {"Initial state=5 Sigma = 2", 5, 2.0, 0.68, 0.82, {}},
      {"Initial state=90 Sigma = 1", 90, 1.0, 0.76, 0.82, {}},
  };
  const RoadGraph graph = generate_default_map();
  for (auto& row : rows) {
    ExperimentConfig config;
    config.initial_state = row.initial_state;
    config.sigma = row.sigma;
    config.steps = 50;
    config.trials = trials;
    config.master_seed = master_seed;
    config.threads = threads;
    row.result = run_experiment(build_model(graph, NoiseSpec(row.sigma)), config);
  }
  return rows;
}

}  // namespace vpr
