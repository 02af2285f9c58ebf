#include "vpr/inference.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace vpr {
namespace {

void check_likelihoods(const LikelihoodSequence& likelihoods, int m) {
  for (std::size_t k = 0; k < likelihoods.size(); ++k) {
    const auto& l = likelihoods[k];
    if (l.size() != m) {
      throw InferenceError("likelihood vector has " + std::to_string(l.size()) +
                               " entries, model has " + std::to_string(m) + " states",
                           k + 1);
    }
    if (!l.allFinite() || (l.array() < 0.0).any()) {
      throw InferenceError("likelihood vector has negative or non-finite entries", k + 1);
    }
  }
}

void check_initial(const TransitionMatrix& transition, const InitialBelief& initial) {
  if (initial.size() != transition.size()) {
    throw InferenceError("initial belief has " + std::to_string(initial.size()) +
                             " states, transition matrix has " + std::to_string(transition.size()),
                         0);
  }
}

}  // namespace

FilterStepResult filter_step(const BeliefVector& prior, const TransitionMatrix& transition,
                             const Eigen::VectorXd& likelihood) {
  const Eigen::VectorXd unnormalized =
      likelihood.cwiseProduct(transition.matrix() * prior);
  const double n = unnormalized.sum();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw InferenceError("measurement impossible under model", 0);
  }
  return {unnormalized / n, n};
}

LikelihoodSequence likelihoods_for(const ObservationMatrix& obs,
                                   std::span<const NodeId> measurements) {
  LikelihoodSequence out;
  out.reserve(measurements.size());
  for (std::size_t k = 0; k < measurements.size(); ++k) {
    try {
      out.push_back(likelihood_vector(obs, measurements[k]));
    } catch (const std::out_of_range& e) {
      throw InferenceError(e.what(), k + 1);
    }
  }
  return out;
}

FilterRun run_filter(const TransitionMatrix& transition, const LikelihoodSequence& likelihoods,
                     const InitialBelief& initial) {
  check_initial(transition, initial);
  check_likelihoods(likelihoods, transition.size());
  FilterRun run;
  run.beliefs.reserve(likelihoods.size());
  BeliefVector belief = initial.probabilities();
  for (std::size_t k = 0; k < likelihoods.size(); ++k) {
    FilterStepResult step;
    try {
      step = filter_step(belief, transition, likelihoods[k]);
    } catch (const InferenceError& e) {
      throw InferenceError(std::string(e.what()) + " at step " + std::to_string(k + 1), k + 1);
    }
    run.log_likelihood += std::log(step.normalizer);
    belief = std::move(step.posterior);
    run.beliefs.push_back(belief);
  }
  return run;
}

FilterRun run_filter(const TransitionMatrix& transition, const ObservationMatrix& obs,
                     std::span<const NodeId> measurements, const InitialBelief& initial) {
  return run_filter(transition, likelihoods_for(obs, measurements), initial);
}

double ScaledMessages::cumulative_log_scale(std::size_t k) const {
  if (k >= length()) throw std::out_of_range("message index out of range");
  if (direction == Direction::kForward) {
    return std::accumulate(log_scale_factors.begin(),
                           log_scale_factors.begin() + static_cast<std::ptrdiff_t>(k) + 1, 0.0);
  }
  return std::accumulate(log_scale_factors.begin() + static_cast<std::ptrdiff_t>(k),
                         log_scale_factors.end(), 0.0);
}

Eigen::VectorXd ScaledMessages::unnormalized(std::size_t k) const {
  return vectors.at(k) * std::exp(cumulative_log_scale(k));
}

ScaledMessages forward_pass(const TransitionMatrix& transition, const LikelihoodSequence& likelihoods,
                            const InitialBelief& initial) {
  check_initial(transition, initial);
  check_likelihoods(likelihoods, transition.size());
  ScaledMessages out;
  out.direction = ScaledMessages::Direction::kForward;
  out.vectors.reserve(likelihoods.size());
  out.log_scale_factors.reserve(likelihoods.size());

  Eigen::VectorXd alpha = initial.probabilities();
  for (std::size_t k = 0; k < likelihoods.size(); ++k) {
    const Eigen::VectorXd u = likelihoods[k].cwiseProduct(transition.matrix() * alpha);
    const double c = u.sum();
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw InferenceError("measurement impossible under model at step " + std::to_string(k + 1),
                           k + 1);
    }
    alpha = u / c;
    out.vectors.push_back(alpha);
    out.log_scale_factors.push_back(std::log(c));
  }
  return out;
}

ScaledMessages forward_pass(const TransitionMatrix& transition, const ObservationMatrix& obs,
                            std::span<const NodeId> measurements, const InitialBelief& initial) {
  return forward_pass(transition, likelihoods_for(obs, measurements), initial);
}

ScaledMessages backward_pass(const TransitionMatrix& transition, const LikelihoodSequence& likelihoods) {
  const int m = transition.size();
  check_likelihoods(likelihoods, m);
  const std::size_t t = likelihoods.size();
  ScaledMessages out;
  out.direction = ScaledMessages::Direction::kBackward;
  out.vectors.resize(t);
  out.log_scale_factors.resize(t);
  if (t == 0) return out;

  out.vectors[t - 1] = Eigen::VectorXd::Constant(m, 1.0 / m);
  out.log_scale_factors[t - 1] = std::log(static_cast<double>(m));
  for (std::size_t k = t - 1; k > 0; --k) {
    // vectors[k] holds beta_{k+1}; this produces beta_k from y_{k+1}.
    const Eigen::VectorXd u =
        transition.matrix().transpose() * likelihoods[k].cwiseProduct(out.vectors[k]);
    const double c = u.sum();
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw InferenceError("measurement impossible under model at step " + std::to_string(k + 1),
                           k + 1);
    }
    out.vectors[k - 1] = u / c;
    out.log_scale_factors[k - 1] = std::log(c);
  }
  return out;
}

ScaledMessages backward_pass(const TransitionMatrix& transition, const ObservationMatrix& obs,
                             std::span<const NodeId> measurements) {
  return backward_pass(transition, likelihoods_for(obs, measurements));
}

std::vector<BeliefVector> smooth(const ScaledMessages& forward, const ScaledMessages& backward) {
  if (forward.length() != backward.length()) {
    throw InferenceError("forward and backward messages differ in length", 0);
  }
  std::vector<BeliefVector> out;
  out.reserve(forward.length());
  for (std::size_t k = 0; k < forward.length(); ++k) {
    if (forward.vectors[k].size() != backward.vectors[k].size()) {
      throw InferenceError("forward and backward messages differ in dimension", k + 1);
    }
    const Eigen::VectorXd product = forward.vectors[k].cwiseProduct(backward.vectors[k]);
    const double total = product.sum();
    if (!(total > 0.0) || !std::isfinite(total)) {
      throw InferenceError("forward and backward messages have disjoint support", k + 1);
    }
    out.push_back(product / total);
  }
  return out;
}

NodeId map_estimate(const BeliefVector& belief) {
  if (belief.size() == 0) throw std::invalid_argument("map_estimate: empty belief");
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < belief.size(); ++i) {
    if (belief[i] > belief[best]) best = i;
  }
  return static_cast<NodeId>(best) + 1;
}

InferenceResult infer(const TransitionMatrix& transition, const LikelihoodSequence& likelihoods,
                      const InitialBelief& initial) {
  const ScaledMessages fwd = forward_pass(transition, likelihoods, initial);
  const ScaledMessages bwd = backward_pass(transition, likelihoods);
  InferenceResult result;
  result.smoothed = smooth(fwd, bwd);
  result.log_likelihood =
      std::accumulate(fwd.log_scale_factors.begin(), fwd.log_scale_factors.end(), 0.0);
  result.filtered = fwd.vectors;
  return result;
}

InferenceResult infer(const TransitionMatrix& transition, const ObservationMatrix& obs,
                      std::span<const NodeId> measurements, const InitialBelief& initial) {
  return infer(transition, likelihoods_for(obs, measurements), initial);
}

}  // namespace vpr
