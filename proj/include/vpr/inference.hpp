#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vpr/map_model.hpp"
#include "vpr/sensor_model.hpp"

namespace vpr {

/// Probability mass function over states 1..M (stored 0-based).
using BeliefVector = Eigen::VectorXd;

/// One likelihood vector per measurement: component i is p(y_k | X_k = i).
using LikelihoodSequence = std::vector<Eigen::VectorXd>;

/// A measurement that has zero probability under the model, or malformed
/// inputs. `step()` is the 1-based measurement index (0 when not step-specific).
class InferenceError : public std::runtime_error {
 public:
  InferenceError(const std::string& what, std::size_t step)
      : std::runtime_error(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

struct FilterStepResult {
  BeliefVector posterior;
  /// N_k = sum_i likelihood_i * (A prior)_i
  double normalizer = 0.0;
};

/// Prediction through A followed by the measurement update.
FilterStepResult filter_step(const BeliefVector& prior, const TransitionMatrix& transition,
                             const Eigen::VectorXd& likelihood);

struct FilterRun {
  std::vector<BeliefVector> beliefs;
  double log_likelihood = 0.0;
};

LikelihoodSequence likelihoods_for(const ObservationMatrix& obs, std::span<const NodeId> measurements);

FilterRun run_filter(const TransitionMatrix& transition, const LikelihoodSequence& likelihoods,
                     const InitialBelief& initial);
FilterRun run_filter(const TransitionMatrix& transition, const ObservationMatrix& obs,
                     std::span<const NodeId> measurements, const InitialBelief& initial);

/// Per-step normalized forward or backward messages.
///
/// Forward: vectors[k] is alpha_{k+1} / sum(alpha_{k+1}) and
/// log_scale_factors[k] is log N_{k+1}; alpha_{k+1} is recovered by scaling
/// with exp of the prefix sum of factors up to k.
///
/// Backward: vectors[k] is beta_{k+1} normalized; beta is recovered with the
/// suffix sum of factors from k to T-1. The last factor is log M, the mass of
/// the all-ones terminal message.
struct ScaledMessages {
  enum class Direction { kForward, kBackward };

  Direction direction = Direction::kForward;
  std::vector<Eigen::VectorXd> vectors;
  std::vector<double> log_scale_factors;

  std::size_t length() const { return vectors.size(); }

  /// Natural log of the factor that turns vectors[k] back into the
  /// unnormalized message.
  double cumulative_log_scale(std::size_t k) const;
  Eigen::VectorXd unnormalized(std::size_t k) const;
};

ScaledMessages forward_pass(const TransitionMatrix& transition, const LikelihoodSequence& likelihoods,
                            const InitialBelief& initial);
ScaledMessages forward_pass(const TransitionMatrix& transition, const ObservationMatrix& obs,
                            std::span<const NodeId> measurements, const InitialBelief& initial);

/// beta_{k-1} = A' B(y_k) beta_k with beta_T = 1.
ScaledMessages backward_pass(const TransitionMatrix& transition, const LikelihoodSequence& likelihoods);
ScaledMessages backward_pass(const TransitionMatrix& transition, const ObservationMatrix& obs,
                             std::span<const NodeId> measurements);

/// gamma_k proportional to alpha_k * beta_k elementwise.
std::vector<BeliefVector> smooth(const ScaledMessages& forward, const ScaledMessages& backward);

/// argmax, ties to the smallest id. Returns a 1-based id.
NodeId map_estimate(const BeliefVector& belief);

struct InferenceResult {
  std::vector<BeliefVector> filtered;
  std::vector<BeliefVector> smoothed;
  double log_likelihood = 0.0;
};

InferenceResult infer(const TransitionMatrix& transition, const LikelihoodSequence& likelihoods,
                      const InitialBelief& initial);
InferenceResult infer(const TransitionMatrix& transition, const ObservationMatrix& obs,
                      std::span<const NodeId> measurements, const InitialBelief& initial);

}  // namespace vpr
