#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "vpr/inference.hpp"

namespace vpr {

/// Reference posteriors by explicit summation over every state path. Only
/// meant for tiny models; it shares no code with the recursive filter.

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EnumerationBudget {
  std::uint64_t max_paths = 10'000'000;
};

struct EnumeratedPosteriors {
  std::vector<BeliefVector> filtered;
  std::vector<BeliefVector> smoothed;
  /// p(y_1..y_T); 1 for an empty sequence.
  double evidence = 1.0;
};

EnumeratedPosteriors enumerate_posteriors(const TransitionMatrix& transition,
                                          const LikelihoodSequence& likelihoods,
                                          const InitialBelief& initial,
                                          EnumerationBudget budget = {});
EnumeratedPosteriors enumerate_posteriors(const TransitionMatrix& transition,
                                          const ObservationMatrix& obs,
                                          const InitialBelief& initial,
                                          std::span<const NodeId> measurements,
                                          EnumerationBudget budget = {});

/// A small random model with a measurement sequence drawn from it, so the
/// sequence always has positive probability.
struct RandomInstance {
  TransitionMatrix transition;
  ObservationMatrix observation;
  InitialBelief initial;
  std::vector<NodeId> measurements;
};

/// Columns are uniform draws normalized to one; roughly a third of the
/// off-diagonal entries are zeroed to exercise sparse supports.
RandomInstance random_instance(std::uint64_t seed, int num_states, int steps);

struct OracleComparison {
  double max_filtered_error = 0.0;   // L-infinity
  double max_smoothed_error = 0.0;   // L-infinity
  double evidence_relative_error = 0.0;
  double final_step_gap = 0.0;       // |smoothed[T] - filtered[T]|_inf
};

OracleComparison compare_with_oracle(const RandomInstance& instance);

}  // namespace vpr
