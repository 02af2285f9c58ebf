#include "vpr/oracle.hpp"

#include <cmath>
#include <string>

#include "vpr/experiment.hpp"
#include "vpr/stochastic.hpp"

namespace vpr {

EnumeratedPosteriors enumerate_posteriors(const TransitionMatrix& transition,
                                          const LikelihoodSequence& likelihoods,
                                          const InitialBelief& initial, EnumerationBudget budget) {
  const int m = transition.size();
  const std::size_t t = likelihoods.size();
  if (initial.size() != m) throw std::invalid_argument("initial belief size mismatch");
  for (const auto& l : likelihoods) {
    if (l.size() != m) throw std::invalid_argument("likelihood size mismatch");
  }

  std::uint64_t paths = 1;
  for (std::size_t k = 0; k < t; ++k) {
    if (paths > budget.max_paths / static_cast<std::uint64_t>(m)) {
      throw BudgetExceeded(std::to_string(m) + "^" + std::to_string(t) +
                           " paths exceeds enumeration budget of " +
                           std::to_string(budget.max_paths));
    }
    paths *= static_cast<std::uint64_t>(m);
  }

  EnumeratedPosteriors out;
  out.filtered.assign(t, Eigen::VectorXd::Zero(m));
  out.smoothed.assign(t, Eigen::VectorXd::Zero(m));
  if (t == 0) return out;

  const Eigen::MatrixXd& a = transition.matrix();
  const Eigen::VectorXd& pi0 = initial.probabilities();

  // Odometer over x_1..x_T (0-based digits).
  std::vector<int> path(t, 0);
  std::vector<double> emission_prefix(t);
  double evidence = 0.0;
  for (std::uint64_t p = 0; p < paths; ++p) {
    double prior_x1 = 0.0;
    for (int x0 = 0; x0 < m; ++x0) prior_x1 += pi0[x0] * a(path[0], x0);

    double transitions = prior_x1;
    for (std::size_t k = 1; k < t; ++k) transitions *= a(path[k], path[k - 1]);

    double emissions = 1.0;
    for (std::size_t k = 0; k < t; ++k) {
      emissions *= likelihoods[k][path[k]];
      emission_prefix[k] = emissions;
    }

    // Trailing transitions marginalize to one, so weighting the full path by
    // the first k emissions yields p(x_k, y_1..y_k).
    for (std::size_t k = 0; k < t; ++k) {
      out.filtered[k][path[k]] += transitions * emission_prefix[k];
      out.smoothed[k][path[k]] += transitions * emissions;
    }
    evidence += transitions * emissions;

    for (std::size_t k = t; k-- > 0;) {
      if (++path[k] < m) break;
      path[k] = 0;
    }
  }

  for (std::size_t k = 0; k < t; ++k) {
    const double f = out.filtered[k].sum();
    const double s = out.smoothed[k].sum();
    if (!(f > 0.0) || !(s > 0.0)) {
      throw InferenceError("measurement sequence has zero probability", k + 1);
    }
    out.filtered[k] /= f;
    out.smoothed[k] /= s;
  }
  out.evidence = evidence;
  return out;
}

EnumeratedPosteriors enumerate_posteriors(const TransitionMatrix& transition,
                                          const ObservationMatrix& obs,
                                          const InitialBelief& initial,
                                          std::span<const NodeId> measurements,
                                          EnumerationBudget budget) {
  LikelihoodSequence likelihoods;
  for (NodeId y : measurements) likelihoods.push_back(likelihood_vector(obs, y));
  return enumerate_posteriors(transition, likelihoods, initial, budget);
}

namespace {

Eigen::MatrixXd random_stochastic(Rng& rng, int m) {
  Eigen::MatrixXd a(m, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) {
      const double u = rng.uniform();
      a(i, j) = (i != j && rng.uniform() < 0.3) ? 0.0 : u + 1e-3;
    }
    a.col(j) /= a.col(j).sum();
  }
  return a;
}

}  // namespace

RandomInstance random_instance(std::uint64_t seed, int num_states, int steps) {
  if (num_states < 1 || steps < 0) throw std::invalid_argument("random_instance: bad dimensions");
  Rng rng(seed);
  TransitionMatrix a(random_stochastic(rng, num_states));
  ObservationMatrix obs(random_stochastic(rng, num_states));
  Eigen::VectorXd pi0(num_states);
  for (int i = 0; i < num_states; ++i) pi0[i] = rng.uniform() + 1e-3;
  pi0 /= pi0.sum();
  InitialBelief initial(pi0);
  // x_0 drawn from pi_0, then the usual generative process.
  const NodeId x0 = rng.categorical(pi0) + 1;
  auto sample = sample_trajectory(a, obs, x0, steps, splitmix64(seed));
  return {std::move(a), std::move(obs), std::move(initial), std::move(sample.measurements)};
}

OracleComparison compare_with_oracle(const RandomInstance& instance) {
  const auto exact = enumerate_posteriors(instance.transition, instance.observation, instance.initial,
                                          instance.measurements);
  const auto fast = infer(instance.transition, instance.observation, instance.measurements,
                          instance.initial);
  OracleComparison cmp;
  for (std::size_t k = 0; k < exact.filtered.size(); ++k) {
    cmp.max_filtered_error = std::max(
        cmp.max_filtered_error, (exact.filtered[k] - fast.filtered[k]).cwiseAbs().maxCoeff());
    cmp.max_smoothed_error = std::max(
        cmp.max_smoothed_error, (exact.smoothed[k] - fast.smoothed[k]).cwiseAbs().maxCoeff());
  }
  cmp.evidence_relative_error =
      std::abs(std::exp(fast.log_likelihood) - exact.evidence) / exact.evidence;
  if (!fast.filtered.empty()) {
    cmp.final_step_gap = (fast.smoothed.back() - fast.filtered.back()).cwiseAbs().maxCoeff();
  }
  return cmp;
}

}  // namespace vpr
