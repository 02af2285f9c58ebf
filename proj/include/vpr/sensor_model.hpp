#pragma once

#include <Eigen/Dense>

#include "vpr/map_model.hpp"

namespace vpr {

/// Standard deviation of the superimposed Gaussian, in node-index units.
class NoiseSpec {
 public:
  explicit NoiseSpec(double sigma);
  double sigma() const { return sigma_; }

 private:
  double sigma_;
};

/// Preset discrete observation probabilities P_c; entry (j, i) = P_c(y = j | x = i).
class ConfusionBase {
 public:
  explicit ConfusionBase(Eigen::MatrixXd entries);

  int size() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& matrix() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
};

/// Entry (j, i) = P(y = j | x = i). Column-stochastic.
class ObservationMatrix {
 public:
  explicit ObservationMatrix(Eigen::MatrixXd entries);

  int size() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& matrix() const { return entries_; }

 private:
  Eigen::MatrixXd entries_;
};

inline constexpr double kDefaultDiagonalTarget = 0.7;

/// Every state observes itself with probability `diagonal_target`; the rest of
/// its column is split evenly over the states adjacent to it in either
/// direction. A state with no neighbours observes itself with certainty.
/// Requires 0.5 < diagonal_target < 1.
ConfusionBase build_confusion_base(const RoadGraph& graph,
                                   double diagonal_target = kDefaultDiagonalTarget);

/// Normal density of the index distance j - i with standard deviation sigma.
double gaussian_kernel(NodeId j, NodeId i, double sigma);

/// Adds the Gaussian kernel over all states to each column of the base and
/// renormalizes: (P_c(j, i) + g(j, i)) / (1 + sum_j g(j, i)).
ObservationMatrix apply_gaussian_noise(const ConfusionBase& base, NoiseSpec noise);

/// Diagonal of B(y): component i is P(y | X = i). Throws std::out_of_range.
Eigen::VectorXd likelihood_vector(const ObservationMatrix& obs, NodeId y);

}  // namespace vpr
