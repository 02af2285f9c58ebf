#include "vpr/sensor_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

#include "vpr/stochastic.hpp"

namespace vpr {

NoiseSpec::NoiseSpec(double sigma) : sigma_(sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("sigma must be positive and finite, got " + std::to_string(sigma));
  }
}

ConfusionBase::ConfusionBase(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  require_column_stochastic(entries_, "confusion base");
}

ObservationMatrix::ObservationMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  require_column_stochastic(entries_, "observation matrix");
}

ConfusionBase build_confusion_base(const RoadGraph& graph, double diagonal_target) {
  if (!(diagonal_target > 0.5 && diagonal_target < 1.0)) {
    throw std::invalid_argument("diagonal_target must lie in (0.5, 1), got " +
                                std::to_string(diagonal_target));
  }
  const int m = graph.num_nodes();
  Eigen::MatrixXd base = Eigen::MatrixXd::Zero(m, m);
  for (NodeId i = 1; i <= m; ++i) {
    const auto neighbours = graph.neighbours(i);
    if (neighbours.empty()) {
      base(i - 1, i - 1) = 1.0;
      continue;
    }
    base(i - 1, i - 1) = diagonal_target;
    const double share = (1.0 - diagonal_target) / static_cast<double>(neighbours.size());
    for (NodeId j : neighbours) base(j - 1, i - 1) = share;
  }
  return ConfusionBase(std::move(base));
}

double gaussian_kernel(NodeId j, NodeId i, double sigma) {
  const double d = static_cast<double>(j - i) / sigma;
  return std::exp(-0.5 * d * d) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

ObservationMatrix apply_gaussian_noise(const ConfusionBase& base, NoiseSpec noise) {
  const int m = base.size();
  Eigen::MatrixXd out(m, m);
  for (NodeId i = 1; i <= m; ++i) {
    double kernel_mass = 0.0;
    for (NodeId j = 1; j <= m; ++j) {
      // Floored so far tails stay strictly positive after underflow.
      const double g = std::max(gaussian_kernel(j, i, noise.sigma()), std::numeric_limits<double>::min());
      out(j - 1, i - 1) = base.matrix()(j - 1, i - 1) + g;
      kernel_mass += g;
    }
    out.col(i - 1) /= 1.0 + kernel_mass;
  }
  return ObservationMatrix(std::move(out));
}

Eigen::VectorXd likelihood_vector(const ObservationMatrix& obs, NodeId y) {
  if (y < 1 || y > obs.size()) {
    throw std::out_of_range("measurement " + std::to_string(y) + " out of range 1.." +
                            std::to_string(obs.size()));
  }
  return obs.matrix().row(y - 1).transpose();
}

}  // namespace vpr
