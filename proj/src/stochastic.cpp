#include "vpr/stochastic.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

namespace vpr {

double max_column_deviation(const Eigen::MatrixXd& m) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    worst = std::max(worst, std::abs(m.col(j).sum() - 1.0));
  }
  return worst;
}

void require_column_stochastic(const Eigen::MatrixXd& m, std::string_view what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square and non-empty");
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double p = m(i, j);
      if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
        std::ostringstream os;
        os << what << ": entry (" << i + 1 << ", " << j + 1 << ") = " << p << " outside [0, 1]";
        throw std::invalid_argument(os.str());
      }
    }
    const double dev = std::abs(m.col(j).sum() - 1.0);
    if (dev > kStochasticTolerance) {
      std::ostringstream os;
      os.precision(17);
      os << what << ": column " << j + 1 << " sums to " << m.col(j).sum();
      throw std::invalid_argument(os.str());
    }
  }
}

void require_distribution(const Eigen::VectorXd& v, std::string_view what) {
  if (v.size() == 0) {
    throw std::invalid_argument(std::string(what) + ": empty distribution");
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i]) || v[i] < 0.0) {
      std::ostringstream os;
      os << what << ": entry " << i + 1 << " = " << v[i] << " is not a probability";
      throw std::invalid_argument(os.str());
    }
  }
  if (std::abs(v.sum() - 1.0) > kStochasticTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": sums to " << v.sum() << ", expected 1";
    throw std::invalid_argument(os.str());
  }
}

int Rng::categorical(const Eigen::Ref<const Eigen::VectorXd>& probabilities) {
  const double u = uniform();
  double cumulative = 0.0;
  int last_positive = -1;
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    if (probabilities[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    cumulative += probabilities[i];
    if (u < cumulative) return last_positive;
  }
  // Rounding can leave the cumulative sum a hair under u.
  if (last_positive < 0) throw std::invalid_argument("categorical: no positive mass");
  return last_positive;
}

}  // namespace vpr
