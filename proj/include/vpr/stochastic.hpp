#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include <Eigen/Dense>

namespace vpr {

inline constexpr double kStochasticTolerance = 1e-12;

/// max_j |sum_i m(i, j) - 1|
double max_column_deviation(const Eigen::MatrixXd& m);

/// Throws std::invalid_argument naming `what` unless `m` is square, every
/// entry lies in [0, 1] and every column sums to 1 within kStochasticTolerance.
void require_column_stochastic(const Eigen::MatrixXd& m, std::string_view what);

/// Throws std::invalid_argument unless `v` is a finite, nonnegative vector
/// summing to 1 within kStochasticTolerance.
void require_distribution(const Eigen::VectorXd& v, std::string_view what);

/// splitmix64 finalizer (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic bit-exact generator. std::uniform_real_distribution is
/// implementation-defined, so doubles are built from the top 53 bits of
/// mt19937_64 instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Inverse-CDF draw from a probability vector, scanning indices in
  /// ascending order. Returns a 0-based index with positive mass.
  int categorical(const Eigen::Ref<const Eigen::VectorXd>& probabilities);

 private:
  std::mt19937_64 engine_;
};

}  // namespace vpr
