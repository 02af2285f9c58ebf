#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "vpr/sensor_model.hpp"
#include "vpr/stochastic.hpp"

using namespace vpr;

namespace {

// Independent evaluation of the normal density.
double normal_pdf(double x, double sigma) {
  return std::exp(-x * x / (2.0 * sigma * sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

RoadGraph path_graph(int m) {
  std::vector<Edge> edges;
  for (NodeId n = 1; n <= m; ++n) {
    edges.push_back({n, n, 1.0});
    if (n < m) edges.push_back({n, n + 1, 1.0});
  }
  return RoadGraph(m, edges);
}

}  // namespace

TEST(ConfusionBase, SingleNode) {
  const auto base = build_confusion_base(RoadGraph(1, {{1, 1, 1.0}}));
  ASSERT_EQ(base.size(), 1);
  EXPECT_EQ(base.matrix()(0, 0), 1.0);
}

TEST(ConfusionBase, TwoNeighboursSplitRemainder) {
  const auto base = build_confusion_base(path_graph(5));
  // Node 3 neighbours 2 (incoming) and 4 (outgoing).
  EXPECT_DOUBLE_EQ(base.matrix()(2, 2), 0.7);
  EXPECT_DOUBLE_EQ(base.matrix()(1, 2), 0.15);
  EXPECT_DOUBLE_EQ(base.matrix()(3, 2), 0.15);
  EXPECT_EQ(base.matrix()(0, 2), 0.0);
  EXPECT_EQ(base.matrix()(4, 2), 0.0);
  EXPECT_NEAR(base.matrix().diagonal().mean(), 0.7, 1e-15);
}

TEST(ConfusionBase, RejectsBadTarget) {
  EXPECT_THROW(build_confusion_base(path_graph(3), 0.5), std::invalid_argument);
  EXPECT_THROW(build_confusion_base(path_graph(3), 1.0), std::invalid_argument);
}

TEST(GaussianKernel, MatchesNormalDensity) {
  EXPECT_NEAR(gaussian_kernel(4, 4, 1.0), 0.398942, 5e-7);
  EXPECT_NEAR(gaussian_kernel(5, 4, 1.0), 0.241971, 5e-7);
  EXPECT_NEAR(gaussian_kernel(4, 4, 2.0), 0.199471, 5e-7);
  for (int d = 0; d < 10; ++d) {
    for (double s : {0.3, 1.0, 2.0, 7.5}) {
      EXPECT_NEAR(gaussian_kernel(1 + d, 1, s), normal_pdf(d, s), 1e-15);
      EXPECT_EQ(gaussian_kernel(1 + d, 1, s), gaussian_kernel(1, 1 + d, s));
    }
  }
}

TEST(GaussianNoise, SingleStateStaysCertain) {
  const auto obs = apply_gaussian_noise(ConfusionBase(Eigen::MatrixXd::Ones(1, 1)), NoiseSpec(1.0));
  EXPECT_DOUBLE_EQ(obs.matrix()(0, 0), 1.0);
}

TEST(GaussianNoise, FiveNodeWorkedColumn) {
  // Hand evaluation: kernel mass over j = 1..5 around i = 3.
  const double g0 = normal_pdf(0, 1), g1 = normal_pdf(1, 1), g2 = normal_pdf(2, 1);
  const double expected = (0.7 + g0) / (1.0 + g0 + 2 * g1 + 2 * g2);
  EXPECT_NEAR(expected, 0.551992, 1e-6);

  const auto obs = apply_gaussian_noise(build_confusion_base(path_graph(5)), NoiseSpec(1.0));
  EXPECT_NEAR(obs.matrix()(2, 2), 0.551992, 1e-6);
  EXPECT_NEAR(obs.matrix()(2, 2), expected, 1e-15);
  EXPECT_NEAR(obs.matrix()(1, 2), (0.15 + g1) / (1.0 + g0 + 2 * g1 + 2 * g2), 1e-15);
}

TEST(GaussianNoise, ColumnsStochasticAndPositiveForRandomBases) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int m = 1 + static_cast<int>(gen() % 40);
    Eigen::MatrixXd raw(m, m);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < m; ++i) raw(i, j) = u(gen) < 0.5 ? 0.0 : u(gen);
      raw(j, j) += 0.1;
      raw.col(j) /= raw.col(j).sum();
    }
    const double sigma = 0.2 + 5.0 * u(gen);
    const auto obs = apply_gaussian_noise(ConfusionBase(raw), NoiseSpec(sigma));
    EXPECT_LE(max_column_deviation(obs.matrix()), 1e-12);
    EXPECT_GT(obs.matrix().minCoeff(), 0.0);
  }
}

TEST(GaussianNoise, HeavierTailsRaiseColumnMinimum) {
  // Sigma stays below every column's largest index distance, where the
  // kernel tail still grows with sigma.
  const auto check = [](int m, std::initializer_list<double> sigmas) {
    std::vector<Edge> edges;
    for (NodeId n = 1; n <= m; ++n) {
      edges.push_back({n, n, 1.0});
      edges.push_back({n, n % m + 1, 1.0});
    }
    const auto base = build_confusion_base(RoadGraph(m, edges));
    Eigen::VectorXd previous = Eigen::VectorXd::Zero(m);
    for (double sigma : sigmas) {
      const auto obs = apply_gaussian_noise(base, NoiseSpec(sigma));
      for (int i = 0; i < m; ++i) {
        const double col_min = obs.matrix().col(i).minCoeff();
        EXPECT_GT(col_min, previous[i]) << "m " << m << " sigma " << sigma << " column " << i + 1;
        previous[i] = col_min;
      }
    }
  };
  check(9, {0.25, 0.5, 1.0, 2.0, 3.0});
  check(105, {3.0, 4.0, 6.0, 8.0, 12.0});
}

TEST(GaussianNoise, FarTailsStayPositiveAfterUnderflow) {
  EXPECT_EQ(gaussian_kernel(105, 1, 1.0), 0.0);
  const auto base = build_confusion_base(path_graph(105));
  const auto obs = apply_gaussian_noise(base, NoiseSpec(1.0));
  EXPECT_GT(obs.matrix().minCoeff(), 0.0);
  EXPECT_LE(max_column_deviation(obs.matrix()), 1e-12);
}

TEST(GaussianNoise, VanishingSigmaConcentratesOnTrueState) {
  // The kernel peak 1/(sigma sqrt(2 pi)) dominates as sigma -> 0, so each
  // column tends to the indicator of its own state.
  const auto base = build_confusion_base(path_graph(8));
  const auto obs = apply_gaussian_noise(base, NoiseSpec(1e-6));
  EXPECT_LE((obs.matrix() - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff(), 1e-4);
}

TEST(NoiseSpec, RejectsNonPositive) {
  EXPECT_THROW(NoiseSpec(0.0), std::invalid_argument);
  EXPECT_THROW(NoiseSpec(-1.0), std::invalid_argument);
  EXPECT_THROW(NoiseSpec(std::nan("")), std::invalid_argument);
}

TEST(LikelihoodVector, RowExtraction) {
  Eigen::MatrixXd m(2, 2);
  m << 0.9, 0.2, 0.1, 0.8;
  const ObservationMatrix obs(m);
  EXPECT_EQ(likelihood_vector(obs, 1), Eigen::Vector2d(0.9, 0.2));
  EXPECT_EQ(likelihood_vector(obs, 2), Eigen::Vector2d(0.1, 0.8));
  EXPECT_THROW(likelihood_vector(obs, 0), std::out_of_range);
  EXPECT_THROW(likelihood_vector(obs, 3), std::out_of_range);

  const ObservationMatrix single(Eigen::MatrixXd::Ones(1, 1));
  EXPECT_EQ(likelihood_vector(single, 1)[0], 1.0);
}

TEST(LikelihoodVector, StrictlyPositiveAfterNoise) {
  const auto obs = apply_gaussian_noise(build_confusion_base(path_graph(30)), NoiseSpec(1.0));
  for (NodeId y = 1; y <= 30; ++y) EXPECT_GT(likelihood_vector(obs, y).minCoeff(), 0.0);
}
