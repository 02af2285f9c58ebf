#include <gtest/gtest.h>

#include <random>

#include "vpr/map_model.hpp"
#include "vpr/stochastic.hpp"

using namespace vpr;

namespace {

std::string error_of(std::string_view text) {
  try {
    load_map(text);
  } catch (const MapError& e) {
    return e.what();
  }
  return {};
}

// Random valid graph: every node has a self-loop plus a few random out-edges.
RoadGraph random_graph(std::mt19937_64& gen, int m) {
  std::uniform_real_distribution<double> w(0.1, 5.0);
  std::vector<Edge> edges;
  for (NodeId from = 1; from <= m; ++from) {
    edges.push_back({from, from, w(gen)});
    for (NodeId to = 1; to <= m; ++to) {
      if (to != from && gen() % 3 == 0) edges.push_back({from, to, w(gen)});
    }
  }
  return RoadGraph(m, std::move(edges));
}

}  // namespace

TEST(LoadMap, MinimalCycle) {
  const auto g = load_map(R"({"num_nodes": 2, "edges": [
      {"from": 1, "to": 2, "weight": 1}, {"from": 2, "to": 1, "weight": 1}]})");
  EXPECT_EQ(g.num_nodes(), 2);
  EXPECT_EQ(g.edges().size(), 2u);
}

TEST(LoadMap, Diagnostics) {
  EXPECT_NE(error_of(R"({"num_nodes": 5, "edges": [{"from": 1, "to": 7, "weight": 1}]})")
                .find("node 7 out of range"),
            std::string::npos);

  const auto no_out = error_of(R"({"num_nodes": 3, "edges": [
      {"from": 1, "to": 2, "weight": 1}, {"from": 2, "to": 3, "weight": 1}]})");
  EXPECT_NE(no_out.find("node 3 has no outgoing edge"), std::string::npos) << no_out;

  const auto negative = error_of(R"({"num_nodes": 2, "edges": [
      {"from": 1, "to": 2, "weight": -1}, {"from": 2, "to": 1, "weight": 1}]})");
  EXPECT_NE(negative.find("edge 1->2"), std::string::npos) << negative;

  const auto dup = error_of(R"({"num_nodes": 2, "edges": [
      {"from": 1, "to": 2, "weight": 1}, {"from": 1, "to": 2, "weight": 2},
      {"from": 2, "to": 1, "weight": 1}]})");
  EXPECT_NE(dup.find("duplicate edge 1->2"), std::string::npos) << dup;

  EXPECT_NE(error_of("{not json").find("parse error"), std::string::npos);
  EXPECT_NE(error_of(R"({"num_nodes": 2})").find("edges"), std::string::npos);
  EXPECT_NE(error_of(R"({"num_nodes": 1, "edges": [{"from": 1, "to": 1}]})").find("weight"),
            std::string::npos);
}

TEST(LoadMap, ZeroWeightOnlyCountsAsNoOutgoingEdge) {
  const auto msg = error_of(R"({"num_nodes": 2, "edges": [
      {"from": 1, "to": 2, "weight": 0}, {"from": 2, "to": 1, "weight": 1}]})");
  EXPECT_NE(msg.find("node 1 has no outgoing edge"), std::string::npos) << msg;
}

TEST(LoadMap, RoundTripIsIdentity) {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 20; ++rep) {
    const auto g = random_graph(gen, 1 + static_cast<int>(gen() % 12));
    EXPECT_EQ(load_map(save_map(g)), g);
  }
  const auto def = generate_default_map();
  EXPECT_EQ(load_map(save_map(def)), def);
}

TEST(TransitionMatrix, IsolatedNodeParksForever) {
  const RoadGraph g(2, {{1, 1, 1.0}, {2, 1, 3.0}});
  const auto a = build_transition_matrix(g);
  EXPECT_EQ(a.probability(1, 1), 1.0);
  EXPECT_EQ(a.probability(2, 1), 0.0);
}

TEST(TransitionMatrix, ProportionalNormalization) {
  std::vector<Edge> edges = {{1, 2, 2.0}, {1, 70, 1.0}, {1, 1, 1.0}};
  for (NodeId n = 2; n <= 70; ++n) edges.push_back({n, n, 1.0});
  const auto a = build_transition_matrix(RoadGraph(70, edges));
  EXPECT_DOUBLE_EQ(a.probability(2, 1), 0.5);
  EXPECT_DOUBLE_EQ(a.probability(70, 1), 0.25);
  EXPECT_DOUBLE_EQ(a.probability(1, 1), 0.25);
}

TEST(TransitionMatrix, RejectsNonStochastic) {
  Eigen::MatrixXd m(2, 2);
  m << 0.5, 0.5, 0.6, 0.5;
  EXPECT_THROW(TransitionMatrix{m}, std::invalid_argument);
  m << 0.5, 0.5, 0.5, 0.5;
  EXPECT_NO_THROW(TransitionMatrix{m});
}

TEST(TransitionMatrix, PropertiesOnRandomGraphs) {
  std::mt19937_64 gen(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const int m = 1 + static_cast<int>(gen() % 15);
    const auto g = random_graph(gen, m);
    const auto a = build_transition_matrix(g);
    EXPECT_LE(max_column_deviation(a.matrix()), 1e-12);

    // Zero pattern equals the edge set, directionality included.
    Eigen::MatrixXi has_edge = Eigen::MatrixXi::Zero(m, m);
    for (const Edge& e : g.edges()) has_edge(e.to - 1, e.from - 1) = 1;
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) EXPECT_EQ(a.matrix()(i, j) > 0.0, has_edge(i, j) == 1);
    }

    // Scaling one node's outgoing weights leaves its column unchanged.
    const NodeId node = 1 + static_cast<int>(gen() % static_cast<unsigned>(m));
    const double factor = 0.01 + static_cast<double>(gen() % 1000);
    std::vector<Edge> scaled = g.edges();
    for (Edge& e : scaled) {
      if (e.from == node) e.weight *= factor;
    }
    const auto b = build_transition_matrix(RoadGraph(m, scaled));
    EXPECT_LE((a.matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(InitialBelief, Validation) {
  EXPECT_THROW(InitialBelief(Eigen::Vector2d(0.5, 0.6)), std::invalid_argument);
  EXPECT_THROW(InitialBelief(Eigen::Vector2d(1.5, -0.5)), std::invalid_argument);
  EXPECT_THROW(InitialBelief::point_mass(3, 4), std::invalid_argument);
  const auto p = InitialBelief::point_mass(3, 2);
  EXPECT_EQ(p.probabilities()[1], 1.0);
}

TEST(DefaultMap, DeterministicForFixedSeed) {
  EXPECT_EQ(save_map(generate_default_map(105, {1, 2, 3, 4, 5, 6, 7, 8, 9}, 42)),
            save_map(generate_default_map(105, {1, 2, 3, 4, 5, 6, 7, 8, 9}, 42)));
  EXPECT_NE(save_map(generate_default_map(105, {1, 2, 3, 4, 5, 6, 7, 8, 9}, 42)),
            save_map(generate_default_map(105, {1, 2, 3, 4, 5, 6, 7, 8, 9}, 43)));
}

TEST(DefaultMap, MainRoadOrderingAtNodeOne) {
  const auto a = build_transition_matrix(generate_default_map());
  EXPECT_EQ(a.size(), 105);
  EXPECT_GT(a.probability(2, 1), a.probability(70, 1));
  EXPECT_GT(a.probability(70, 1), a.probability(1, 1));
  EXPECT_GT(a.probability(1, 1), 0.0);
  EXPECT_LE(max_column_deviation(a.matrix()), 1e-12);
}

TEST(DefaultMap, NodeClassesFollowDescription) {
  const auto g = generate_default_map();
  const auto a = build_transition_matrix(g);
  for (NodeId n = 1; n <= 105; ++n) {
    const auto col = a.matrix().col(n - 1);
    EXPECT_GT(col[n - 1], 0.0) << "node " << n << " lacks a self-loop";
    double biggest_move = 0.0;
    double smallest_move = 1.0;
    int moves = 0;
    for (int i = 0; i < 105; ++i) {
      if (i == n - 1 || col[i] == 0.0) continue;
      ++moves;
      biggest_move = std::max(biggest_move, col[i]);
      smallest_move = std::min(smallest_move, col[i]);
    }
    EXPECT_GE(moves, 1) << "node " << n;
    if (n <= 9) {
      // Straight dominates, stopping is least likely.
      EXPECT_GT(biggest_move, 2.0 * smallest_move) << "node " << n;
      EXPECT_LT(col[n - 1], smallest_move) << "node " << n;
    } else {
      // Roughly equal in each direction.
      EXPECT_LT(biggest_move / smallest_move, 1.3) << "node " << n;
    }
  }
}

TEST(DefaultMap, SmallAndDegenerateParameters) {
  EXPECT_THROW(generate_default_map(1, {}, 1), std::invalid_argument);
  EXPECT_THROW(generate_default_map(5, {6}, 1), std::invalid_argument);
  for (int n : {2, 3, 10, 30}) {
    for (const std::set<NodeId>& main : {std::set<NodeId>{}, std::set<NodeId>{1},
                                         std::set<NodeId>{1, 2}}) {
      const auto g = generate_default_map(n, main, 5);
      EXPECT_EQ(g.num_nodes(), n);
      EXPECT_LE(max_column_deviation(build_transition_matrix(g).matrix()), 1e-12);
    }
  }
  std::set<NodeId> all;
  for (NodeId i = 1; i <= 4; ++i) all.insert(i);
  EXPECT_NO_THROW(generate_default_map(4, all, 5));
}
