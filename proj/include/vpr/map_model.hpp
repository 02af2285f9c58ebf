#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace vpr {

/// 1-based position identifier. Matrix code converts to 0-based at the boundary.
using NodeId = int;

/// Raised for malformed or invariant-violating maps. The message names the
/// offending node or edge.
class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Edge {
  NodeId from = 0;
  NodeId to = 0;
  /// Unnormalized, nonnegative. The transition builder divides by the node's
  /// total outgoing weight.
  double weight = 0.0;

  bool operator==(const Edge&) const = default;
};

/// Directed weighted graph over positions 1..M. Self-loops model stopping.
class RoadGraph {
 public:
  /// Validates on construction; throws MapError.
  RoadGraph(int num_nodes, std::vector<Edge> edges);

  int num_nodes() const { return num_nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  /// Total outgoing weight of `node`.
  double out_weight(NodeId node) const;

  /// True if an edge with positive weight connects a and b in either direction
  /// (a != b).
  bool adjacent(NodeId a, NodeId b) const;

  /// Distinct neighbours of `node` in either direction, excluding itself.
  std::vector<NodeId> neighbours(NodeId node) const;

  bool operator==(const RoadGraph&) const = default;

 private:
  int num_nodes_;
  std::vector<Edge> edges_;
};

/// Column-stochastic M x M matrix; entry (i, j) = P(X_k = i | X_{k-1} = j).
class TransitionMatrix {
 public:
  /// Throws std::invalid_argument unless square, entries in [0, 1] and every
  /// column sums to 1 within 1e-12.
  explicit TransitionMatrix(Eigen::MatrixXd entries);

  int size() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& matrix() const { return entries_; }

  /// P(next | prev), 1-based ids.
  double probability(NodeId next, NodeId prev) const {
    return entries_(next - 1, prev - 1);
  }

 private:
  Eigen::MatrixXd entries_;
};

/// pi_0: distribution of the state before the first measurement.
class InitialBelief {
 public:
  explicit InitialBelief(Eigen::VectorXd probabilities);

  static InitialBelief point_mass(int num_nodes, NodeId state);
  static InitialBelief uniform(int num_nodes);

  int size() const { return static_cast<int>(probabilities_.size()); }
  const Eigen::VectorXd& probabilities() const { return probabilities_; }

 private:
  Eigen::VectorXd probabilities_;
};

RoadGraph load_map(std::string_view text);
std::string save_map(const RoadGraph& graph);

/// entry (i, j) = weight(j -> i) / sum_k weight(j -> k)
TransitionMatrix build_transition_matrix(const RoadGraph& graph);

/// Weight ranges for the procedural map. Each weight is drawn uniformly from
/// its [lo, hi] range. Main-road ranges are disjoint so the ordering
/// straight > turn > self holds for every main-road node.
struct MapGeneratorConfig {
  struct Range {
    double lo;
    double hi;
  };
  Range straight{6.0, 8.0};
  Range turn{1.5, 2.5};
  Range main_self{0.3, 0.6};
  Range street{0.9, 1.1};
  Range street_self{0.3, 0.5};
};

inline constexpr int kDefaultMapNodes = 105;
inline constexpr std::uint64_t kDefaultMapSeed = 42;

/// Procedural city map.
///
/// Main-road nodes (taken in ascending order) form a one-way chain. Every
/// other node sits on a rectangular street grid numbered row-major, with
/// `ceil(sqrt(1.5 * R))` columns for R street nodes and two-way links between
/// 4-neighbours. The main road runs alongside grid row `floor(2 * rows / 3)`:
/// the m-th main node turns into column m of that row and that grid node turns
/// back onto it. The last main node continues straight into the next column.
/// With the defaults (105 nodes, main road 1..9) node 1 goes straight to 2,
/// turns to 70 and parks on itself.
///
/// Every node carries a positive self-loop. Deterministic for a fixed seed.
RoadGraph generate_default_map(int num_nodes = kDefaultMapNodes,
                               const std::set<NodeId>& main_road_nodes = {1, 2, 3, 4, 5, 6, 7, 8, 9},
                               std::uint64_t seed = kDefaultMapSeed,
                               const MapGeneratorConfig& config = {});

}  // namespace vpr
