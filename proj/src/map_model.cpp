#include "vpr/map_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "vpr/stochastic.hpp"

namespace vpr {
namespace {

std::string edge_name(const Edge& e) {
  std::ostringstream os;
  os << e.from << "->" << e.to;
  return os.str();
}

}  // namespace

RoadGraph::RoadGraph(int num_nodes, std::vector<Edge> edges)
    : num_nodes_(num_nodes), edges_(std::move(edges)) {
  if (num_nodes_ < 1) {
    throw MapError("num_nodes must be positive, got " + std::to_string(num_nodes_));
  }
  std::set<std::pair<NodeId, NodeId>> seen;
  std::vector<double> outgoing(static_cast<std::size_t>(num_nodes_), 0.0);
  for (const Edge& e : edges_) {
    for (NodeId endpoint : {e.from, e.to}) {
      if (endpoint < 1 || endpoint > num_nodes_) {
        std::ostringstream os;
        os << "node " << endpoint << " out of range 1.." << num_nodes_ << " in edge "
           << edge_name(e);
        throw MapError(os.str());
      }
    }
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      std::ostringstream os;
      os << "edge " << edge_name(e) << " has invalid weight " << e.weight
         << " (must be finite and nonnegative)";
      throw MapError(os.str());
    }
    if (!seen.emplace(e.from, e.to).second) {
      throw MapError("duplicate edge " + edge_name(e));
    }
    outgoing[static_cast<std::size_t>(e.from - 1)] += e.weight;
  }
  for (NodeId n = 1; n <= num_nodes_; ++n) {
    if (!(outgoing[static_cast<std::size_t>(n - 1)] > 0.0)) {
      throw MapError("node " + std::to_string(n) + " has no outgoing edge");
    }
  }
}

double RoadGraph::out_weight(NodeId node) const {
  double total = 0.0;
  for (const Edge& e : edges_) {
    if (e.from == node) total += e.weight;
  }
  return total;
}

bool RoadGraph::adjacent(NodeId a, NodeId b) const {
  if (a == b) return false;
  return std::any_of(edges_.begin(), edges_.end(), [&](const Edge& e) {
    return e.weight > 0.0 && ((e.from == a && e.to == b) || (e.from == b && e.to == a));
  });
}

std::vector<NodeId> RoadGraph::neighbours(NodeId node) const {
  std::set<NodeId> out;
  for (const Edge& e : edges_) {
    if (e.weight <= 0.0 || e.from == e.to) continue;
    if (e.from == node) out.insert(e.to);
    if (e.to == node) out.insert(e.from);
  }
  return {out.begin(), out.end()};
}

TransitionMatrix::TransitionMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  require_column_stochastic(entries_, "transition matrix");
}

InitialBelief::InitialBelief(Eigen::VectorXd probabilities)
    : probabilities_(std::move(probabilities)) {
  require_distribution(probabilities_, "initial belief");
}

InitialBelief InitialBelief::point_mass(int num_nodes, NodeId state) {
  if (state < 1 || state > num_nodes) {
    throw std::invalid_argument("initial state " + std::to_string(state) + " out of range 1.." +
                                std::to_string(num_nodes));
  }
  Eigen::VectorXd p = Eigen::VectorXd::Zero(num_nodes);
  p[state - 1] = 1.0;
  return InitialBelief(std::move(p));
}

InitialBelief InitialBelief::uniform(int num_nodes) {
  if (num_nodes < 1) throw std::invalid_argument("uniform belief needs at least one node");
  return InitialBelief(Eigen::VectorXd::Constant(num_nodes, 1.0 / num_nodes));
}

RoadGraph load_map(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MapError(std::string("map parse error: ") + e.what());
  }
  if (!doc.is_object()) throw MapError("map parse error: top level must be a JSON object");
  if (!doc.contains("num_nodes") || !doc["num_nodes"].is_number_integer()) {
    throw MapError("map parse error: \"num_nodes\" must be an integer");
  }
  if (!doc.contains("edges") || !doc["edges"].is_array()) {
    throw MapError("map parse error: \"edges\" must be an array");
  }
  std::vector<Edge> edges;
  edges.reserve(doc["edges"].size());
  std::size_t index = 0;
  for (const auto& item : doc["edges"]) {
    const bool ok = item.is_object() && item.contains("from") && item["from"].is_number_integer() &&
                    item.contains("to") && item["to"].is_number_integer() &&
                    item.contains("weight") && item["weight"].is_number();
    if (!ok) {
      throw MapError("map parse error: edge #" + std::to_string(index) +
                     " needs integer \"from\", \"to\" and numeric \"weight\"");
    }
    edges.push_back({item["from"].get<NodeId>(), item["to"].get<NodeId>(),
                     item["weight"].get<double>()});
    ++index;
  }
  return RoadGraph(doc["num_nodes"].get<int>(), std::move(edges));
}

std::string save_map(const RoadGraph& graph) {
  nlohmann::json doc;
  doc["num_nodes"] = graph.num_nodes();
  auto& edges = doc["edges"] = nlohmann::json::array();
  for (const Edge& e : graph.edges()) {
    edges.push_back({{"from", e.from}, {"to", e.to}, {"weight", e.weight}});
  }
  return doc.dump(2) + "\n";
}

TransitionMatrix build_transition_matrix(const RoadGraph& graph) {
  const int m = graph.num_nodes();
  Eigen::VectorXd totals = Eigen::VectorXd::Zero(m);
  for (const Edge& e : graph.edges()) totals[e.from - 1] += e.weight;

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (const Edge& e : graph.edges()) {
    a(e.to - 1, e.from - 1) = e.weight / totals[e.from - 1];
  }
  return TransitionMatrix(std::move(a));
}

RoadGraph generate_default_map(int num_nodes, const std::set<NodeId>& main_road_nodes,
                               std::uint64_t seed, const MapGeneratorConfig& config) {
  if (num_nodes < 2) throw std::invalid_argument("generate_default_map: num_nodes must be >= 2");
  for (NodeId n : main_road_nodes) {
    if (n < 1 || n > num_nodes) {
      throw std::invalid_argument("generate_default_map: main road node " + std::to_string(n) +
                                  " out of range");
    }
  }
  const std::vector<NodeId> main_road(main_road_nodes.begin(), main_road_nodes.end());
  std::vector<NodeId> streets;
  for (NodeId n = 1; n <= num_nodes; ++n) {
    if (!main_road_nodes.contains(n)) streets.push_back(n);
  }

  const int street_count = static_cast<int>(streets.size());
  const int cols =
      street_count == 0 ? 0 : static_cast<int>(std::ceil(std::sqrt(1.5 * street_count)));
  const int rows = street_count == 0 ? 0 : (street_count + cols - 1) / cols;
  const int junction_row = (2 * rows) / 3;
  auto grid_node = [&](int r, int c) -> NodeId {
    if (r < 0 || c < 0 || r >= rows || c >= cols) return 0;
    const int idx = r * cols + c;
    return idx < street_count ? streets[static_cast<std::size_t>(idx)] : 0;
  };

  // Adjacency as ordered target lists, so the RNG consumption order is fixed.
  std::vector<std::vector<NodeId>> straight(static_cast<std::size_t>(num_nodes) + 1);
  std::vector<std::vector<NodeId>> turns(static_cast<std::size_t>(num_nodes) + 1);
  std::vector<std::vector<NodeId>> street_links(static_cast<std::size_t>(num_nodes) + 1);
  auto add_unique = [](std::vector<NodeId>& v, NodeId n) {
    if (n != 0 && std::find(v.begin(), v.end(), n) == v.end()) v.push_back(n);
  };

  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const NodeId here = grid_node(r, c);
      if (here == 0) continue;
      for (auto [dr, dc] : {std::pair{-1, 0}, {0, -1}, {0, 1}, {1, 0}}) {
        add_unique(street_links[static_cast<std::size_t>(here)], grid_node(r + dr, c + dc));
      }
    }
  }

  for (std::size_t pos = 0; pos < main_road.size(); ++pos) {
    const NodeId node = main_road[pos];
    const int col = cols == 0 ? 0 : static_cast<int>(pos) % cols;
    const NodeId junction = grid_node(junction_row, col);
    NodeId ahead = pos + 1 < main_road.size() ? main_road[pos + 1] : grid_node(junction_row, col + 1);
    NodeId turn = junction;
    if (ahead == 0 || ahead == turn) {
      ahead = turn;
      turn = 0;
    }
    if (ahead != 0) add_unique(straight[static_cast<std::size_t>(node)], ahead);
    if (turn != 0) add_unique(turns[static_cast<std::size_t>(node)], turn);
    if (junction != 0) add_unique(street_links[static_cast<std::size_t>(junction)], node);
  }
  // Without street nodes the last main node loops back to the start.
  if (street_count == 0 && main_road.size() > 1) {
    add_unique(straight[static_cast<std::size_t>(main_road.back())], main_road.front());
  }

  Rng rng(splitmix64(seed));
  auto draw = [&](MapGeneratorConfig::Range range) { return rng.uniform(range.lo, range.hi); };

  std::vector<Edge> edges;
  for (NodeId n = 1; n <= num_nodes; ++n) {
    const auto idx = static_cast<std::size_t>(n);
    if (main_road_nodes.contains(n)) {
      for (NodeId t : straight[idx]) edges.push_back({n, t, draw(config.straight)});
      for (NodeId t : turns[idx]) edges.push_back({n, t, draw(config.turn)});
      edges.push_back({n, n, draw(config.main_self)});
    } else {
      for (NodeId t : street_links[idx]) edges.push_back({n, t, draw(config.street)});
      edges.push_back({n, n, draw(config.street_self)});
    }
  }
  return RoadGraph(num_nodes, std::move(edges));
}

}  // namespace vpr
