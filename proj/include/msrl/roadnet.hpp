// SPDX-License-Identifier: Apache-2.0
//
// Road network: CSV loading, nearest-segment map matching and Dijkstra
// shortest paths.

#ifndef MSRL_ROADNET_HPP_
#define MSRL_ROADNET_HPP_

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <queue>
#include <unordered_map>
#include <utility>
#include <vector>

#include "msrl/common.hpp"
#include "msrl/io.hpp"

namespace msrl {

using NodeId = std::int64_t;

struct RoadNode {
  NodeId id = 0;
  GeoPoint pos;
};

// Undirected road segment; stored in the network as two directed arcs.
struct RoadEdge {
  NodeId from_node = 0;
  NodeId to_node = 0;
  double length = 0.0;       // meters
  double speed_limit = 0.0;  // meters/second
};

// Result of projecting a query point onto the nearest road segment.
struct Projection {
  std::size_t edge_id = 0;  // index into RoadNetwork::edges()
  GeoPoint point;
  double offset = 0.0;  // fraction along the edge from from_node, in [0,1]
  double distance = 0.0;
};

struct Path {
  std::vector<NodeId> nodes;
  double length = 0.0;
};

// Immutable after construction; safe to share read-only across threads.
class RoadNetwork {
 public:
  struct Arc {
    std::size_t to = 0;  // node index
    std::size_t edge = 0;
    double weight = 0.0;
  };

  RoadNetwork() = default;

  // Validates and indexes. Throws ValidationError on duplicate node ids,
  // dangling endpoints, non-finite positions or non-positive length/speed.
  RoadNetwork(std::vector<RoadNode> nodes, std::vector<RoadEdge> edges)
      : nodes_(std::move(nodes)), edges_(std::move(edges)) {
    index_.reserve(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (!is_finite(nodes_[i].pos)) {
        throw ValidationError("node " + std::to_string(nodes_[i].id) +
                              " has non-finite coordinates");
      }
      if (!index_.emplace(nodes_[i].id, i).second) {
        throw ValidationError("duplicate node id " +
                              std::to_string(nodes_[i].id));
      }
    }
    adjacency_.resize(nodes_.size());
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto& edge = edges_[e];
      auto a = index_of(edge.from_node);
      auto b = index_of(edge.to_node);
      if (!a || !b) {
        throw ValidationError(
            "edge " + std::to_string(e) + " references unknown node " +
            std::to_string(!a ? edge.from_node : edge.to_node));
      }
      if (!(edge.length > 0.0) || !std::isfinite(edge.length)) {
        throw ValidationError("edge " + std::to_string(e) +
                              " has non-positive length");
      }
      if (!(edge.speed_limit > 0.0) || !std::isfinite(edge.speed_limit)) {
        throw ValidationError("edge " + std::to_string(e) +
                              " has non-positive speed limit");
      }
      adjacency_[*a].push_back({*b, e, edge.length});
      adjacency_[*b].push_back({*a, e, edge.length});
    }
  }

  const std::vector<RoadNode>& nodes() const { return nodes_; }
  const std::vector<RoadEdge>& edges() const { return edges_; }
  const std::vector<Arc>& arcs(std::size_t node_index) const {
    return adjacency_[node_index];
  }

  std::size_t arc_count() const {
    std::size_t n = 0;
    for (const auto& a : adjacency_) n += a.size();
    return n;
  }

  std::optional<std::size_t> index_of(NodeId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  const RoadNode& node(NodeId id) const {
    auto idx = index_of(id);
    if (!idx) throw ContractError("unknown node id " + std::to_string(id));
    return nodes_[*idx];
  }

  GeoPoint edge_start(std::size_t e) const { return node(edges_[e].from_node).pos; }
  GeoPoint edge_end(std::size_t e) const { return node(edges_[e].to_node).pos; }

 private:
  std::vector<RoadNode> nodes_;
  std::vector<RoadEdge> edges_;
  std::vector<std::vector<Arc>> adjacency_;
  std::unordered_map<NodeId, std::size_t> index_;
};

// Reads the nodes CSV (`node_id,x,y`) and edges CSV
// (`from,to,length_m,speed_mps`). An empty length is replaced by the
// Euclidean distance between the endpoints.
inline RoadNetwork load_network(std::istream& nodes_source,
                                std::istream& edges_source) {
  std::vector<RoadNode> nodes;
  {
    CsvReader csv(nodes_source, {"node_id", "x", "y"});
    std::vector<std::string> f;
    while (csv.next(f)) {
      nodes.push_back({csv.integer(f[0], "node_id"),
                       {csv.number(f[1], "x"), csv.number(f[2], "y")}});
    }
  }
  std::unordered_map<NodeId, GeoPoint> pos;
  for (const auto& n : nodes) pos.emplace(n.id, n.pos);

  std::vector<RoadEdge> edges;
  {
    CsvReader csv(edges_source, {"from", "to", "length_m", "speed_mps"});
    std::vector<std::string> f;
    while (csv.next(f)) {
      RoadEdge e;
      e.from_node = csv.integer(f[0], "from");
      e.to_node = csv.integer(f[1], "to");
      e.speed_limit = csv.number(f[3], "speed_mps");
      if (f[2].empty()) {
        auto a = pos.find(e.from_node);
        auto b = pos.find(e.to_node);
        if (a == pos.end() || b == pos.end()) {
          throw ValidationError(
              "edge at line " + std::to_string(csv.line()) +
              " references unknown node " +
              std::to_string(a == pos.end() ? e.from_node : e.to_node));
        }
        e.length = distance(a->second, b->second);
      } else {
        e.length = csv.number(f[2], "length_m");
      }
      edges.push_back(e);
    }
  }
  return RoadNetwork(std::move(nodes), std::move(edges));
}

inline std::string network_nodes_csv(const RoadNetwork& net) {
  std::string out = "node_id,x,y\n";
  for (const auto& n : net.nodes()) {
    out += std::to_string(n.id) + ',' + fmt_double(n.pos.x) + ',' +
           fmt_double(n.pos.y) + '\n';
  }
  return out;
}

inline std::string network_edges_csv(const RoadNetwork& net) {
  std::string out = "from,to,length_m,speed_mps\n";
  for (const auto& e : net.edges()) {
    out += std::to_string(e.from_node) + ',' + std::to_string(e.to_node) + ',' +
           fmt_double(e.length) + ',' + fmt_double(e.speed_limit) + '\n';
  }
  return out;
}

// Projection of `p` onto segment [a, b], offset clamped to [0, 1].
inline std::pair<GeoPoint, double> project_onto_segment(const GeoPoint& p,
                                                        const GeoPoint& a,
                                                        const GeoPoint& b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double s = 0.0;
  if (len2 > 0.0) {
    s = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2;
    s = std::clamp(s, 0.0, 1.0);
  }
  if (s == 1.0) return {b, 1.0};
  return {{a.x + s * dx, a.y + s * dy}, s};
}

// Nearest perpendicular (endpoint-clamped) projection over all edges; ties go
// to the lowest edge id.
inline Projection map_match(const RoadNetwork& net, const GeoPoint& p) {
  if (net.edges().empty()) throw NoEdgesError();
  Projection best;
  best.distance = std::numeric_limits<double>::infinity();
  for (std::size_t e = 0; e < net.edges().size(); ++e) {
    auto [q, s] = project_onto_segment(p, net.edge_start(e), net.edge_end(e));
    const double d = distance(p, q);
    if (d < best.distance) {
      best = {e, q, s, d};
    }
  }
  return best;
}

// Dijkstra with a binary heap and lazy deletion. Heap entries are ordered by
// (distance, node id) so ties resolve toward smaller ids.
inline Path shortest_path(const RoadNetwork& net, NodeId src, NodeId dst) {
  auto s = net.index_of(src);
  auto t = net.index_of(dst);
  if (!s || !t) throw ContractError("shortest_path: unknown node id");
  if (*s == *t) return {{src}, 0.0};

  const auto n = net.nodes().size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  std::vector<double> dist(n, kInf);
  std::vector<std::size_t> prev(n, kNone);
  std::vector<bool> done(n, false);

  using Entry = std::pair<double, NodeId>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;
  dist[*s] = 0.0;
  heap.push({0.0, src});
  while (!heap.empty()) {
    auto [d, id] = heap.top();
    heap.pop();
    const std::size_t u = *net.index_of(id);
    if (done[u]) continue;
    done[u] = true;
    if (u == *t) break;
    for (const auto& arc : net.arcs(u)) {
      // d(v) = min(d(v), d(u) + w(u, v))
      const double cand = d + arc.weight;
      if (cand < dist[arc.to]) {
        dist[arc.to] = cand;
        prev[arc.to] = u;
        heap.push({cand, net.nodes()[arc.to].id});
      }
    }
  }
  if (!std::isfinite(dist[*t])) {
    throw UnreachableError("node " + std::to_string(dst) +
                           " unreachable from " + std::to_string(src));
  }
  Path path;
  path.length = dist[*t];
  for (std::size_t v = *t; v != kNone; v = prev[v]) {
    path.nodes.push_back(net.nodes()[v].id);
  }
  std::reverse(path.nodes.begin(), path.nodes.end());
  return path;
}

// Rectangular grid of nx x ny nodes spaced `spacing` meters apart, with ids
// row-major from 0 and every street at `speed` m/s.
inline RoadNetwork make_grid_network(int nx, int ny, double spacing,
                                     double speed) {
  std::vector<RoadNode> nodes;
  std::vector<RoadEdge> edges;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      nodes.push_back({static_cast<NodeId>(j * nx + i), {i * spacing, j * spacing}});
    }
  }
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const NodeId id = j * nx + i;
      if (i + 1 < nx) edges.push_back({id, id + 1, spacing, speed});
      if (j + 1 < ny) edges.push_back({id, id + nx, spacing, speed});
    }
  }
  return RoadNetwork(std::move(nodes), std::move(edges));
}

}  // namespace msrl

#endif  // MSRL_ROADNET_HPP_
