#include "wlcap/multicast_trees.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <string>

namespace wlcap {

void validate_session(const MulticastSession& s, const NetworkInstance& net) {
  if (s.destinations.empty()) throw InvalidParameter("session: m must be >= 1");
  if (s.source >= net.size()) throw InvalidParameter("session: unknown source");
  std::vector<NodeId> ids = s.destinations;
  ids.push_back(s.source);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw InvalidParameter("session: source and destinations must be distinct");
  }
  if (ids.back() >= net.size()) throw InvalidParameter("session: unknown destination");
}

std::vector<MulticastSession> make_sessions(const NetworkInstance& net, std::size_t m,
                                            std::uint64_t seed) {
  const std::size_t n = net.size();
  if (m < 1) throw InvalidParameter("make_sessions: m must be >= 1");
  if (n < m + 1) throw InvalidParameter("make_sessions: need n >= m + 1");
  Rng rng = make_rng(seed, 1);
  std::vector<MulticastSession> out(n);
  for (std::size_t s = 0; s < n; ++s) {
    auto& session = out[s];
    session.source = static_cast<NodeId>(s);
    while (session.destinations.size() < m) {
      const auto d = static_cast<NodeId>(uniform_index(rng, n));
      if (d == session.source) continue;
      if (std::find(session.destinations.begin(), session.destinations.end(), d) !=
          session.destinations.end()) {
        continue;
      }
      session.destinations.push_back(d);
    }
  }
  return out;
}

EuclideanTree emst(std::span<const Point> points) {
  if (points.empty()) throw InvalidParameter("emst: need at least one point");
  EuclideanTree tree;
  tree.vertices.assign(points.begin(), points.end());
  const std::size_t m = points.size();
  std::vector<double> best(m, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> from(m, 0);
  std::vector<char> in_tree(m, 0);
  best[0] = 0.0;
  for (std::size_t step = 0; step < m; ++step) {
    std::size_t u = m;
    for (std::size_t v = 0; v < m; ++v) {
      if (!in_tree[v] && (u == m || best[v] < best[u])) u = v;
    }
    in_tree[u] = 1;
    if (step > 0) {
      tree.edges.emplace_back(from[u], u);
      tree.total_length += std::sqrt(best[u]);
    }
    for (std::size_t v = 0; v < m; ++v) {
      if (in_tree[v]) continue;
      const double d2 = distance_sq(points[u], points[v]);
      if (d2 < best[v]) {
        best[v] = d2;
        from[v] = u;
      }
    }
  }
  return tree;
}

ScalingResult emst_scaling_study(std::span<const std::size_t> ms, std::size_t trials,
                                 std::uint64_t seed) {
  if (trials < 30) throw InvalidParameter("emst_scaling_study: trials must be >= 30");
  std::vector<ScalingPoint> points;
  for (std::size_t k = 0; k < ms.size(); ++k) {
    const std::size_t m = ms[k];
    if (m < 2) throw InvalidParameter("emst_scaling_study: m must be >= 2");
    Rng rng = make_rng(seed, 1000 + m);
    std::vector<double> lengths;
    lengths.reserve(trials);
    std::vector<Point> pts(m);
    for (std::size_t trial = 0; trial < trials; ++trial) {
      for (auto& p : pts) p = {uniform01(rng), uniform01(rng)};
      lengths.push_back(emst(pts).total_length);
    }
    points.push_back(summarize(static_cast<double>(m), lengths));
  }
  return fit_points(std::move(points));
}

const char* to_string(VertexKind k) {
  switch (k) {
    case VertexKind::Source: return "source";
    case VertexKind::Relay: return "relay";
    case VertexKind::Destination: return "dest";
  }
  return "?";
}

std::vector<std::pair<std::size_t, std::size_t>> RoutingTree::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t v = 1; v < vertices.size(); ++v) {
    out.emplace_back(static_cast<std::size_t>(vertices[v].parent), v);
  }
  return out;
}

std::vector<std::vector<std::size_t>> RoutingTree::children() const {
  std::vector<std::vector<std::size_t>> out(vertices.size());
  for (std::size_t v = 1; v < vertices.size(); ++v) {
    out[static_cast<std::size_t>(vertices[v].parent)].push_back(v);
  }
  return out;
}

std::vector<std::size_t> RoutingTree::relay_cells() const {
  std::vector<std::size_t> out;
  for (const auto& v : vertices) {
    if (v.kind == VertexKind::Relay) out.push_back(v.cell);
  }
  return out;
}

std::vector<NodeId> RoutingTree::relay_nodes() const {
  std::vector<NodeId> out;
  for (const auto& v : vertices) {
    if (v.kind == VertexKind::Relay) out.push_back(v.node);
  }
  return out;
}

namespace {

// Cells crossed by the segment a -> b, each axis-adjacent to the previous one.
std::vector<CellIndex> staircase(const CellGrid& grid, const Point& a, const Point& b) {
  CellIndex cur = grid.cell_of(a);
  const CellIndex last = grid.cell_of(b);
  std::vector<CellIndex> out{cur};
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const int step_i = last.i > cur.i ? 1 : -1;
  const int step_j = last.j > cur.j ? 1 : -1;
  const double side = grid.side();
  auto next_boundary = [&](int k, int step) { return (step > 0 ? k + 1 : k) * side; };
  const double inf = std::numeric_limits<double>::infinity();
  while (cur != last) {
    double tx = inf, ty = inf;
    if (cur.i != last.i && dx != 0.0) tx = (next_boundary(cur.i, step_i) - a.x) / dx;
    if (cur.j != last.j && dy != 0.0) ty = (next_boundary(cur.j, step_j) - a.y) / dy;
    if (tx == inf && ty == inf) {
      // Endpoint clamping (points on the far edge of the square) can leave a
      // mismatch the ray never crosses; finish with straight steps.
      if (cur.i != last.i) {
        cur.i += step_i;
      } else {
        cur.j += step_j;
      }
    } else if (tx <= ty) {
      cur.i += step_i;
    } else {
      cur.j += step_j;
    }
    out.push_back(cur);
  }
  return out;
}

class EdgeRouter {
 public:
  EdgeRouter(const NetworkInstance& net, const CellGrid& grid, const CellGraph& cells, double t,
             const std::vector<NodeId>& members)
      : net_(net), grid_(grid), cells_(cells), t2_(t * t), t_(t), members_(members) {}

  // Intermediate nodes of a path from u to v with hops <= t, or nullopt.
  std::optional<std::vector<NodeId>> route(NodeId u, NodeId v) {
    if (distance_sq(net_[u], net_[v]) <= t2_ && grid_.cell_of(net_[u]) == grid_.cell_of(net_[v])) {
      return std::vector<NodeId>{};
    }
    if (auto p = staircase_path(u, v)) return p;
    return bfs_path(u, v);
  }

 private:
  struct Layer {
    std::vector<NodeId> nodes;
    bool optional;
  };

  bool is_member(NodeId x) const {
    return std::binary_search(members_.begin(), members_.end(), x);
  }

  std::vector<NodeId> cell_nodes(CellIndex c) const {
    std::vector<NodeId> out;
    for (NodeId x : cells_.occupancy.members[grid_.flat(c)]) {
      if (!is_member(x)) out.push_back(x);
    }
    return out;
  }

  std::optional<std::vector<NodeId>> staircase_path(NodeId u, NodeId v) {
    const auto path = staircase(grid_, net_[u], net_[v]);
    std::vector<Layer> layers;
    layers.push_back({{u}, false});
    for (std::size_t k = 0; k < path.size(); ++k) {
      const bool end = k == 0 || k + 1 == path.size();
      auto nodes = cell_nodes(path[k]);
      // End cells are optional; an empty middle cell is skipped outright.
      layers.push_back({std::move(nodes), end});
    }
    layers.push_back({{v}, false});
    const std::size_t L = layers.size();

    // good[l][i]: node i of layer l reaches v respecting required layers.
    std::vector<std::vector<char>> good(L);
    for (std::size_t l = 0; l < L; ++l) good[l].assign(layers[l].nodes.size(), 0);
    good[L - 1][0] = 1;
    for (std::size_t l = L - 1; l-- > 0;) {
      for (std::size_t i = 0; i < layers[l].nodes.size(); ++i) {
        good[l][i] = next_hop(layers, good, l, layers[l].nodes[i]).has_value();
      }
    }
    if (!good[0][0]) return std::nullopt;
    std::vector<NodeId> relays;
    std::size_t l = 0;
    NodeId cur = u;
    while (true) {
      const auto hop = next_hop(layers, good, l, cur);
      l = hop->first;
      cur = layers[l].nodes[hop->second];
      if (l == L - 1) break;
      relays.push_back(cur);
    }
    return relays;
  }

  // Farthest reachable good layer after l, lowest NodeId within it.
  std::optional<std::pair<std::size_t, std::size_t>> next_hop(
      const std::vector<Layer>& layers, const std::vector<std::vector<char>>& good, std::size_t l,
      NodeId from) const {
    std::size_t limit = l + 1;
    // The furthest layer we may jump to: stop at the first nonempty required one.
    while (limit < layers.size() - 1 && (layers[limit].optional || layers[limit].nodes.empty())) {
      ++limit;
    }
    for (std::size_t target = limit; target > l; --target) {
      const auto& nodes = layers[target].nodes;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (good[target][i] && distance_sq(net_[from], net_[nodes[i]]) <= t2_) {
          return std::pair{target, i};
        }
      }
    }
    return std::nullopt;
  }

  std::optional<std::vector<NodeId>> bfs_path(NodeId u, NodeId v) {
    if (!index_) index_.emplace(net_, t_);
    std::vector<std::int64_t> prev(net_.size(), -2);
    std::vector<NodeId> frontier{u};
    prev[u] = -1;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
      const NodeId x = frontier[head];
      if (x == v) break;
      std::vector<NodeId> nbrs = index_->within(net_[x], t_);
      for (NodeId y : nbrs) {
        if (prev[y] != -2) continue;
        if (y != v && is_member(y)) continue;
        prev[y] = x;
        frontier.push_back(y);
      }
    }
    if (prev[v] == -2) return std::nullopt;
    std::vector<NodeId> relays;
    for (auto x = prev[v]; x != -1 && static_cast<NodeId>(x) != u; x = prev[static_cast<std::size_t>(x)]) {
      relays.push_back(static_cast<NodeId>(x));
    }
    std::reverse(relays.begin(), relays.end());
    return relays;
  }

  const NetworkInstance& net_;
  const CellGrid& grid_;
  const CellGraph& cells_;
  double t2_;
  double t_;
  const std::vector<NodeId>& members_;
  std::optional<SpatialIndex> index_;
};

}  // namespace

RoutingTree route_session(const MulticastSession& session, const NetworkInstance& net,
                          const CellGrid& grid, const CellGraph& cells, long session_id) {
  validate_session(session, net);
  RoutingTree tree;
  tree.session = session;
  std::vector<NodeId> ends{session.source};
  ends.insert(ends.end(), session.destinations.begin(), session.destinations.end());
  std::vector<Point> pts;
  for (NodeId x : ends) pts.push_back(net[x]);
  const auto skeleton = emst(pts);

  std::vector<NodeId> members = ends;
  std::sort(members.begin(), members.end());
  EdgeRouter router(net, grid, cells, grid.t(), members);

  auto cell_of = [&](NodeId x) { return cells.occupancy.cell_of_node[x]; };
  tree.vertices.push_back({session.source, VertexKind::Source, -1, cell_of(session.source)});
  std::vector<std::int32_t> vertex_of(ends.size(), -1);
  vertex_of[0] = 0;
  for (const auto& [a, b] : skeleton.edges) {
    const NodeId u = ends[a];
    const NodeId v = ends[b];
    auto relays = router.route(u, v);
    if (!relays) {
      throw RoutingFailure("route_session: no path from node " + std::to_string(u) + " to node " +
                               std::to_string(v) + " at range t",
                           session_id);
    }
    std::int32_t parent = vertex_of[a];
    for (NodeId r : *relays) {
      tree.vertices.push_back({r, VertexKind::Relay, parent, cell_of(r)});
      parent = static_cast<std::int32_t>(tree.vertices.size() - 1);
    }
    tree.vertices.push_back({v, VertexKind::Destination, parent, cell_of(v)});
    vertex_of[b] = static_cast<std::int32_t>(tree.vertices.size() - 1);
  }
  return tree;
}

std::size_t memtc_count(const RoutingTree& tree) {
  std::vector<std::size_t> cells;
  for (const auto& v : tree.vertices) cells.push_back(v.cell);
  std::sort(cells.begin(), cells.end());
  return static_cast<std::size_t>(std::unique(cells.begin(), cells.end()) - cells.begin());
}

double mamt_area(const RoutingTree& tree, const NetworkInstance& net, double t, int resolution) {
  std::vector<Point> centers;
  for (const auto& v : tree.vertices) {
    if (v.kind != VertexKind::Destination) centers.push_back(net[v.node]);
  }
  return union_of_disks_area(centers, t, resolution);
}

void write_tree_csv(std::ostream& out, const RoutingTree& tree, const NetworkInstance& net) {
  const auto old_precision = out.precision(12);
  out << "edge_src_x,edge_src_y,edge_dst_x,edge_dst_y,kind\n";
  for (const auto& [p, c] : tree.edges()) {
    const Point& a = net[tree.vertices[p].node];
    const Point& b = net[tree.vertices[c].node];
    out << a.x << ',' << a.y << ',' << b.x << ',' << b.y << ',' << to_string(tree.vertices[p].kind)
        << '\n';
  }
  out.precision(old_precision);
}

}  // namespace wlcap
