#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "wlcap/cell_scheduler.hpp"
#include "wlcap/geom.hpp"
#include "wlcap/scaling.hpp"

namespace wlcap {

/// One source and m distinct destinations, none equal to the source.
struct MulticastSession {
  NodeId source = 0;
  std::vector<NodeId> destinations;

  std::size_t m() const noexcept { return destinations.size(); }
};

/// Validates the session invariants against an instance; throws InvalidParameter.
void validate_session(const MulticastSession& s, const NetworkInstance& net);

/// Every node acts as a source with m destinations drawn uniformly without
/// replacement from the other n-1 nodes. Session i has source i.
std::vector<MulticastSession> make_sessions(const NetworkInstance& net, std::size_t m,
                                            std::uint64_t seed);

struct EuclideanTree {
  std::vector<Point> vertices;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (parent, child), rooted at vertex 0
  double total_length = 0.0;
};

/// Exact minimum spanning tree of the complete Euclidean graph (Prim, O(m^2)).
EuclideanTree emst(std::span<const Point> points);

/// Mean EMST length of `trials` uniform point sets per m, fitted against m.
/// Requires every m >= 2 and trials >= 30.
ScalingResult emst_scaling_study(std::span<const std::size_t> ms, std::size_t trials,
                                 std::uint64_t seed);

enum class VertexKind : std::uint8_t { Source, Relay, Destination };

const char* to_string(VertexKind k);

struct TreeVertex {
  NodeId node = 0;
  VertexKind kind = VertexKind::Relay;
  std::int32_t parent = -1;  // index into RoutingTree::vertices; -1 for the source
  std::size_t cell = 0;      // flat cell index
};

/// Cell-routed multicast tree. Vertex 0 is the source and every parent precedes
/// its children. Each relay is the node picked for one cell of a routed path.
struct RoutingTree {
  MulticastSession session;
  std::vector<TreeVertex> vertices;

  std::vector<std::pair<std::size_t, std::size_t>> edges() const;
  std::vector<std::vector<std::size_t>> children() const;
  std::vector<std::size_t> relay_cells() const;
  std::vector<NodeId> relay_nodes() const;
};

/// EMST over {source} + destinations, then each EMST edge is walked along the
/// grid cells its segment crosses, placing one relay per crossed cell (lowest
/// NodeId among those that keep every hop <= t). Empty cells are skipped when
/// the next hop still fits. If no such staircase exists the edge falls back to
/// a shortest-hop path in the node graph. Throws RoutingFailure carrying
/// `session_id` when the endpoints are not connected at range t.
RoutingTree route_session(const MulticastSession& session, const NetworkInstance& net,
                          const CellGrid& grid, const CellGraph& cells, long session_id = -1);

/// Distinct cells holding a tree vertex.
std::size_t memtc_count(const RoutingTree& tree);

/// Area covered by radius-t disks around the source and relays (destinations excluded).
double mamt_area(const RoutingTree& tree, const NetworkInstance& net, double t, int resolution);

/// `edge_src_x,edge_src_y,edge_dst_x,edge_dst_y,kind` where kind is that of the
/// edge's upstream endpoint.
void write_tree_csv(std::ostream& out, const RoutingTree& tree, const NetworkInstance& net);

}  // namespace wlcap
