#include "wlcap/cell_scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace wlcap {

CellIndex CellGrid::cell_of(const Point& p) const {
  auto axis = [&](double v) {
    return std::clamp(static_cast<int>(std::floor(v / side_)), 0, dim_ - 1);
  };
  return {axis(p.x), axis(p.y)};
}

Point CellGrid::center(CellIndex c) const {
  // Centre of the clipped square.
  auto mid = [&](int k) {
    const double lo = k * side_;
    const double hi = std::min(1.0, (k + 1) * side_);
    return 0.5 * (lo + hi);
  };
  return {mid(c.i), mid(c.j)};
}

CellGrid build_grid(double t) {
  if (!(t > 0.0 && t <= std::sqrt(2.0) * (1.0 + 1e-12))) {
    throw InvalidParameter("build_grid: t must lie in (0, sqrt(2)]");
  }
  const double side = t / std::sqrt(2.0);
  // Guard against 1/side landing a hair above an integer through rounding.
  const int dim = std::max(1, static_cast<int>(std::ceil(1.0 / side - 1e-9)));
  return CellGrid(t, side, dim);
}

int compute_L(double delta) {
  if (!(delta >= 0.0)) throw InvalidParameter("compute_L: delta must be >= 0");
  return static_cast<int>(std::ceil(1.0 + std::sqrt(2.0) * (2.0 + delta)));
}

TdmaSchedule::TdmaSchedule(int L, const CellGrid& grid) : L_(L) {
  if (L < 1) throw InvalidParameter("TdmaSchedule: L must be >= 1");
  by_slot_.resize(static_cast<std::size_t>(L) * static_cast<std::size_t>(L));
  for (int j = 0; j < grid.rows(); ++j) {
    for (int i = 0; i < grid.cols(); ++i) {
      by_slot_[static_cast<std::size_t>(slot_of({i, j}))].push_back({i, j});
    }
  }
}

TdmaSchedule build_schedule(const CellGrid& grid, double delta) {
  return TdmaSchedule(compute_L(delta), grid);
}

CellOccupancy occupy(const NetworkInstance& net, const CellGrid& grid) {
  CellOccupancy occ;
  occ.members.resize(grid.cell_count());
  occ.cell_of_node.resize(net.size());
  for (std::size_t v = 0; v < net.size(); ++v) {
    const auto f = grid.flat(grid.cell_of(net[static_cast<NodeId>(v)]));
    occ.cell_of_node[v] = f;
    occ.members[f].push_back(static_cast<NodeId>(v));
  }
  return occ;
}

bool CellGraph::is_connected() const {
  if (vertices.size() <= 1) return true;
  std::vector<char> seen(adjacency.size(), 0);
  std::vector<std::size_t> stack{vertices.front()};
  seen[vertices.front()] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const auto c = stack.back();
    stack.pop_back();
    for (auto nb : adjacency[c]) {
      if (!seen[nb]) {
        seen[nb] = 1;
        ++reached;
        stack.push_back(nb);
      }
    }
  }
  return reached == vertices.size();
}

bool CellGraph::has_edge(std::size_t a, std::size_t b) const {
  const auto key = std::minmax(a, b);
  return std::binary_search(edges.begin(), edges.end(), std::pair{key.first, key.second});
}

CellGraph build_cell_graph(const NetworkInstance& net, const CellGrid& grid, double t) {
  CellGraph g;
  g.occupancy = occupy(net, grid);
  g.adjacency.resize(grid.cell_count());
  for (std::size_t f = 0; f < grid.cell_count(); ++f) {
    if (!g.occupancy.members[f].empty()) g.vertices.push_back(f);
  }
  const SpatialIndex index(net, t);
  for (std::size_t v = 0; v < net.size(); ++v) {
    const auto cv = g.occupancy.cell_of_node[v];
    index.for_each_within(net[static_cast<NodeId>(v)], t, [&](NodeId u) {
      const auto cu = g.occupancy.cell_of_node[u];
      if (cu > cv) g.edges.emplace_back(cv, cu);
    });
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  for (const auto& [a, b] : g.edges) {
    g.adjacency[a].push_back(b);
    g.adjacency[b].push_back(a);
  }
  return g;
}

namespace {

struct DiskSplit {
  std::vector<NodeId> tx;
  std::vector<NodeId> rx;
};

DiskSplit split_disk(const SpatialIndex& index, const NetworkInstance& net, const Point& center,
                     double t) {
  DiskSplit s;
  for (NodeId v : index.within(center, t / 2.0)) {
    // Nodes on the dividing line go to the transmitter side.
    (net[v].x <= center.x ? s.tx : s.rx).push_back(v);
  }
  return s;
}

void append_bipartite(const DiskSplit& s, std::vector<Link>& out) {
  for (NodeId a : s.tx) {
    for (NodeId b : s.rx) out.push_back({a, b});
  }
}

bool disk_inside(const Point& c, double radius) {
  return c.x - radius >= 0.0 && c.x + radius <= 1.0 && c.y - radius >= 0.0 && c.y + radius <= 1.0;
}

}  // namespace

TransmissionSet disk_bipartite_assignment(const NetworkInstance& net, const Point& center, double t,
                                          double delta) {
  if (!(t > 0.0)) throw InvalidParameter("disk_bipartite_assignment: t must be positive");
  if (!disk_inside(center, t / 2.0)) {
    throw InvalidParameter("disk_bipartite_assignment: centre must be >= t/2 from every border");
  }
  const SpatialIndex index(net, t);
  TransmissionSet ts{{}, Mode::MPT_MPR, t, delta};
  append_bipartite(split_disk(index, net, center, t), ts.links);
  std::sort(ts.links.begin(), ts.links.end());
  return ts;
}

SimultaneousLinks count_simultaneous_links(const NetworkInstance& net, double t, double delta) {
  if (net.size() >= 2 && t < connectivity_range(net.size()) * (1.0 - 1e-12)) {
    throw InvalidParameter("count_simultaneous_links: t below the connectivity range");
  }
  const CellGrid grid = build_grid(t);
  const TdmaSchedule schedule = build_schedule(grid, delta);
  const SpatialIndex index(net, t);
  SimultaneousLinks out;
  out.per_slot.assign(static_cast<std::size_t>(schedule.num_slots()), 0);
  double disk_sum = 0.0;
  double interior_sum = 0.0;
  std::size_t disks = 0;
  for (int s = 0; s < schedule.num_slots(); ++s) {
    for (const auto& c : schedule.cells_in_slot(s)) {
      const Point p = grid.center(c);
      const auto split = split_disk(index, net, p, t);
      const auto count = split.tx.size() * split.rx.size();
      out.per_slot[static_cast<std::size_t>(s)] += count;
      disk_sum += static_cast<double>(count);
      ++disks;
      if (disk_inside(p, t / 2.0)) {
        interior_sum += static_cast<double>(count);
        ++out.interior_disks;
      }
    }
  }
  const auto best = std::max_element(out.per_slot.begin(), out.per_slot.end());
  out.best_slot = static_cast<int>(best - out.per_slot.begin());
  out.links = *best;
  out.mean_per_disk = disks > 0 ? disk_sum / static_cast<double>(disks) : 0.0;
  out.mean_per_interior_disk =
      out.interior_disks > 0 ? interior_sum / static_cast<double>(out.interior_disks) : 0.0;
  return out;
}

TransmissionSet slot_assignment(const NetworkInstance& net, const CellGrid& grid,
                                const TdmaSchedule& schedule, int slot, double delta) {
  const SpatialIndex index(net, grid.t());
  TransmissionSet ts{{}, Mode::MPT_MPR, grid.t(), delta};
  for (const auto& c : schedule.cells_in_slot(slot)) {
    append_bipartite(split_disk(index, net, grid.center(c), grid.t()), ts.links);
  }
  std::sort(ts.links.begin(), ts.links.end());
  return ts;
}

void write_schedule_csv(std::ostream& out, const CellGrid& grid, const TdmaSchedule& schedule) {
  out << "cell_i,cell_j,slot\n";
  for (int i = 0; i < grid.cols(); ++i) {
    for (int j = 0; j < grid.rows(); ++j) out << i << ',' << j << ',' << schedule.slot_of({i, j}) << '\n';
  }
}

}  // namespace wlcap
