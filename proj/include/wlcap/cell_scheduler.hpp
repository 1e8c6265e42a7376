#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "wlcap/geom.hpp"
#include "wlcap/protocol_model.hpp"

namespace wlcap {

/// Column i (x axis) and row j (y axis) of a grid cell.
struct CellIndex {
  int i = 0;
  int j = 0;

  friend auto operator<=>(const CellIndex&, const CellIndex&) = default;
};

/// Square cells of side t/sqrt(2), so a cell's diagonal equals the range t and
/// any two nodes in one cell can talk. Cell (i,j) covers
/// [i*side, (i+1)*side) x [j*side, (j+1)*side), clipped to the unit square.
class CellGrid {
 public:
  CellGrid(double t, double side, int dim) : t_(t), side_(side), dim_(dim) {}

  double t() const noexcept { return t_; }
  double side() const noexcept { return side_; }
  int cols() const noexcept { return dim_; }
  int rows() const noexcept { return dim_; }
  std::size_t cell_count() const noexcept {
    return static_cast<std::size_t>(dim_) * static_cast<std::size_t>(dim_);
  }

  CellIndex cell_of(const Point& p) const;
  Point center(CellIndex c) const;
  std::size_t flat(CellIndex c) const {
    return static_cast<std::size_t>(c.j) * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(c.i);
  }
  CellIndex unflat(std::size_t f) const {
    return {static_cast<int>(f % static_cast<std::size_t>(dim_)),
            static_cast<int>(f / static_cast<std::size_t>(dim_))};
  }
  bool contains(CellIndex c) const { return c.i >= 0 && c.j >= 0 && c.i < dim_ && c.j < dim_; }

 private:
  double t_;
  double side_;
  int dim_;
};

CellGrid build_grid(double t);

/// ceil(1 + sqrt(2) * (2 + delta)): cells apart so that same-slot cells never interfere.
int compute_L(double delta);

/// L^2-slot TDMA: cell (i,j) is active in slot (i mod L) * L + (j mod L).
class TdmaSchedule {
 public:
  TdmaSchedule(int L, const CellGrid& grid);

  int L() const noexcept { return L_; }
  int num_slots() const noexcept { return L_ * L_; }
  int slot_of(CellIndex c) const { return (c.i % L_) * L_ + (c.j % L_); }
  const std::vector<CellIndex>& cells_in_slot(int slot) const {
    return by_slot_[static_cast<std::size_t>(slot)];
  }

 private:
  int L_;
  std::vector<std::vector<CellIndex>> by_slot_;
};

TdmaSchedule build_schedule(const CellGrid& grid, double delta);

/// Node ids of each cell, ascending, indexed by CellGrid::flat.
struct CellOccupancy {
  std::vector<std::vector<NodeId>> members;
  std::vector<std::size_t> cell_of_node;  // flat cell per NodeId
};

CellOccupancy occupy(const NetworkInstance& net, const CellGrid& grid);

/// Occupied cells, joined when some pair of their nodes is within t.
struct CellGraph {
  CellOccupancy occupancy;
  std::vector<std::size_t> vertices;                     // flat indices, ascending
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // (a, b), a < b, sorted
  std::vector<std::vector<std::size_t>> adjacency;       // by flat index

  bool is_connected() const;
  bool has_edge(std::size_t a, std::size_t b) const;
};

CellGraph build_cell_graph(const NetworkInstance& net, const CellGrid& grid, double t);

/// Transceiver disk of radius t/2 at `center`: nodes with x <= center.x transmit,
/// the rest receive, and every transmitter links to every receiver (MPT_MPR).
/// Requires the disk to lie inside the unit square.
TransmissionSet disk_bipartite_assignment(const NetworkInstance& net, const Point& center, double t,
                                          double delta = 0.0);

/// Per-slot sums of the disk construction placed at the centre of every active cell.
struct SimultaneousLinks {
  std::size_t links = 0;               // best slot's total
  int best_slot = 0;
  std::vector<std::size_t> per_slot;   // total per slot
  double mean_per_disk = 0.0;          // over every cell's disk
  double mean_per_interior_disk = 0.0; // over disks wholly inside the square
  std::size_t interior_disks = 0;
};

SimultaneousLinks count_simultaneous_links(const NetworkInstance& net, double t, double delta);

/// Union of the disk assignments of one slot's active cells.
TransmissionSet slot_assignment(const NetworkInstance& net, const CellGrid& grid,
                                const TdmaSchedule& schedule, int slot, double delta);

/// `cell_i,cell_j,slot`
void write_schedule_csv(std::ostream& out, const CellGrid& grid, const TdmaSchedule& schedule);

}  // namespace wlcap
