#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "wlcap/geom.hpp"
#include "wlcap/multicast_trees.hpp"
#include "wlcap/protocol_model.hpp"

namespace wlcap {

enum class CutAxis : std::uint8_t { Vertical, Horizontal };

const char* to_string(CutAxis axis);

/// A line splitting the square. Region R holds the points whose coordinate
/// across the line is below `position`; everything else is its complement.
class Cut {
 public:
  /// position must lie in [0.25, 0.75] so both sides keep area Theta(1).
  explicit Cut(CutAxis axis = CutAxis::Vertical, double position = 0.5);

  CutAxis axis() const noexcept { return axis_; }
  double position() const noexcept { return position_; }
  double across(const Point& p) const { return axis_ == CutAxis::Vertical ? p.x : p.y; }
  double along(const Point& p) const { return axis_ == CutAxis::Vertical ? p.y : p.x; }
  bool in_region(const Point& p) const { return across(p) < position_; }
  Point point_on_line(double along_coord) const;

 private:
  CutAxis axis_;
  double position_;
};

/// One (source, chosen destination) pair per session, in session order.
struct UnicastReduction {
  std::vector<std::pair<NodeId, NodeId>> pairs;
};

/// Sessions with property P use their lowest-id destination across the cut;
/// the others keep their first destination.
UnicastReduction reduce_to_unicast(const NetworkInstance& net,
                                   std::span<const MulticastSession> sessions, const Cut& cut);

/// Sessions whose source and at least one destination lie on opposite sides.
std::size_t count_property_p(const NetworkInstance& net, std::span<const MulticastSession> sessions,
                             const Cut& cut);

/// Feasible link set whose links all cross the cut from R to its complement.
///
/// The cut line is tiled with equal segments, each centred on a point c of the line:
///   PTP      spacing (2+delta) t: one pair, both ends within t/2 of c;
///   MPT      spacing (3+delta) t: the R-side node within t/2 of c closest to the
///            line sends to
///            every complement node within t of it;
///   MPR      the mirror image: that complement node receives from every
///            R node within t of it;
///   MPT_MPR  spacing (2+delta) t: every R node within t/2 of c links to every
///            complement node within t/2 of c.
/// Links go through a FeasibilityTracker and the result is checked with is_feasible.
TransmissionSet cut_witness(const NetworkInstance& net, const Cut& cut, Mode mode, double t,
                            double delta);

/// Size of cut_witness. Requires t >= connectivity_range(n).
std::size_t cut_capacity(const NetworkInstance& net, const Cut& cut, Mode mode, double t,
                         double delta);

/// Cut capacity order divided by the Theta(n) property-P sessions, unit constants:
/// PTP 1/(n t); MPT, MPR t; MPT_MPR n t^3.
double nc_upper_bound_rate(Mode mode, std::size_t n, double t);

/// `mode,n,t,cut_axis,cut_pos,links`
void write_cut_csv_header(std::ostream& out);
void write_cut_csv_row(std::ostream& out, Mode mode, std::size_t n, double t, const Cut& cut,
                       std::size_t links);

/// `n,m,seed,fraction`
void write_property_p_csv_header(std::ostream& out);
void write_property_p_csv_row(std::ostream& out, std::size_t n, std::size_t m, std::uint64_t seed,
                              double fraction);

}  // namespace wlcap
