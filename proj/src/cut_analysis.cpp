#include "wlcap/cut_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>

namespace wlcap {

const char* to_string(CutAxis axis) { return axis == CutAxis::Vertical ? "vertical" : "horizontal"; }

Cut::Cut(CutAxis axis, double position) : axis_(axis), position_(position) {
  if (!(position >= 0.25 && position <= 0.75)) {
    throw InvalidParameter("Cut: position must lie in [0.25, 0.75]");
  }
}

Point Cut::point_on_line(double along_coord) const {
  return axis_ == CutAxis::Vertical ? Point{position_, along_coord} : Point{along_coord, position_};
}

UnicastReduction reduce_to_unicast(const NetworkInstance& net,
                                   std::span<const MulticastSession> sessions, const Cut& cut) {
  UnicastReduction out;
  out.pairs.reserve(sessions.size());
  for (const auto& s : sessions) {
    validate_session(s, net);
    const bool side = cut.in_region(net[s.source]);
    NodeId pick = s.destinations.front();
    bool found = false;
    for (NodeId d : s.destinations) {
      if (cut.in_region(net[d]) != side && (!found || d < pick)) {
        pick = d;
        found = true;
      }
    }
    out.pairs.emplace_back(s.source, pick);
  }
  return out;
}

std::size_t count_property_p(const NetworkInstance& net, std::span<const MulticastSession> sessions,
                             const Cut& cut) {
  std::size_t count = 0;
  for (const auto& s : sessions) {
    const bool side = cut.in_region(net[s.source]);
    count += std::any_of(s.destinations.begin(), s.destinations.end(),
                         [&](NodeId d) { return cut.in_region(net[d]) != side; });
  }
  return count;
}

namespace {

// Centres of the segments tiling the unit-length cut line, centred as a group.
std::vector<double> segment_centres(double spacing) {
  const auto k = static_cast<std::size_t>(std::floor(1.0 / spacing));
  std::vector<double> out;
  if (k == 0) {
    out.push_back(0.5);
    return out;
  }
  const double offset = (1.0 - static_cast<double>(k) * spacing) / 2.0;
  for (std::size_t i = 0; i < k; ++i) out.push_back(offset + spacing * (static_cast<double>(i) + 0.5));
  return out;
}

// Node of `ids` on the requested side closest to the cut line, then to c, then
// lowest id. Hugging the line keeps the far half-disk of the hub in reach.
std::optional<NodeId> hub_on_side(const NetworkInstance& net, const Cut& cut,
                                  const std::vector<NodeId>& ids, const Point& c, bool region) {
  std::optional<NodeId> best;
  std::pair<double, double> best_key{0.0, 0.0};
  for (NodeId v : ids) {
    if (cut.in_region(net[v]) != region) continue;
    const std::pair<double, double> key{std::abs(cut.across(net[v]) - cut.position()),
                                        distance_sq(net[v], c)};
    if (!best || key < best_key) {
      best = v;
      best_key = key;
    }
  }
  return best;
}

}  // namespace

TransmissionSet cut_witness(const NetworkInstance& net, const Cut& cut, Mode mode, double t,
                            double delta) {
  if (!(t > 0.0)) throw InvalidParameter("cut_witness: t must be positive");
  if (!(delta >= 0.0)) throw InvalidParameter("cut_witness: delta must be >= 0");
  const SpatialIndex index(net, t);
  FeasibilityTracker tracker(net, mode, t, delta);
  const bool hub = mode == Mode::MPT || mode == Mode::MPR;
  const double spacing = (hub ? 3.0 + delta : 2.0 + delta) * t;
  for (double u : segment_centres(spacing)) {
    const Point c = cut.point_on_line(u);
    const auto disk = index.within(c, t / 2.0);
    switch (mode) {
      case Mode::PTP: {
        std::optional<NodeId> a, b;
        for (NodeId v : disk) {
          auto& slot = cut.in_region(net[v]) ? a : b;
          if (!slot) slot = v;
        }
        if (a && b) tracker.try_add({*a, *b});
        break;
      }
      case Mode::MPT: {
        const auto h = hub_on_side(net, cut, disk, c, true);
        if (!h) break;
        for (NodeId v : index.within(net[*h], t)) {
          if (!cut.in_region(net[v])) tracker.try_add({*h, v});
        }
        break;
      }
      case Mode::MPR: {
        const auto h = hub_on_side(net, cut, disk, c, false);
        if (!h) break;
        for (NodeId v : index.within(net[*h], t)) {
          if (cut.in_region(net[v])) tracker.try_add({v, *h});
        }
        break;
      }
      case Mode::MPT_MPR: {
        for (NodeId a : disk) {
          if (!cut.in_region(net[a])) continue;
          for (NodeId b : disk) {
            if (!cut.in_region(net[b])) tracker.try_add({a, b});
          }
        }
        break;
      }
    }
  }
  auto ts = tracker.snapshot();
  std::sort(ts.links.begin(), ts.links.end());
  if (!is_feasible(ts, net)) throw std::logic_error("cut_witness: construction is not feasible");
  return ts;
}

std::size_t cut_capacity(const NetworkInstance& net, const Cut& cut, Mode mode, double t,
                         double delta) {
  if (net.size() >= 2 && t < connectivity_range(net.size()) * (1.0 - 1e-12)) {
    throw InvalidParameter("cut_capacity: t below the connectivity range");
  }
  return cut_witness(net, cut, mode, t, delta).size();
}

double nc_upper_bound_rate(Mode mode, std::size_t n, double t) {
  const double nn = static_cast<double>(n);
  switch (mode) {
    case Mode::PTP: return 1.0 / (nn * t);
    case Mode::MPT:
    case Mode::MPR: return t;
    case Mode::MPT_MPR: return nn * t * t * t;
  }
  return 0.0;
}

void write_cut_csv_header(std::ostream& out) { out << "mode,n,t,cut_axis,cut_pos,links\n"; }

void write_cut_csv_row(std::ostream& out, Mode mode, std::size_t n, double t, const Cut& cut,
                       std::size_t links) {
  const auto old_precision = out.precision(12);
  out << to_string(mode) << ',' << n << ',' << t << ',' << to_string(cut.axis()) << ','
      << cut.position() << ',' << links << '\n';
  out.precision(old_precision);
}

void write_property_p_csv_header(std::ostream& out) { out << "n,m,seed,fraction\n"; }

void write_property_p_csv_row(std::ostream& out, std::size_t n, std::size_t m, std::uint64_t seed,
                              double fraction) {
  const auto old_precision = out.precision(12);
  out << n << ',' << m << ',' << seed << ',' << fraction << '\n';
  out.precision(old_precision);
}

}  // namespace wlcap
