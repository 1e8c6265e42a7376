#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "wlcap/geom.hpp"
#include "wlcap/protocol_model.hpp"

namespace wlcap {

struct SimConfig {
  std::size_t n = 1000;
  double t = 0.1;
  double delta = 0.0;
  std::size_t m = 3;
  bool every_node_a_source = true;
  std::size_t slots = 0;        // total slots; 0 measures for as long as the warm-up
  std::size_t warmup = 0;       // discarded slots; 0 picks 5 L^2 + 4 (tree depth) L^2
  std::size_t window = 0;       // packets in flight per session; 0 picks a mode-dependent default
  std::size_t rx_attempts = 12; // receiver candidates tried per packet and slot
  std::uint64_t seed = 1;
};

struct ThroughputReport {
  Mode mode = Mode::PTP;
  SimConfig config;             // echo, with the automatic values resolved
  std::vector<double> rates;    // delivered multicast packets per slot, per session
  double mean = 0.0;
  int L = 0;
  std::size_t measured_slots = 0;
  std::uint64_t injected = 0;   // over the whole run
  std::uint64_t delivered = 0;  // over the whole run
  std::uint64_t transmissions = 0;
  std::size_t max_links_in_slot = 0;
  std::size_t tree_depth = 0;      // longest source-to-vertex hop count
  bool all_slots_feasible = true;  // only filled when audit is on
};

struct SimOptions {
  bool audit = false;  // re-check every slot's link set with is_feasible
};

/// Closed-loop multicast simulation over the L^2-slot cell schedule.
///
/// Every node sources one session to m random destinations, routed with
/// route_session. Each session keeps up to `window` packets in flight and
/// injects a new one whenever a packet reaches all its destinations. In a slot,
/// every tree edge whose upstream cell is active tries to push its next packets
/// one hop; candidate links go through a FeasibilityTracker for `mode` in
/// order of source NodeId, in repeated rounds until nothing more fits. A packet
/// received in a slot can be forwarded from the next slot on.
///
/// A relay cell may spread the packets of one tree edge over several of its
/// nodes: the receiver of a packet is picked among the cell's nodes that can
/// still reach the next cell, in a rotation that depends on (session, packet).
///
/// Throws RoutingFailure (with the session id) when a session cannot be routed.
ThroughputReport simulate(const SimConfig& config, Mode mode, const SimOptions& options = {});

/// Order formulas with unit constants.
/// PTP: 1/(sqrt(m) n t), or 1/(n t) with network coding; MPT, MPR: t;
/// MPT_MPR: n t^3 / sqrt(m) with or without network coding.
double theoretical_capacity(Mode mode, bool nc, std::size_t n, double t, std::size_t m);

/// MPT_MPR over PTP capacity, n^2 t^4. Requires t >= connectivity_range(n).
double gain_vs_ptp(std::size_t n, double t, std::size_t m);

/// Default number of packets in flight per session for a mode.
std::size_t default_window(Mode mode, std::size_t n, double t);

/// `mode,nc,n,t,delta,m,seed,session_id,rate`
void write_report_csv(std::ostream& out, const ThroughputReport& report, bool header = true);

}  // namespace wlcap
