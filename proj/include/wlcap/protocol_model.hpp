#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "wlcap/geom.hpp"

namespace wlcap {

/// Point-to-point, multi-packet transmission, multi-packet reception, or both.
enum class Mode { PTP, MPT, MPR, MPT_MPR };

inline constexpr Mode kAllModes[] = {Mode::PTP, Mode::MPT, Mode::MPR, Mode::MPT_MPR};

std::string_view to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view text);

inline bool allows_multi_tx(Mode m) { return m == Mode::MPT || m == Mode::MPT_MPR; }
inline bool allows_multi_rx(Mode m) { return m == Mode::MPR || m == Mode::MPT_MPR; }

struct Link {
  NodeId tx;
  NodeId rx;

  friend auto operator<=>(const Link&, const Link&) = default;
};

/// Links claimed to be simultaneously active under one mode, range and guard factor.
struct TransmissionSet {
  std::vector<Link> links;
  Mode mode = Mode::PTP;
  double range = 0.0;
  double delta = 0.0;

  std::size_t size() const noexcept { return links.size(); }
  double guard() const noexcept { return (1.0 + delta) * range; }
};

/// Exact check of a whole set.
///
/// Rules, for receiver j and any transmitter k of the set:
///   * every link spans at most `range`; no node both sends and receives;
///     duplicate (tx, rx) pairs and tx == rx are infeasible;
///   * PTP: every node is in at most one link. MPT: each receiver in exactly one
///     link. MPR: each transmitter in exactly one link. MPT_MPR: no degree limit;
///   * PTP, MPT, MPR: a transmitter not linked to j must satisfy |k - j| >= (1+delta)*range;
///   * MPT_MPR: a transmitter not linked to j may sit within `range` of j (an MPR
///     receiver decodes it and discards it), but one in the guard annulus
///     (range, (1+delta)*range) interferes.
/// Ties resolve toward feasibility: |tx - rx| == range and |k - j| == (1+delta)*range
/// are both allowed.
///
/// Throws InvalidParameter on a NodeId outside the instance.
bool is_feasible(const TransmissionSet& ts, const NetworkInstance& net);

/// Incremental form of is_feasible for greedy admission: try_add() accepts a link
/// only if the current set plus that link is feasible. Every mode is monotone
/// under the rules above, so a greedy sequence of accepted links is always a
/// feasible set. reset() is O(links added since the last reset).
class FeasibilityTracker {
 public:
  FeasibilityTracker(const NetworkInstance& net, Mode mode, double range, double delta);

  bool can_add(Link link) const;
  bool try_add(Link link);
  void reset();

  std::size_t size() const noexcept { return links_.size(); }
  const std::vector<Link>& links() const noexcept { return links_; }
  TransmissionSet snapshot() const;

  Mode mode() const noexcept { return mode_; }

 private:
  enum class Role : std::uint8_t { Idle, Tx, Rx };

  bool linked(NodeId tx, NodeId rx) const;
  bool interferes(double d2, bool is_linked) const;
  std::size_t bucket_of(const Point& p) const;
  template <typename Fn>
  bool any_near(const std::vector<std::vector<NodeId>>& buckets, const Point& c, Fn&& fn) const;

  const NetworkInstance* net_;
  Mode mode_;
  double range_;
  double delta_;
  double range2_;
  double guard2_;
  double bucket_side_;
  std::size_t dim_;

  std::vector<Role> role_;
  std::vector<std::uint32_t> tx_deg_;
  std::vector<std::uint32_t> rx_deg_;
  std::vector<std::vector<NodeId>> tx_buckets_;
  std::vector<std::vector<NodeId>> rx_buckets_;
  std::vector<std::size_t> touched_buckets_;
  std::vector<NodeId> touched_nodes_;
  std::vector<Link> links_;
  std::vector<std::vector<NodeId>> out_;  // MPT_MPR only
  std::vector<std::vector<NodeId>> in_;
};

/// Maximum-cardinality feasible set by exhaustive search over all
/// (transmitter set, receiver set) labelings; n <= 12 else SizeLimit.
TransmissionSet max_feasible_brute(const NetworkInstance& net, Mode mode, double range,
                                   double delta);

/// Order of the total active area: 1, n t^2, or n^2 t^4.
double taa_upper_bound(Mode mode, std::size_t n, double t);

/// Comment header `# mode=..,range=..,delta=..` then `tx,rx` rows.
void write_transmission_set_csv(std::ostream& out, const TransmissionSet& ts);
TransmissionSet read_transmission_set_csv(std::istream& in);

}  // namespace wlcap
