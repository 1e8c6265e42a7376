#include "wlcap/protocol_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

namespace wlcap {

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::PTP: return "PTP";
    case Mode::MPT: return "MPT";
    case Mode::MPR: return "MPR";
    case Mode::MPT_MPR: return "MPT_MPR";
  }
  return "?";
}

std::optional<Mode> parse_mode(std::string_view text) {
  for (Mode m : kAllModes) {
    if (text == to_string(m)) return m;
  }
  if (text == "MPT+MPR") return Mode::MPT_MPR;
  return std::nullopt;
}

namespace {

// Unlinked transmitter at squared distance d2 from a receiver.
bool unlinked_interferes(Mode mode, double d2, double range2, double guard2) {
  if (d2 >= guard2) return false;
  return mode != Mode::MPT_MPR || d2 > range2;
}

}  // namespace

bool is_feasible(const TransmissionSet& ts, const NetworkInstance& net) {
  const std::size_t n = net.size();
  for (const auto& l : ts.links) {
    if (l.tx >= n || l.rx >= n) {
      throw InvalidParameter("is_feasible: unknown NodeId in link");
    }
  }
  if (ts.links.empty()) return true;
  const double range2 = ts.range * ts.range;
  const double guard2 = ts.guard() * ts.guard();

  std::vector<std::uint32_t> tx_deg(n, 0), rx_deg(n, 0);
  std::vector<Link> sorted = ts.links;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& l = sorted[i];
    if (l.tx == l.rx) return false;
    if (i > 0 && sorted[i - 1] == l) return false;
    if (distance_sq(net[l.tx], net[l.rx]) > range2) return false;
    ++tx_deg[l.tx];
    ++rx_deg[l.rx];
  }
  for (std::size_t v = 0; v < n; ++v) {
    if (tx_deg[v] > 0 && rx_deg[v] > 0) return false;  // half-duplex
    switch (ts.mode) {
      case Mode::PTP:
        if (tx_deg[v] > 1 || rx_deg[v] > 1) return false;
        break;
      case Mode::MPT:
        if (rx_deg[v] > 1) return false;
        break;
      case Mode::MPR:
        if (tx_deg[v] > 1) return false;
        break;
      case Mode::MPT_MPR:
        break;
    }
  }

  // Senders per receiver, for the "is k linked to j" test.
  std::vector<Link> by_rx = ts.links;
  std::sort(by_rx.begin(), by_rx.end(),
            [](const Link& a, const Link& b) { return std::tie(a.rx, a.tx) < std::tie(b.rx, b.tx); });
  std::vector<NodeId> transmitters;
  std::vector<NodeId> receivers;
  for (std::size_t v = 0; v < n; ++v) {
    if (tx_deg[v] > 0) transmitters.push_back(static_cast<NodeId>(v));
    if (rx_deg[v] > 0) receivers.push_back(static_cast<NodeId>(v));
  }

  // Bucket the transmitters with side >= guard so each receiver scans a 3x3 block.
  const double guard = ts.guard();
  const std::size_t dim =
      std::clamp<std::size_t>(static_cast<std::size_t>(1.0 / std::max(guard, 1e-9)), 1, 1024);
  const double side = 1.0 / static_cast<double>(dim);
  auto cell = [&](double v) {
    return static_cast<std::size_t>(
        std::clamp(static_cast<long>(std::floor(v / side)), 0L, static_cast<long>(dim) - 1));
  };
  std::vector<std::vector<NodeId>> buckets(dim * dim);
  for (NodeId k : transmitters) buckets[cell(net[k].y) * dim + cell(net[k].x)].push_back(k);

  for (NodeId j : receivers) {
    const Point pj = net[j];
    auto first = std::lower_bound(by_rx.begin(), by_rx.end(), j,
                                  [](const Link& l, NodeId id) { return l.rx < id; });
    auto last = first;
    while (last != by_rx.end() && last->rx == j) ++last;
    const long ci = static_cast<long>(cell(pj.x));
    const long cj = static_cast<long>(cell(pj.y));
    for (long bj = std::max(0L, cj - 1); bj <= std::min<long>(dim - 1, cj + 1); ++bj) {
      for (long bi = std::max(0L, ci - 1); bi <= std::min<long>(dim - 1, ci + 1); ++bi) {
        for (NodeId k : buckets[static_cast<std::size_t>(bj) * dim + static_cast<std::size_t>(bi)]) {
          const double d2 = distance_sq(net[k], pj);
          if (!unlinked_interferes(ts.mode, d2, range2, guard2)) continue;
          const bool is_linked =
              std::any_of(first, last, [k](const Link& l) { return l.tx == k; });
          if (!is_linked) return false;
        }
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

FeasibilityTracker::FeasibilityTracker(const NetworkInstance& net, Mode mode, double range,
                                       double delta)
    : net_(&net),
      mode_(mode),
      range_(range),
      delta_(delta),
      range2_(range * range),
      guard2_((1.0 + delta) * range * (1.0 + delta) * range) {
  if (!(range > 0.0)) throw InvalidParameter("FeasibilityTracker: range must be positive");
  if (!(delta >= 0.0)) throw InvalidParameter("FeasibilityTracker: delta must be >= 0");
  const double guard = (1.0 + delta) * range;
  dim_ = std::clamp<std::size_t>(static_cast<std::size_t>(1.0 / guard), 1, 512);
  bucket_side_ = 1.0 / static_cast<double>(dim_);
  role_.assign(net.size(), Role::Idle);
  tx_deg_.assign(net.size(), 0);
  rx_deg_.assign(net.size(), 0);
  if (mode == Mode::MPT_MPR) {
    out_.resize(net.size());
    in_.resize(net.size());
  }
  tx_buckets_.resize(dim_ * dim_);
  rx_buckets_.resize(dim_ * dim_);
}

std::size_t FeasibilityTracker::bucket_of(const Point& p) const {
  auto c = [&](double v) {
    return static_cast<std::size_t>(std::clamp(static_cast<long>(std::floor(v / bucket_side_)), 0L,
                                               static_cast<long>(dim_) - 1));
  };
  return c(p.y) * dim_ + c(p.x);
}

template <typename Fn>
bool FeasibilityTracker::any_near(const std::vector<std::vector<NodeId>>& buckets, const Point& c,
                                  Fn&& fn) const {
  const std::size_t b = bucket_of(c);
  const long ci = static_cast<long>(b % dim_);
  const long cj = static_cast<long>(b / dim_);
  const long last = static_cast<long>(dim_) - 1;
  for (long bj = std::max(0L, cj - 1); bj <= std::min(last, cj + 1); ++bj) {
    for (long bi = std::max(0L, ci - 1); bi <= std::min(last, ci + 1); ++bi) {
      for (NodeId v : buckets[static_cast<std::size_t>(bj) * dim_ + static_cast<std::size_t>(bi)]) {
        if (fn(v)) return true;
      }
    }
  }
  return false;
}

bool FeasibilityTracker::linked(NodeId tx, NodeId rx) const {
  // Only reached in MPT_MPR, where both endpoints may carry many links.
  const auto& outs = out_[tx];
  const auto& ins = in_[rx];
  if (outs.size() <= ins.size()) return std::find(outs.begin(), outs.end(), rx) != outs.end();
  return std::find(ins.begin(), ins.end(), tx) != ins.end();
}

bool FeasibilityTracker::interferes(double d2, bool is_linked) const {
  return !is_linked && unlinked_interferes(mode_, d2, range2_, guard2_);
}

bool FeasibilityTracker::can_add(Link link) const {
  const auto& net = *net_;
  const NodeId k = link.tx;
  const NodeId j = link.rx;
  if (k >= net.size() || j >= net.size()) throw InvalidParameter("FeasibilityTracker: unknown NodeId");
  if (k == j) return false;
  if (role_[k] == Role::Rx || role_[j] == Role::Tx) return false;
  const Point pk = net[k];
  const Point pj = net[j];
  if (distance_sq(pk, pj) > range2_) return false;
  switch (mode_) {
    case Mode::PTP:
      if (tx_deg_[k] > 0 || rx_deg_[j] > 0) return false;
      break;
    case Mode::MPT:
      if (rx_deg_[j] > 0) return false;
      break;
    case Mode::MPR:
      if (tx_deg_[k] > 0) return false;
      break;
    case Mode::MPT_MPR:
      if (tx_deg_[k] > 0 && rx_deg_[j] > 0 && linked(k, j)) return false;
      break;
  }
  // With no guard annulus an MPT_MPR set cannot interfere.
  if (mode_ == Mode::MPT_MPR && guard2_ <= range2_) return true;
  if (role_[k] == Role::Idle) {
    // k is a new transmitter: it is unlinked to every existing receiver except j.
    const bool bad = any_near(rx_buckets_, pk, [&](NodeId other) {
      return other != j && interferes(distance_sq(net[other], pk), false);
    });
    if (bad) return false;
  }
  if (role_[j] == Role::Idle) {
    const bool bad = any_near(tx_buckets_, pj, [&](NodeId other) {
      return other != k && interferes(distance_sq(net[other], pj), false);
    });
    if (bad) return false;
  }
  return true;
}

bool FeasibilityTracker::try_add(Link link) {
  if (!can_add(link)) return false;
  const auto& net = *net_;
  if (role_[link.tx] == Role::Idle) {
    role_[link.tx] = Role::Tx;
    const auto b = bucket_of(net[link.tx]);
    if (tx_buckets_[b].empty() && rx_buckets_[b].empty()) touched_buckets_.push_back(b);
    tx_buckets_[b].push_back(link.tx);
    touched_nodes_.push_back(link.tx);
  }
  if (role_[link.rx] == Role::Idle) {
    role_[link.rx] = Role::Rx;
    const auto b = bucket_of(net[link.rx]);
    if (tx_buckets_[b].empty() && rx_buckets_[b].empty()) touched_buckets_.push_back(b);
    rx_buckets_[b].push_back(link.rx);
    touched_nodes_.push_back(link.rx);
  }
  ++tx_deg_[link.tx];
  ++rx_deg_[link.rx];
  if (mode_ == Mode::MPT_MPR) {
    out_[link.tx].push_back(link.rx);
    in_[link.rx].push_back(link.tx);
  }
  links_.push_back(link);
  return true;
}

void FeasibilityTracker::reset() {
  for (NodeId v : touched_nodes_) {
    role_[v] = Role::Idle;
    tx_deg_[v] = 0;
    rx_deg_[v] = 0;
    if (mode_ == Mode::MPT_MPR) {
      out_[v].clear();
      in_[v].clear();
    }
  }
  for (auto b : touched_buckets_) {
    tx_buckets_[b].clear();
    rx_buckets_[b].clear();
  }
  touched_nodes_.clear();
  touched_buckets_.clear();
  links_.clear();
}

TransmissionSet FeasibilityTracker::snapshot() const {
  return TransmissionSet{links_, mode_, range_, delta_};
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kBruteLimit = 12;

// Kuhn's augmenting paths; adj[left] lists right vertices. Returns match of right -> left.
struct SmallMatcher {
  const std::vector<std::vector<int>>& adj;
  std::vector<int> match_right;
  std::vector<char> seen;

  SmallMatcher(const std::vector<std::vector<int>>& a, std::size_t right)
      : adj(a), match_right(right, -1), seen(right, 0) {}

  bool augment(int u) {
    for (int v : adj[static_cast<std::size_t>(u)]) {
      if (seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = 1;
      if (match_right[static_cast<std::size_t>(v)] < 0 ||
          augment(match_right[static_cast<std::size_t>(v)])) {
        match_right[static_cast<std::size_t>(v)] = u;
        return true;
      }
    }
    return false;
  }

  // True if every left vertex gets matched.
  bool saturate_left() {
    for (std::size_t u = 0; u < adj.size(); ++u) {
      std::fill(seen.begin(), seen.end(), 0);
      if (!augment(static_cast<int>(u))) return false;
    }
    return true;
  }
};

// Partners a single-sender receiver (or single-receiver sender) may use: the
// unique node of `others` inside the guard zone, or, with none inside it, any
// node exactly at the range boundary.
std::vector<int> sole_partners(int self, const std::vector<int>& others,
                               const std::array<std::array<double, kBruteLimit>, kBruteLimit>& d2,
                               double range2, double guard2) {
  std::vector<int> near;
  for (int o : others) {
    if (d2[static_cast<std::size_t>(self)][static_cast<std::size_t>(o)] < guard2) near.push_back(o);
  }
  if (near.size() >= 2) return {};
  std::vector<int> out;
  const auto& pool = near.empty() ? others : near;
  for (int o : pool) {
    if (d2[static_cast<std::size_t>(self)][static_cast<std::size_t>(o)] <= range2) out.push_back(o);
  }
  return out;
}

// Best link set for an exact labeling, or empty if the labeling admits none in
// which every labelled node carries at least one link.
std::vector<Link> best_for_labeling(Mode mode, const std::vector<int>& tx,
                                    const std::vector<int>& rx,
                                    const std::array<std::array<double, kBruteLimit>, kBruteLimit>& d2,
                                    double range2, double guard2) {
  auto at = [&](int a, int b) { return d2[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]; };
  std::vector<Link> links;
  switch (mode) {
    case Mode::MPT_MPR: {
      std::vector<int> tx_hits(tx.size(), 0), rx_hits(rx.size(), 0);
      for (std::size_t a = 0; a < tx.size(); ++a) {
        for (std::size_t b = 0; b < rx.size(); ++b) {
          const double d = at(tx[a], rx[b]);
          if (d > range2 && d < guard2) return {};
          if (d <= range2) {
            links.push_back({static_cast<NodeId>(tx[a]), static_cast<NodeId>(rx[b])});
            ++tx_hits[a];
            ++rx_hits[b];
          }
        }
      }
      if (std::count(tx_hits.begin(), tx_hits.end(), 0) > 0) return {};
      if (std::count(rx_hits.begin(), rx_hits.end(), 0) > 0) return {};
      return links;
    }
    case Mode::PTP:
    case Mode::MPT: {
      if (mode == Mode::PTP && tx.size() != rx.size()) return {};
      // allowed[b] = transmitter indices receiver b may be served by.
      std::vector<std::vector<int>> allowed(rx.size());
      std::vector<std::vector<int>> by_tx(tx.size());
      for (std::size_t b = 0; b < rx.size(); ++b) {
        for (int k : sole_partners(rx[b], tx, d2, range2, guard2)) {
          const auto a = static_cast<int>(std::find(tx.begin(), tx.end(), k) - tx.begin());
          allowed[b].push_back(a);
          by_tx[static_cast<std::size_t>(a)].push_back(static_cast<int>(b));
        }
        if (allowed[b].empty()) return {};
      }
      SmallMatcher matcher(by_tx, rx.size());
      if (!matcher.saturate_left()) return {};
      for (std::size_t b = 0; b < rx.size(); ++b) {
        const int a = matcher.match_right[b] >= 0 ? matcher.match_right[b] : allowed[b].front();
        links.push_back({static_cast<NodeId>(tx[static_cast<std::size_t>(a)]),
                         static_cast<NodeId>(rx[b])});
      }
      return links;
    }
    case Mode::MPR: {
      std::vector<std::vector<int>> allowed(tx.size());
      std::vector<std::vector<int>> by_rx(rx.size());
      for (std::size_t a = 0; a < tx.size(); ++a) {
        for (int j : sole_partners(tx[a], rx, d2, range2, guard2)) {
          const auto b = static_cast<int>(std::find(rx.begin(), rx.end(), j) - rx.begin());
          allowed[a].push_back(b);
          by_rx[static_cast<std::size_t>(b)].push_back(static_cast<int>(a));
        }
        if (allowed[a].empty()) return {};
      }
      SmallMatcher matcher(by_rx, tx.size());
      if (!matcher.saturate_left()) return {};
      for (std::size_t a = 0; a < tx.size(); ++a) {
        const int b = matcher.match_right[a] >= 0 ? matcher.match_right[a] : allowed[a].front();
        links.push_back({static_cast<NodeId>(tx[a]), static_cast<NodeId>(rx[static_cast<std::size_t>(b)])});
      }
      return links;
    }
  }
  return links;
}

}  // namespace

TransmissionSet max_feasible_brute(const NetworkInstance& net, Mode mode, double range,
                                   double delta) {
  const std::size_t n = net.size();
  if (n > kBruteLimit) throw SizeLimit("max_feasible_brute: n must be <= 12");
  TransmissionSet best{{}, mode, range, delta};
  const double range2 = range * range;
  const double guard2 = best.guard() * best.guard();
  std::array<std::array<double, kBruteLimit>, kBruteLimit> d2{};
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      d2[a][b] = distance_sq(net[static_cast<NodeId>(a)], net[static_cast<NodeId>(b)]);
    }
  }
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= 3;
  std::vector<int> tx, rx;
  for (std::size_t code = 0; code < total; ++code) {
    tx.clear();
    rx.clear();
    std::size_t c = code;
    for (std::size_t v = 0; v < n; ++v, c /= 3) {
      if (c % 3 == 1) tx.push_back(static_cast<int>(v));
      if (c % 3 == 2) rx.push_back(static_cast<int>(v));
    }
    if (tx.empty() || rx.empty()) continue;
    // Upper bound on what this labeling could yield; skip hopeless ones.
    const std::size_t cap = mode == Mode::MPT_MPR ? tx.size() * rx.size()
                            : mode == Mode::MPT  ? rx.size()
                            : mode == Mode::MPR  ? tx.size()
                                                 : std::min(tx.size(), rx.size());
    if (cap <= best.links.size()) continue;
    auto links = best_for_labeling(mode, tx, rx, d2, range2, guard2);
    if (links.size() > best.links.size()) best.links = std::move(links);
  }
  std::sort(best.links.begin(), best.links.end());
  return best;
}

double taa_upper_bound(Mode mode, std::size_t n, double t) {
  const double nn = static_cast<double>(n);
  switch (mode) {
    case Mode::PTP: return 1.0;
    case Mode::MPT:
    case Mode::MPR: return nn * t * t;
    case Mode::MPT_MPR: return nn * nn * t * t * t * t;
  }
  return 0.0;
}

void write_transmission_set_csv(std::ostream& out, const TransmissionSet& ts) {
  const auto old_precision = out.precision(12);
  out << "# mode=" << to_string(ts.mode) << ",range=" << ts.range << ",delta=" << ts.delta << '\n';
  out << "tx,rx\n";
  for (const auto& l : ts.links) out << l.tx << ',' << l.rx << '\n';
  out.precision(old_precision);
}

TransmissionSet read_transmission_set_csv(std::istream& in) {
  TransmissionSet ts;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
    throw InvalidData("transmission set CSV: missing '# mode=..' header");
  }
  std::istringstream meta(line.substr(2));
  std::string field;
  bool have_mode = false;
  while (std::getline(meta, field, ',')) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw InvalidData("transmission set CSV: bad header field " + field);
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (key == "mode") {
      auto m = parse_mode(value);
      if (!m) throw InvalidData("transmission set CSV: unknown mode " + value);
      ts.mode = *m;
      have_mode = true;
    } else if (key == "range") {
      ts.range = std::stod(value);
    } else if (key == "delta") {
      ts.delta = std::stod(value);
    }
  }
  if (!have_mode) throw InvalidData("transmission set CSV: header lacks mode");
  if (!std::getline(in, line) || line != "tx,rx") throw InvalidData("transmission set CSV: expected tx,rx");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidData("transmission set CSV: malformed row " + line);
    ts.links.push_back({static_cast<NodeId>(std::stoul(line.substr(0, comma))),
                        static_cast<NodeId>(std::stoul(line.substr(comma + 1)))});
  }
  return ts;
}

}  // namespace wlcap
