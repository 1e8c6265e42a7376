#include "wlcap/capacity_engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "wlcap/cell_scheduler.hpp"
#include "wlcap/multicast_trees.hpp"

namespace wlcap {

double theoretical_capacity(Mode mode, bool nc, std::size_t n, double t, std::size_t m) {
  if (m < 1) throw InvalidParameter("theoretical_capacity: m must be >= 1");
  const double nn = static_cast<double>(n);
  const double sm = std::sqrt(static_cast<double>(m));
  switch (mode) {
    case Mode::PTP: return nc ? 1.0 / (nn * t) : 1.0 / (sm * nn * t);
    case Mode::MPT:
    case Mode::MPR: return t;
    case Mode::MPT_MPR: return nn * t * t * t / sm;
  }
  return 0.0;
}

double gain_vs_ptp(std::size_t n, double t, std::size_t m) {
  if (n < 2 || t < connectivity_range(n) * (1.0 - 1e-12)) {
    throw InvalidParameter("gain_vs_ptp: t below the connectivity range");
  }
  return theoretical_capacity(Mode::MPT_MPR, false, n, t, m) /
         theoretical_capacity(Mode::PTP, false, n, t, m);
}

std::size_t default_window(Mode mode, std::size_t n, double t) {
  // Enough packets in flight that the schedule, not the pipeline latency, is
  // the bottleneck; more only lengthens the warm-up.
  if (mode != Mode::MPT_MPR) return 1;
  const double per_cell = static_cast<double>(n) * t * t;
  return std::max<std::size_t>(16, static_cast<std::size_t>(std::ceil(per_cell)));
}

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a * 0x9E3779B97F4A7C15ULL + b + 0x632BE59BD9B4E019ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// All sessions' trees flattened into one vertex array; vertex v's upstream edge
// is parent[v] -> v.
struct Forest {
  std::vector<NodeId> node;
  std::vector<std::int64_t> parent;
  std::vector<std::uint32_t> session;
  std::vector<std::size_t> cell;
  std::vector<std::int64_t> ring;  // offset into the holder ring, -1 unless a relay
  std::vector<std::size_t> root;   // per session
  std::vector<std::size_t> dest_begin, dest_end;
  std::vector<std::size_t> dests;  // destination vertices, grouped by session
  std::vector<std::size_t> viable_begin;
  std::vector<NodeId> viable;
  std::size_t max_depth = 0;
};

// Nodes of `cell` other than a and b within t of `b`.
std::vector<NodeId> stage_nodes(const NetworkInstance& net, const CellOccupancy& occ,
                                std::size_t cell, NodeId a, NodeId b, double t2) {
  std::vector<NodeId> out;
  for (NodeId x : occ.members[cell]) {
    if (x != a && x != b && distance_sq(net[x], net[b]) <= t2) out.push_back(x);
  }
  return out;
}

Forest build_forest(const NetworkInstance& net, const std::vector<RoutingTree>& trees,
                    const CellOccupancy& occ, double t, std::size_t window, bool relay_stages) {
  Forest f;
  const double t2 = t * t;
  std::size_t relays = 0;
  std::vector<std::vector<NodeId>> preset;  // candidate holders fixed up front, by vertex
  auto add_vertex = [&](NodeId node, VertexKind kind, std::int64_t parent, std::uint32_t s,
                        std::size_t cell) {
    f.node.push_back(node);
    f.parent.push_back(parent);
    f.session.push_back(s);
    f.cell.push_back(cell);
    if (kind == VertexKind::Relay) {
      f.ring.push_back(static_cast<std::int64_t>(relays * window));
      ++relays;
    } else {
      f.ring.push_back(-1);
    }
    if (kind == VertexKind::Destination) f.dests.push_back(f.node.size() - 1);
    preset.emplace_back();
    return f.node.size() - 1;
  };
  std::vector<std::size_t> depth;
  for (std::uint32_t s = 0; s < trees.size(); ++s) {
    const auto& tree = trees[s];
    f.root.push_back(f.node.size());
    f.dest_begin.push_back(f.dests.size());
    std::vector<std::size_t> index(tree.vertices.size(), 0);
    for (std::size_t v = 0; v < tree.vertices.size(); ++v) {
      const auto& tv = tree.vertices[v];
      std::int64_t parent = -1;
      if (tv.parent >= 0) {
        const auto& pv = tree.vertices[static_cast<std::size_t>(tv.parent)];
        parent = static_cast<std::int64_t>(index[static_cast<std::size_t>(tv.parent)]);
        // One node pair carries one packet per slot. Between two fixed nodes, a
        // stage of relays lets several packets cross at once.
        if (relay_stages && pv.kind != VertexKind::Relay && tv.kind != VertexKind::Relay) {
          auto stage = stage_nodes(net, occ, pv.cell, pv.node, tv.node, t2);
          std::size_t cell = pv.cell;
          if (stage.empty()) {
            stage = stage_nodes(net, occ, tv.cell, tv.node, pv.node, t2);
            cell = tv.cell;
          }
          if (!stage.empty()) {
            const auto r = add_vertex(stage.front(), VertexKind::Relay, parent, s, cell);
            preset[r] = std::move(stage);
            parent = static_cast<std::int64_t>(r);
          }
        }
      }
      index[v] = add_vertex(tv.node, tv.kind, parent, s, tv.cell);
    }
    f.dest_end.push_back(f.dests.size());
  }
  const std::size_t V = f.node.size();
  depth.assign(V, 0);
  for (std::size_t v = 0; v < V; ++v) {
    if (f.parent[v] >= 0) depth[v] = depth[static_cast<std::size_t>(f.parent[v])] + 1;
    f.max_depth = std::max(f.max_depth, depth[v]);
  }

  // Viable holders, bottom-up: a relay's cell nodes that reach a viable holder
  // of every child.
  std::vector<std::vector<NodeId>> viable(V);
  std::vector<std::vector<std::size_t>> kids(V);
  for (std::size_t v = 0; v < V; ++v) {
    if (f.parent[v] >= 0) kids[static_cast<std::size_t>(f.parent[v])].push_back(v);
  }
  for (std::size_t v = V; v-- > 0;) {
    if (f.ring[v] < 0) {
      viable[v] = {f.node[v]};
      continue;
    }
    if (!preset[v].empty()) {
      viable[v] = std::move(preset[v]);
      continue;
    }
    for (NodeId x : occ.members[f.cell[v]]) {
      bool ok = true;
      for (std::size_t c : kids[v]) {
        const bool reach = std::any_of(viable[c].begin(), viable[c].end(), [&](NodeId y) {
          return y != x && distance_sq(net[x], net[y]) <= t2;
        });
        if (!reach) {
          ok = false;
          break;
        }
      }
      if (ok) viable[v].push_back(x);
    }
    if (viable[v].empty()) viable[v] = {f.node[v]};  // the routed relay always qualifies
  }
  f.viable_begin.reserve(V + 1);
  for (std::size_t v = 0; v < V; ++v) {
    f.viable_begin.push_back(f.viable.size());
    f.viable.insert(f.viable.end(), viable[v].begin(), viable[v].end());
  }
  f.viable_begin.push_back(f.viable.size());
  return f;
}

}  // namespace

ThroughputReport simulate(const SimConfig& config, Mode mode, const SimOptions& options) {
  if (config.m < 1) throw InvalidParameter("simulate: m must be >= 1");
  if (config.n < config.m + 1) throw InvalidParameter("simulate: n must exceed m");
  if (!(config.t > 0.0 && config.t <= std::sqrt(2.0))) {
    throw InvalidParameter("simulate: t must lie in (0, sqrt(2)]");
  }
  if (!config.every_node_a_source) {
    throw InvalidParameter("simulate: only the every-node-a-source traffic model is supported");
  }
  const NetworkInstance net = generate_network(config.n, config.seed);
  const CellGrid grid = build_grid(config.t);
  const TdmaSchedule schedule = build_schedule(grid, config.delta);
  const CellGraph cells = build_cell_graph(net, grid, config.t);
  const auto sessions = make_sessions(net, config.m, config.seed);

  std::vector<RoutingTree> trees;
  trees.reserve(sessions.size());
  for (std::size_t s = 0; s < sessions.size(); ++s) {
    trees.push_back(route_session(sessions[s], net, grid, cells, static_cast<long>(s)));
  }

  ThroughputReport report;
  report.mode = mode;
  report.config = config;
  report.L = schedule.L();
  auto& cfg = report.config;
  const auto L2 = static_cast<std::size_t>(schedule.num_slots());
  if (cfg.window == 0) cfg.window = default_window(mode, cfg.n, cfg.t);
  const std::size_t W = cfg.window;
  const Forest f = build_forest(net, trees, cells.occupancy, cfg.t, W, allows_multi_rx(mode));
  report.tree_depth = f.max_depth;
  // A packet needs up to one schedule cycle per hop; a few tree depths of
  // cycles fill every pipeline.
  if (cfg.warmup == 0) cfg.warmup = 5 * L2 + 4 * f.max_depth * L2;
  if (cfg.slots == 0) cfg.slots = cfg.warmup + std::max(cfg.warmup, 40 * L2);
  if (cfg.slots < L2) throw InvalidParameter("simulate: slots must be >= L^2");
  if (cfg.warmup >= cfg.slots) throw InvalidParameter("simulate: warmup must be < slots");

  const std::size_t V = f.node.size();
  const std::size_t S = sessions.size();
  std::vector<std::uint32_t> have(V, 0), ready(V, 0);
  std::vector<NodeId> holders(static_cast<std::size_t>(
      std::count_if(f.ring.begin(), f.ring.end(), [](std::int64_t r) { return r >= 0; })) * W);
  std::vector<std::uint64_t> delivered(S, 0), delivered_at_warmup(S, 0);
  for (std::size_t s = 0; s < S; ++s) {
    have[f.root[s]] = ready[f.root[s]] = static_cast<std::uint32_t>(W);
  }
  report.injected = static_cast<std::uint64_t>(S) * W;

  // Edges (by child vertex) grouped by the upstream vertex's cell, in vertex
  // order; hops that leave the cell first, then hops that stay inside it.
  std::vector<std::vector<std::uint32_t>> leaving(grid.cell_count()), staying(grid.cell_count());
  for (std::size_t v = 0; v < V; ++v) {
    if (f.parent[v] < 0) continue;
    const auto pc = f.cell[static_cast<std::size_t>(f.parent[v])];
    (pc == f.cell[v] ? staying : leaving)[pc].push_back(static_cast<std::uint32_t>(v));
  }

  FeasibilityTracker tracker(net, mode, cfg.t, cfg.delta);
  const double t2 = cfg.t * cfg.t;
  std::vector<std::uint32_t> pending, next, touched;
  std::vector<std::uint32_t> touched_sessions;
  std::vector<char> session_mark(S, 0);

  auto holder = [&](std::size_t v, std::uint32_t seq) -> NodeId {
    return f.ring[v] < 0 ? f.node[v] : holders[static_cast<std::size_t>(f.ring[v]) + seq % W];
  };
  auto push = [&](std::size_t c, std::uint32_t seq, NodeId h) {
    const std::size_t b = f.viable_begin[c];
    const std::size_t k = f.viable_begin[c + 1] - b;
    const std::size_t off = static_cast<std::size_t>(mix(f.session[c], seq) % k);
    std::size_t tries = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const NodeId rx = f.viable[b + (off + i) % k];
      if (rx == h || distance_sq(net[h], net[rx]) > t2) continue;
      if (++tries > cfg.rx_attempts) break;
      if (tracker.try_add({h, rx})) {
        if (f.ring[c] >= 0) holders[static_cast<std::size_t>(f.ring[c]) + seq % W] = rx;
        return true;
      }
    }
    return false;
  };

  for (std::size_t slot = 0; slot < cfg.slots; ++slot) {
    if (slot == cfg.warmup) delivered_at_warmup = delivered;
    tracker.reset();
    // Receivers inside the active cell can no longer send this slot, so those
    // hops are admitted only after every hop leaving the cell.
    for (const auto* group : {&leaving, &staying}) {
      pending.clear();
      for (const auto& cidx : schedule.cells_in_slot(static_cast<int>(slot % L2))) {
        for (std::uint32_t c : (*group)[grid.flat(cidx)]) {
          if (ready[static_cast<std::size_t>(f.parent[c])] > have[c]) pending.push_back(c);
        }
      }
      while (!pending.empty()) {
        next.clear();
        for (std::uint32_t c : pending) {
          const auto p = static_cast<std::size_t>(f.parent[c]);
          const std::uint32_t seq = have[c];
          if (seq >= ready[p]) continue;
          if (!push(c, seq, holder(p, seq))) continue;
          if (have[c] == ready[c]) touched.push_back(c);
          ++have[c];
          next.push_back(c);
        }
        pending.swap(next);
      }
    }
    report.transmissions += tracker.size();
    report.max_links_in_slot = std::max(report.max_links_in_slot, tracker.size());
    if (options.audit && !is_feasible(tracker.snapshot(), net)) report.all_slots_feasible = false;

    for (std::uint32_t c : touched) {
      ready[c] = have[c];
      const auto s = f.session[c];
      if (!session_mark[s]) {
        session_mark[s] = 1;
        touched_sessions.push_back(s);
      }
    }
    touched.clear();
    for (std::uint32_t s : touched_sessions) {
      session_mark[s] = 0;
      std::uint64_t low = ~std::uint64_t{0};
      for (std::size_t i = f.dest_begin[s]; i < f.dest_end[s]; ++i) {
        low = std::min<std::uint64_t>(low, have[f.dests[i]]);
      }
      if (low > delivered[s]) {
        report.delivered += low - delivered[s];
        delivered[s] = low;
        const auto r = f.root[s];
        const auto target = static_cast<std::uint32_t>(low + W);
        report.injected += target - have[r];
        have[r] = ready[r] = target;
      }
    }
    touched_sessions.clear();
  }

  report.measured_slots = cfg.slots - cfg.warmup;
  report.rates.resize(S);
  double sum = 0.0;
  for (std::size_t s = 0; s < S; ++s) {
    report.rates[s] = static_cast<double>(delivered[s] - delivered_at_warmup[s]) /
                      static_cast<double>(report.measured_slots);
    sum += report.rates[s];
  }
  report.mean = S > 0 ? sum / static_cast<double>(S) : 0.0;
  return report;
}

void write_report_csv(std::ostream& out, const ThroughputReport& report, bool header) {
  const auto old_precision = out.precision(12);
  if (header) out << "mode,nc,n,t,delta,m,seed,session_id,rate\n";
  const auto& c = report.config;
  for (std::size_t s = 0; s < report.rates.size(); ++s) {
    out << to_string(report.mode) << ",0," << c.n << ',' << c.t << ',' << c.delta << ',' << c.m << ','
        << c.seed << ',' << s << ',' << report.rates[s] << '\n';
  }
  out.precision(old_precision);
}

}  // namespace wlcap
