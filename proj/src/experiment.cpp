#include "wlcap/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wlcap/capacity_engine.hpp"
#include "wlcap/cell_scheduler.hpp"
#include "wlcap/errors.hpp"
#include "wlcap/multicast_trees.hpp"

namespace wlcap {

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Emst: return "emst";
    case ExperimentKind::Links: return "links";
    case ExperimentKind::Memtc: return "memtc";
    case ExperimentKind::Throughput: return "throughput";
    case ExperimentKind::Cut: return "cut";
    case ExperimentKind::PropertyP: return "property_p";
    case ExperimentKind::Gain: return "gain";
  }
  return "?";
}

std::optional<ExperimentKind> parse_kind(std::string_view text) {
  for (auto k : {ExperimentKind::Emst, ExperimentKind::Links, ExperimentKind::Memtc,
                 ExperimentKind::Throughput, ExperimentKind::Cut, ExperimentKind::PropertyP,
                 ExperimentKind::Gain}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !std::isfinite(v)) {
    throw InvalidConfig("config: '" + key + "' expects a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    if (!text.empty() && text[0] != '-') v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw InvalidConfig("config: '" + key + "' expects a nonnegative integer, got '" + text + "'");
  }
  return v;
}

std::vector<double> doubles(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& s : split_list(value)) out.push_back(to_double(key, s));
  if (out.empty()) throw InvalidConfig("config: '" + key + "' is empty");
  return out;
}

std::vector<std::size_t> sizes(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  for (const auto& s : split_list(value)) out.push_back(to_uint(key, s));
  if (out.empty()) throw InvalidConfig("config: '" + key + "' is empty");
  return out;
}

std::vector<double> geometric(const std::string& key, const std::string& value) {
  const auto v = doubles(key, value);
  if (v.size() != 3 || !(v[0] > 0.0) || !(v[1] >= v[0]) || v[2] < 1.0 || v[2] != std::floor(v[2])) {
    throw InvalidConfig("config: '" + key + "' expects lo, hi, count with 0 < lo <= hi");
  }
  const auto k = static_cast<std::size_t>(v[2]);
  std::vector<double> out;
  for (std::size_t i = 0; i < k; ++i) {
    const double f = k == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(k - 1);
    out.push_back(v[0] * std::pow(v[1] / v[0], f));
  }
  return out;
}

void set_key(ExperimentSpec& s, const std::string& key, const std::string& value) {
  if (key == "kind") {
    const auto k = parse_kind(value);
    if (!k) throw InvalidConfig("config: unknown kind '" + value + "'");
    s.kind = *k;
  } else if (key == "n") {
    s.n = sizes(key, value);
  } else if (key == "n_geom") {
    s.n.clear();
    for (double x : geometric(key, value)) s.n.push_back(static_cast<std::size_t>(std::llround(x)));
  } else if (key == "t") {
    s.t = doubles(key, value);
  } else if (key == "t_geom") {
    s.t = geometric(key, value);
  } else if (key == "m") {
    s.m = sizes(key, value);
  } else if (key == "delta") {
    s.delta = doubles(key, value);
  } else if (key == "mode" || key == "modes") {
    s.modes.clear();
    for (const auto& name : split_list(value)) {
      const auto mode = parse_mode(name);
      if (!mode) throw InvalidConfig("config: unknown mode '" + name + "'");
      s.modes.push_back(*mode);
    }
    if (s.modes.empty()) throw InvalidConfig("config: 'mode' is empty");
  } else if (key == "sweep") {
    if (value != "n" && value != "t" && value != "m") {
      throw InvalidConfig("config: sweep must be n, t or m");
    }
    s.sweep = value;
  } else if (key == "trials") {
    s.trials = to_uint(key, value);
  } else if (key == "seed") {
    s.seed = to_uint(key, value);
  } else if (key == "out") {
    s.out = value;
  } else if (key == "slots") {
    s.slots = to_uint(key, value);
  } else if (key == "warmup") {
    s.warmup = to_uint(key, value);
  } else if (key == "window") {
    s.window = to_uint(key, value);
  } else if (key == "cut_axis") {
    if (value == "vertical") {
      s.cut_axis = CutAxis::Vertical;
    } else if (value == "horizontal") {
      s.cut_axis = CutAxis::Horizontal;
    } else {
      throw InvalidConfig("config: cut_axis must be vertical or horizontal");
    }
  } else if (key == "cut_pos") {
    s.cut_pos = to_double(key, value);
  } else if (key == "sessions") {
    s.sessions = to_uint(key, value);
  } else if (key == "t_const") {
    s.t_const = to_double(key, value);
  } else if (key == "expect_slope") {
    s.expect_slope = doubles(key, value);
  } else if (key == "slope_tol") {
    s.slope_tol = to_double(key, value);
  } else {
    throw InvalidConfig("config: unknown key '" + key + "'");
  }
}

bool uses_modes(ExperimentKind k) {
  return k == ExperimentKind::Throughput || k == ExperimentKind::Cut;
}

void validate(const ExperimentSpec& s) {
  if (s.trials == 0) throw InvalidConfig("config: trials must be >= 1");
  if (s.n.empty() || s.t.empty() || s.m.empty() || s.delta.empty() || s.modes.empty()) {
    throw InvalidConfig("config: sweep lists must be nonempty");
  }
  if (s.kind == ExperimentKind::Emst && s.sweep != "m") {
    throw InvalidConfig("config: emst sweeps m");
  }
  if (s.kind == ExperimentKind::Gain && s.sweep != "n") {
    throw InvalidConfig("config: gain sweeps n");
  }
  if (!(s.cut_pos >= 0.25 && s.cut_pos <= 0.75)) {
    throw InvalidConfig("config: cut_pos must lie in [0.25, 0.75]");
  }
  if (!(s.slope_tol >= 0.0)) throw InvalidConfig("config: slope_tol must be >= 0");
  if (!(s.t_const > 0.0)) throw InvalidConfig("config: t_const must be positive");
  if (s.sessions == 0) throw InvalidConfig("config: sessions must be >= 1");
  const std::size_t curves_by_mode = uses_modes(s.kind) ? s.modes.size() : 1;
  if (s.expect_slope.size() > 1 && s.expect_slope.size() != curves_by_mode) {
    throw InvalidConfig("config: expect_slope needs one value or one per mode");
  }
}

const char* default_sweep(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Emst:
    case ExperimentKind::PropertyP: return "m";
    case ExperimentKind::Gain: return "n";
    default: return "t";
  }
}

}  // namespace

ConfigMap parse_config_text(std::istream& in) {
  ConfigMap out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const auto key = trim(std::string_view(line).substr(0, eq));
    const auto value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw InvalidConfig("config line " + std::to_string(lineno) + ": empty key");
    if (!out.emplace(key, value).second) {
      throw InvalidConfig("config line " + std::to_string(lineno) + ": repeated key '" + key + "'");
    }
  }
  return out;
}

ExperimentSpec spec_from_config(const ConfigMap& cfg) {
  ExperimentSpec s;
  // kind first: it decides the default sweep variable.
  if (auto it = cfg.find("kind"); it != cfg.end()) set_key(s, "kind", it->second);
  s.sweep = default_sweep(s.kind);
  for (const auto& [k, v] : cfg) {
    if (k != "kind") set_key(s, k, v);
  }
  validate(s);
  return s;
}

ExperimentSpec load_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("config: cannot open " + path.string());
  return spec_from_config(parse_config_text(in));
}

void apply_override(ExperimentSpec& spec, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw InvalidConfig("override '" + assignment + "': expected key=value");
  const auto key = trim(std::string_view(assignment).substr(0, eq));
  const auto value = trim(std::string_view(assignment).substr(eq + 1));
  const bool kind_changed = key == "kind";
  set_key(spec, key, value);
  if (kind_changed) spec.sweep = default_sweep(spec.kind);
  validate(spec);
}

bool ExperimentResult::within_tolerance() const {
  return std::all_of(curves.begin(), curves.end(), [](const CurveFit& c) { return c.within; });
}

namespace {

struct PointKey {
  Mode mode;
  std::size_t n;
  double t;
  std::size_t m;
  double delta;
};

std::string point_label(ExperimentKind kind, const PointKey& p) {
  std::ostringstream os;
  os.precision(6);
  os << to_string(kind);
  if (uses_modes(kind)) os << ' ' << to_string(p.mode);
  os << " n=" << p.n << " t=" << p.t << " m=" << p.m << " delta=" << p.delta;
  return os.str();
}

template <typename Fn>
auto with_context(const std::string& where, Fn&& fn) {
  try {
    return fn();
  } catch (const RoutingFailure& e) {
    throw RoutingFailure(where + ": " + e.what(), e.session());
  } catch (const InvalidParameter& e) {
    throw InvalidParameter(where + ": " + e.what());
  } catch (const InvalidData& e) {
    throw InvalidData(where + ": " + e.what());
  } catch (const SizeLimit& e) {
    throw SizeLimit(where + ": " + e.what());
  }
}

// Values of one curve, keyed by x and kept in sweep order.
struct Curve {
  std::string label;
  Mode mode = Mode::PTP;
  std::vector<double> xs;
  std::vector<std::vector<double>> values;

  void add(double x, double v) {
    auto it = std::find(xs.begin(), xs.end(), x);
    if (it == xs.end()) {
      xs.push_back(x);
      values.emplace_back();
      it = xs.end() - 1;
    }
    values[static_cast<std::size_t>(it - xs.begin())].push_back(v);
  }
};

class Collector {
 public:
  Curve& curve(const std::string& label, Mode mode) {
    for (auto& c : curves_) {
      if (c.label == label) return c;
    }
    curves_.push_back({label, mode, {}, {}});
    return curves_.back();
  }
  std::vector<Curve>& curves() { return curves_; }

 private:
  std::vector<Curve> curves_;
};

std::string curve_label(const ExperimentSpec& s, const PointKey& p) {
  std::ostringstream os;
  os.precision(6);
  if (uses_modes(s.kind)) os << to_string(p.mode) << ' ';
  bool first = true;
  auto field = [&](const char* name, auto v) {
    if (s.sweep == name) return;
    os << (first ? "" : " ") << name << '=' << v;
    first = false;
  };
  switch (s.kind) {
    case ExperimentKind::Emst: os << "emst"; break;
    case ExperimentKind::Links: field("n", p.n); field("t", p.t); os << " delta=" << p.delta; break;
    case ExperimentKind::Memtc: field("n", p.n); field("t", p.t); field("m", p.m); break;
    case ExperimentKind::Throughput:
      field("n", p.n); field("t", p.t); field("m", p.m); os << " delta=" << p.delta;
      break;
    case ExperimentKind::Cut: field("n", p.n); field("t", p.t); os << " delta=" << p.delta; break;
    case ExperimentKind::PropertyP: field("n", p.n); field("m", p.m); break;
    case ExperimentKind::Gain: field("m", p.m); os << " delta=" << p.delta; break;
  }
  return os.str();
}

double sweep_x(const ExperimentSpec& s, const PointKey& p) {
  if (s.kind == ExperimentKind::Gain) {
    const double ln = std::log(static_cast<double>(p.n));
    return ln * ln;
  }
  if (s.sweep == "n") return static_cast<double>(p.n);
  if (s.sweep == "m") return static_cast<double>(p.m);
  return p.t;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.precision(12);
  return out;
}

SimConfig sim_config(const ExperimentSpec& s, const PointKey& p, std::uint64_t seed) {
  SimConfig c;
  c.n = p.n;
  c.t = p.t;
  c.m = p.m;
  c.delta = p.delta;
  c.seed = seed;
  c.slots = s.slots;
  c.warmup = s.warmup;
  c.window = s.window;
  return c;
}

}  // namespace

ExperimentResult run(const ExperimentSpec& spec) {
  validate(spec);
  namespace fs = std::filesystem;
  const fs::path dir(spec.out);
  fs::create_directories(dir);
  ExperimentResult result;
  Collector col;
  const std::string kind = to_string(spec.kind);

  const bool by_mode = uses_modes(spec.kind);
  const std::vector<Mode> modes = by_mode ? spec.modes : std::vector<Mode>{spec.modes.front()};
  const bool need_t = spec.kind != ExperimentKind::Emst && spec.kind != ExperimentKind::PropertyP &&
                      spec.kind != ExperimentKind::Gain;
  const bool need_n = spec.kind != ExperimentKind::Emst;
  const bool need_m = spec.kind == ExperimentKind::Emst || spec.kind == ExperimentKind::Memtc ||
                      spec.kind == ExperimentKind::Throughput ||
                      spec.kind == ExperimentKind::PropertyP || spec.kind == ExperimentKind::Gain;
  const bool need_delta = spec.kind == ExperimentKind::Links || spec.kind == ExperimentKind::Throughput ||
                          spec.kind == ExperimentKind::Cut || spec.kind == ExperimentKind::Gain;
  const std::vector<std::size_t> ns = need_n ? spec.n : std::vector<std::size_t>{0};
  const std::vector<double> ts = need_t ? spec.t : std::vector<double>{0.0};
  const std::vector<std::size_t> ms = need_m ? spec.m : std::vector<std::size_t>{0};
  const std::vector<double> deltas = need_delta ? spec.delta : std::vector<double>{0.0};

  const fs::path main_csv = dir / (kind + ".csv");
  auto out = open_csv(main_csv);
  result.files.push_back(main_csv);
  std::ofstream rates;
  switch (spec.kind) {
    case ExperimentKind::Emst: out << "m,trial,length\n"; break;
    case ExperimentKind::Links:
      out << "n,t,delta,seed,links,mean_per_disk,mean_per_interior_disk\n";
      break;
    case ExperimentKind::Memtc: out << "n,t,m,seed,memtc\n"; break;
    case ExperimentKind::Throughput:
      out << "mode,n,t,m,mean_rate,stderr\n";
      rates = open_csv(dir / "throughput_rates.csv");
      result.files.push_back(dir / "throughput_rates.csv");
      break;
    case ExperimentKind::Cut: write_cut_csv_header(out); break;
    case ExperimentKind::PropertyP: write_property_p_csv_header(out); break;
    case ExperimentKind::Gain: out << "n,t,m,seed,mpt_mpr_rate,ptp_rate,ratio,predicted\n"; break;
  }
  bool rates_header = true;

  for (Mode mode : modes) {
    for (std::size_t n : ns) {
      for (std::size_t m : ms) {
        for (double delta : deltas) {
          for (double t0 : ts) {
            PointKey p{mode, n, t0, m, delta};
            if (spec.kind == ExperimentKind::Gain) p.t = spec.t_const * connectivity_range(n);
            const std::string where = point_label(spec.kind, p);
            Curve& curve = col.curve(curve_label(spec, p), mode);
            const double x = sweep_x(spec, p);
            std::vector<double> trial_values;

            if (spec.kind == ExperimentKind::Emst) {
              with_context(where, [&] {
                if (m < 2) throw InvalidParameter("emst: m must be >= 2");
                // Same stream layout as emst_scaling_study.
                Rng rng = make_rng(spec.seed, 1000 + m);
                std::vector<Point> pts(m);
                for (std::size_t k = 0; k < spec.trials; ++k) {
                  for (auto& q : pts) q = {uniform01(rng), uniform01(rng)};
                  const double len = emst(pts).total_length;
                  out << m << ',' << k << ',' << len << '\n';
                  trial_values.push_back(len);
                }
                return 0;
              });
            }

            for (std::size_t k = 0; spec.kind != ExperimentKind::Emst && k < spec.trials; ++k) {
              const std::uint64_t seed = spec.seed + k;
              with_context(where + " seed=" + std::to_string(seed), [&] {
                switch (spec.kind) {
                  case ExperimentKind::Links: {
                    const auto r = count_simultaneous_links(generate_network(n, seed), p.t, delta);
                    out << n << ',' << p.t << ',' << delta << ',' << seed << ',' << r.links << ','
                        << r.mean_per_disk << ',' << r.mean_per_interior_disk << '\n';
                    trial_values.push_back(static_cast<double>(r.links));
                    break;
                  }
                  case ExperimentKind::Memtc: {
                    const auto net = generate_network(n, seed);
                    const auto grid = build_grid(p.t);
                    const auto cells = build_cell_graph(net, grid, p.t);
                    const auto sessions = make_sessions(net, m, seed);
                    const std::size_t count = std::min(spec.sessions, sessions.size());
                    double sum = 0.0;
                    for (std::size_t i = 0; i < count; ++i) {
                      sum += static_cast<double>(memtc_count(
                          route_session(sessions[i], net, grid, cells, static_cast<long>(i))));
                    }
                    const double mean = sum / static_cast<double>(count);
                    out << n << ',' << p.t << ',' << m << ',' << seed << ',' << mean << '\n';
                    trial_values.push_back(mean);
                    break;
                  }
                  case ExperimentKind::Throughput: {
                    const auto r = simulate(sim_config(spec, p, seed), mode);
                    write_report_csv(rates, r, rates_header);
                    rates_header = false;
                    trial_values.push_back(r.mean);
                    break;
                  }
                  case ExperimentKind::Cut: {
                    const Cut cut(spec.cut_axis, spec.cut_pos);
                    const auto links = cut_capacity(generate_network(n, seed), cut, mode, p.t, delta);
                    write_cut_csv_row(out, mode, n, p.t, cut, links);
                    trial_values.push_back(static_cast<double>(links));
                    break;
                  }
                  case ExperimentKind::PropertyP: {
                    const auto net = generate_network(n, seed);
                    const double f =
                        static_cast<double>(count_property_p(net, make_sessions(net, m, seed), Cut())) /
                        static_cast<double>(n);
                    write_property_p_csv_row(out, n, m, seed, f);
                    trial_values.push_back(f);
                    break;
                  }
                  case ExperimentKind::Gain: {
                    const auto c = sim_config(spec, p, seed);
                    const double hi = simulate(c, Mode::MPT_MPR).mean;
                    const double lo = simulate(c, Mode::PTP).mean;
                    const double ratio = lo > 0.0 ? hi / lo : 0.0;
                    out << n << ',' << p.t << ',' << m << ',' << seed << ',' << hi << ',' << lo << ','
                        << ratio << ',' << gain_vs_ptp(n, p.t, m) << '\n';
                    trial_values.push_back(ratio);
                    break;
                  }
                  case ExperimentKind::Emst: break;
                }
                return 0;
              });
            }

            for (double v : trial_values) curve.add(x, v);
            if (spec.kind == ExperimentKind::Throughput) {
              const auto pt = summarize(x, trial_values);
              out << to_string(mode) << ',' << n << ',' << p.t << ',' << m << ',' << pt.mean << ','
                  << pt.stderr_ << '\n';
            }
          }
        }
      }
    }
  }

  const fs::path fit_csv = dir / (kind + "_fit.csv");
  auto fits = open_csv(fit_csv);
  result.files.push_back(fit_csv);
  fits << "curve,x,mean,stderr,samples\n";
  std::ofstream slopes_out;
  for (std::size_t ci = 0; ci < col.curves().size(); ++ci) {
    const auto& c = col.curves()[ci];
    std::vector<ScalingPoint> points;
    for (std::size_t i = 0; i < c.xs.size(); ++i) points.push_back(summarize(c.xs[i], c.values[i]));
    for (const auto& pt : points) {
      fits << c.label << ',' << pt.x << ',' << pt.mean << ',' << pt.stderr_ << ',' << pt.samples << '\n';
    }
    if (points.size() < 3) continue;
    CurveFit cf;
    cf.label = c.label;
    cf.fit = with_context(c.label, [&] { return fit_points(points); });
    if (!spec.expect_slope.empty()) {
      std::size_t idx = 0;
      if (spec.expect_slope.size() > 1) {
        idx = static_cast<std::size_t>(
            std::find(spec.modes.begin(), spec.modes.end(), c.mode) - spec.modes.begin());
      }
      cf.expected = spec.expect_slope[idx];
      cf.within = std::abs(cf.fit.slope - *cf.expected) <= spec.slope_tol;
    }
    result.curves.push_back(std::move(cf));
  }

  const fs::path slope_csv = dir / (kind + "_slopes.csv");
  auto slopes = open_csv(slope_csv);
  result.files.push_back(slope_csv);
  slopes << "curve,slope,intercept,r2,expected,tolerance,within\n";
  for (const auto& c : result.curves) {
    slopes << c.label << ',' << c.fit.slope << ',' << c.fit.intercept << ',' << c.fit.r2 << ',';
    if (c.expected) slopes << *c.expected;
    slopes << ',' << spec.slope_tol << ',' << (c.within ? 1 : 0) << '\n';
  }
  return result;
}

}  // namespace wlcap
