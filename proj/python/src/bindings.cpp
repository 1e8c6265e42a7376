#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "wlcap/capacity_engine.hpp"
#include "wlcap/cell_scheduler.hpp"
#include "wlcap/cut_analysis.hpp"
#include "wlcap/experiment.hpp"
#include "wlcap/multicast_trees.hpp"
#include "wlcap/scaling.hpp"

namespace py = pybind11;
using namespace wlcap;

namespace {

NetworkInstance to_net(const std::vector<std::pair<double, double>>& pts) {
  std::vector<Point> out;
  out.reserve(pts.size());
  for (const auto& [x, y] : pts) out.push_back({x, y});
  return NetworkInstance(std::move(out));
}

py::dict report_dict(const ThroughputReport& r) {
  py::dict d;
  d["mode"] = std::string(to_string(r.mode));
  d["rates"] = r.rates;
  d["mean"] = r.mean;
  d["L"] = r.L;
  d["slots"] = r.config.slots;
  d["warmup"] = r.config.warmup;
  d["window"] = r.config.window;
  d["measured_slots"] = r.measured_slots;
  d["injected"] = r.injected;
  d["delivered"] = r.delivered;
  d["transmissions"] = r.transmissions;
  d["max_links_in_slot"] = r.max_links_in_slot;
  d["tree_depth"] = r.tree_depth;
  d["all_slots_feasible"] = r.all_slots_feasible;
  return d;
}

py::dict fit_dict(const ScalingResult& r) {
  py::dict d;
  py::list pts;
  for (const auto& p : r.points) pts.append(py::make_tuple(p.x, p.mean, p.stderr_, p.samples));
  d["points"] = pts;
  d["slope"] = r.slope;
  d["intercept"] = r.intercept;
  d["r2"] = r.r2;
  return d;
}

}  // namespace

PYBIND11_MODULE(_wlcap, m) {
  m.doc() = "Wireless multicast capacity scaling experiments";

  py::register_exception<InvalidParameter>(m, "InvalidParameter", PyExc_ValueError);
  py::register_exception<InvalidData>(m, "InvalidData", PyExc_ValueError);
  py::register_exception<InvalidConfig>(m, "InvalidConfig", PyExc_ValueError);
  py::register_exception<SizeLimit>(m, "SizeLimit", PyExc_ValueError);
  py::register_exception<RoutingFailure>(m, "RoutingFailure", PyExc_RuntimeError);

  py::enum_<Mode>(m, "Mode")
      .value("PTP", Mode::PTP)
      .value("MPT", Mode::MPT)
      .value("MPR", Mode::MPR)
      .value("MPT_MPR", Mode::MPT_MPR);

  m.def("generate_network",
        [](std::size_t n, std::uint64_t seed) {
          const auto net = generate_network(n, seed);
          std::vector<std::pair<double, double>> out;
          for (const auto& p : net.points()) out.emplace_back(p.x, p.y);
          return out;
        },
        py::arg("n"), py::arg("seed"), "n uniform points in the unit square as (x, y) tuples");
  m.def("connectivity_range", &connectivity_range, py::arg("n"), py::arg("c") = 1.0);
  m.def("nodes_in_disk",
        [](const std::vector<std::pair<double, double>>& pts, std::pair<double, double> c, double r) {
          return nodes_in_disk(to_net(pts), {c.first, c.second}, r);
        },
        py::arg("points"), py::arg("center"), py::arg("radius"));
  m.def("union_of_disks_area",
        [](const std::vector<std::pair<double, double>>& centers, double r, int resolution) {
          std::vector<Point> c;
          for (const auto& [x, y] : centers) c.push_back({x, y});
          return union_of_disks_area(c, r, resolution);
        },
        py::arg("centers"), py::arg("radius"), py::arg("resolution") = 1000);

  m.def("is_feasible",
        [](const std::vector<std::pair<double, double>>& pts,
           const std::vector<std::pair<NodeId, NodeId>>& links, Mode mode, double range,
           double delta) {
          TransmissionSet ts{{}, mode, range, delta};
          for (const auto& [a, b] : links) ts.links.push_back({a, b});
          return is_feasible(ts, to_net(pts));
        },
        py::arg("points"), py::arg("links"), py::arg("mode"), py::arg("range"), py::arg("delta") = 0.0);

  m.def("compute_L", &compute_L, py::arg("delta"));
  m.def("simultaneous_links",
        [](std::size_t n, std::uint64_t seed, double t, double delta) {
          const auto r = count_simultaneous_links(generate_network(n, seed), t, delta);
          py::dict d;
          d["links"] = r.links;
          d["best_slot"] = r.best_slot;
          d["per_slot"] = r.per_slot;
          d["mean_per_disk"] = r.mean_per_disk;
          d["mean_per_interior_disk"] = r.mean_per_interior_disk;
          return d;
        },
        py::arg("n"), py::arg("seed"), py::arg("t"), py::arg("delta") = 0.0);

  m.def("emst_length",
        [](const std::vector<std::pair<double, double>>& pts) {
          std::vector<Point> p;
          for (const auto& [x, y] : pts) p.push_back({x, y});
          return emst(p).total_length;
        },
        py::arg("points"));
  m.def("emst_scaling_study",
        [](const std::vector<std::size_t>& ms, std::size_t trials, std::uint64_t seed) {
          return fit_dict(emst_scaling_study(ms, trials, seed));
        },
        py::arg("ms"), py::arg("trials"), py::arg("seed") = 1);
  m.def("fit_loglog",
        [](const std::vector<std::pair<double, double>>& xy) { return fit_dict(fit_loglog(xy)); },
        py::arg("xy"));

  m.def("theoretical_capacity", &theoretical_capacity, py::arg("mode"), py::arg("nc"), py::arg("n"),
        py::arg("t"), py::arg("m"));
  m.def("gain_vs_ptp", &gain_vs_ptp, py::arg("n"), py::arg("t"), py::arg("m"));
  m.def("simulate",
        [](Mode mode, std::size_t n, double t, std::size_t m_, double delta, std::uint64_t seed,
           std::size_t slots, std::size_t warmup, std::size_t window, bool audit) {
          SimConfig c;
          c.n = n;
          c.t = t;
          c.m = m_;
          c.delta = delta;
          c.seed = seed;
          c.slots = slots;
          c.warmup = warmup;
          c.window = window;
          SimOptions o;
          o.audit = audit;
          ThroughputReport r;
          {
            py::gil_scoped_release release;
            r = simulate(c, mode, o);
          }
          return report_dict(r);
        },
        py::arg("mode"), py::arg("n"), py::arg("t"), py::arg("m") = 3, py::arg("delta") = 0.0,
        py::arg("seed") = 1, py::arg("slots") = 0, py::arg("warmup") = 0, py::arg("window") = 0,
        py::arg("audit") = false);

  m.def("cut_capacity",
        [](std::size_t n, std::uint64_t seed, Mode mode, double t, double delta, bool horizontal,
           double position) {
          return cut_capacity(generate_network(n, seed),
                              Cut(horizontal ? CutAxis::Horizontal : CutAxis::Vertical, position), mode,
                              t, delta);
        },
        py::arg("n"), py::arg("seed"), py::arg("mode"), py::arg("t"), py::arg("delta") = 0.0,
        py::arg("horizontal") = false, py::arg("position") = 0.5);
  m.def("property_p_fraction",
        [](std::size_t n, std::size_t m_, std::uint64_t seed) {
          const auto net = generate_network(n, seed);
          return static_cast<double>(count_property_p(net, make_sessions(net, m_, seed), Cut())) /
                 static_cast<double>(n);
        },
        py::arg("n"), py::arg("m"), py::arg("seed") = 1);
  m.def("nc_upper_bound_rate", &nc_upper_bound_rate, py::arg("mode"), py::arg("n"), py::arg("t"));

  m.def("run_experiment",
        [](const std::string& config_text, const std::string& out) {
          std::istringstream in(config_text);
          auto spec = spec_from_config(parse_config_text(in));
          spec.out = out;
          const auto r = run(spec);
          py::list curves;
          for (const auto& c : r.curves) {
            py::dict d = fit_dict(c.fit);
            d["label"] = c.label;
            d["expected"] = c.expected ? py::cast(*c.expected) : py::none();
            d["within"] = c.within;
            curves.append(d);
          }
          py::list files;
          for (const auto& f : r.files) files.append(f.string());
          py::dict d;
          d["curves"] = curves;
          d["files"] = files;
          return d;
        },
        py::arg("config_text"), py::arg("out"),
        "Runs a `key = value` experiment recipe, writing CSVs under `out`.");
}
