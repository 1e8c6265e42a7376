// Command-line front end: one subcommand per experiment family.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "wlcap/cell_scheduler.hpp"
#include "wlcap/errors.hpp"
#include "wlcap/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCheck = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> sets;
  bool check = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "key = value file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "base seed (overrides the config)");
  cmd->add_option("--out", c.out, "output directory (overrides the config)");
  cmd->add_option("--set", c.sets, "extra key=value overrides, applied last");
  cmd->add_flag("--check", c.check, "exit 3 when a fitted slope misses expect_slope +- slope_tol");
}

wlcap::ExperimentSpec load(const Common& c, std::optional<wlcap::ExperimentKind> force) {
  wlcap::ExperimentSpec spec;
  if (!c.config.empty()) {
    spec = wlcap::load_spec(c.config);
  }
  const bool keep = force == wlcap::ExperimentKind::Cut && spec.kind == wlcap::ExperimentKind::PropertyP;
  if (force && spec.kind != *force && !keep) {
    wlcap::apply_override(spec, std::string("kind=") + wlcap::to_string(*force));
  }
  if (c.seed) spec.seed = *c.seed;
  if (!c.out.empty()) spec.out = c.out;
  for (const auto& s : c.sets) wlcap::apply_override(spec, s);
  return spec;
}

int report(const wlcap::ExperimentResult& r, bool check) {
  for (const auto& f : r.files) std::cout << "wrote " << f.string() << '\n';
  for (const auto& c : r.curves) {
    std::printf("%-40s slope %+.4f  r2 %.4f", c.label.c_str(), c.fit.slope, c.fit.r2);
    if (c.expected) std::printf("  expected %+.2f %s", *c.expected, c.within ? "ok" : "MISS");
    std::printf("\n");
  }
  return check && !r.within_tolerance() ? kExitCheck : kExitOk;
}

int cmd_generate(const Common& c) {
  const auto spec = load(c, std::nullopt);
  std::filesystem::create_directories(spec.out);
  for (std::size_t n : spec.n) {
    for (std::size_t k = 0; k < spec.trials; ++k) {
      const auto seed = spec.seed + k;
      const auto path = std::filesystem::path(spec.out) /
                        ("network_n" + std::to_string(n) + "_seed" + std::to_string(seed) + ".csv");
      std::ofstream out(path, std::ios::binary);
      wlcap::write_network_csv(out, wlcap::generate_network(n, seed));
      std::cout << "wrote " << path.string() << '\n';
    }
  }
  return kExitOk;
}

int cmd_schedule(const Common& c) {
  const auto spec = load(c, std::nullopt);
  std::filesystem::create_directories(spec.out);
  for (double t : spec.t) {
    for (double delta : spec.delta) {
      const auto grid = wlcap::build_grid(t);
      const auto sched = wlcap::build_schedule(grid, delta);
      std::ostringstream name;
      name << "schedule_t" << t << "_delta" << delta << ".csv";
      const auto path = std::filesystem::path(spec.out) / name.str();
      std::ofstream out(path, std::ios::binary);
      wlcap::write_schedule_csv(out, grid, sched);
      std::printf("t=%g delta=%g grid %dx%d L=%d slots=%d -> %s\n", t, delta, grid.cols(), grid.rows(),
                  sched.L(), sched.num_slots(), path.string().c_str());
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wireless multicast capacity experiments"};
  app.require_subcommand(1);
  Common c;
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"generate", "write random network instances (n, seed, trials)"},
      {"schedule", "write the TDMA cell schedule for each t and delta"},
      {"simulate", "throughput simulation sweep"},
      {"cut", "cut capacity sweep (or property_p when the config says so)"},
      {"scaling", "run any experiment kind from the config"},
      {"emst", "EMST length growth in m"},
  };
  std::vector<CLI::App*> cmds;
  for (const auto& s : subs) {
    auto* cmd = app.add_subcommand(s.name, s.help);
    add_common(cmd, c);
    cmds.push_back(cmd);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const std::string which = app.get_subcommands().front()->get_name();
    if (which == "generate") return cmd_generate(c);
    if (which == "schedule") return cmd_schedule(c);
    std::optional<wlcap::ExperimentKind> force;
    if (which == "simulate") force = wlcap::ExperimentKind::Throughput;
    if (which == "cut") force = wlcap::ExperimentKind::Cut;
    if (which == "emst") force = wlcap::ExperimentKind::Emst;
    const auto spec = load(c, force);
    return report(wlcap::run(spec), c.check);
  } catch (const wlcap::InvalidConfig& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return kExitConfig;
  } catch (const wlcap::InvalidParameter& e) {
    std::cerr << "invalid parameter: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
