#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wlcap/cut_analysis.hpp"
#include "wlcap/protocol_model.hpp"
#include "wlcap/scaling.hpp"

namespace wlcap {

enum class ExperimentKind { Emst, Links, Memtc, Throughput, Cut, PropertyP, Gain };

const char* to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(std::string_view text);

/// Parsed `key = value` lines; `#` starts a comment. Keys are unique.
using ConfigMap = std::map<std::string, std::string>;

/// Throws InvalidConfig on a line without '=', an empty key or a repeated key.
ConfigMap parse_config_text(std::istream& in);

/// One experiment recipe. Every list is a sweep axis; exactly one of them (the
/// `sweep` variable) may hold more than one value per fitted curve, the others
/// contribute a full cross product of curves.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::Throughput;
  std::vector<std::size_t> n{1000};
  std::vector<double> t{0.1};
  std::vector<std::size_t> m{3};
  std::vector<double> delta{0.0};
  std::vector<Mode> modes{Mode::MPT_MPR};
  std::string sweep = "t";  // regression variable: n, t or m
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  std::string out = "out";

  // throughput
  std::size_t slots = 0;
  std::size_t warmup = 0;
  std::size_t window = 0;

  // cut
  CutAxis cut_axis = CutAxis::Vertical;
  double cut_pos = 0.5;

  // memtc: sessions sampled per instance
  std::size_t sessions = 100;

  // gain: t = t_const * connectivity_range(n)
  double t_const = 2.0;

  // --check: one expected slope per mode (or one for all) and a shared band
  std::vector<double> expect_slope;
  double slope_tol = 0.3;
};

/// Builds a spec from parsed keys. Unknown keys, unparsable values, empty sweeps
/// and trials == 0 throw InvalidConfig.
///
/// Lists are comma separated. `t_geom = lo, hi, k` and `n_geom = lo, hi, k` give
/// k log-uniform values (n rounded) in place of `t` / `n`.
ExperimentSpec spec_from_config(const ConfigMap& cfg);
ExperimentSpec load_spec(const std::filesystem::path& path);

/// Applies one `key=value` override on top of an existing spec.
void apply_override(ExperimentSpec& spec, const std::string& assignment);

struct CurveFit {
  std::string label;  // e.g. "MPT_MPR n=4000 m=3 delta=0"
  ScalingResult fit;
  std::optional<double> expected;
  bool within = true;
};

struct ExperimentResult {
  std::vector<CurveFit> curves;
  std::vector<std::filesystem::path> files;
  bool within_tolerance() const;
};

/// Runs every sweep point for `trials` seeds (seed, seed+1, ...), writes CSVs
/// into spec.out and fits one log-log curve per combination of the non-swept
/// parameters. Sweeps with fewer than three distinct points are written but not
/// fitted. Module errors are rethrown with the failing sweep point prepended.
ExperimentResult run(const ExperimentSpec& spec);

}  // namespace wlcap
