#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wlcap/errors.hpp"
#include "wlcap/experiment.hpp"

using namespace wlcap;
namespace fs = std::filesystem;

namespace {

ExperimentSpec parse(const std::string& text) {
  std::istringstream in(text);
  return spec_from_config(parse_config_text(in));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("wlcap_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, KeyValueAndComments) {
  std::istringstream in("# header\nkind = cut   # trailing\n\n  n=100, 200\nmode = PTP\n");
  const auto m = parse_config_text(in);
  EXPECT_EQ(m.size(), 3u);
  EXPECT_EQ(m.at("kind"), "cut");
  EXPECT_EQ(m.at("n"), "100, 200");
}

TEST(Config, Malformed) {
  EXPECT_THROW(parse("kind cut\n"), InvalidConfig);
  EXPECT_THROW(parse(" = 3\n"), InvalidConfig);
  EXPECT_THROW(parse("n = 1\nn = 2\n"), InvalidConfig);
  EXPECT_THROW(parse("colour = red\n"), InvalidConfig);
  EXPECT_THROW(parse("kind = teleport\n"), InvalidConfig);
  EXPECT_THROW(parse("t = 0.1, abc\n"), InvalidConfig);
  EXPECT_THROW(parse("n = -5\n"), InvalidConfig);
  EXPECT_THROW(parse("trials = 0\n"), InvalidConfig);
  EXPECT_THROW(parse("mode = PTP, FOO\n"), InvalidConfig);
  EXPECT_THROW(parse("t =\n"), InvalidConfig);
  EXPECT_THROW(parse("cut_pos = 0.9\n"), InvalidConfig);
  EXPECT_THROW(parse("kind = gain\nsweep = t\n"), InvalidConfig);
  EXPECT_THROW(parse("mode = PTP, MPR\nexpect_slope = 1, 2, 3\n"), InvalidConfig);
}

TEST(Config, Defaults) {
  const auto s = parse("");
  EXPECT_EQ(s.kind, ExperimentKind::Throughput);
  EXPECT_EQ(s.sweep, "t");
  EXPECT_EQ(parse("kind = emst\n").sweep, "m");
  EXPECT_EQ(parse("kind = gain\n").sweep, "n");
  EXPECT_EQ(parse("kind = property_p\n").sweep, "m");
}

TEST(Config, GeometricSweep) {
  const auto s = parse("t_geom = 0.06, 0.15, 4\nn_geom = 1000, 8000, 4\n");
  ASSERT_EQ(s.t.size(), 4u);
  EXPECT_NEAR(s.t.front(), 0.06, 1e-15);
  EXPECT_NEAR(s.t.back(), 0.15, 1e-15);
  EXPECT_NEAR(s.t[1] / s.t[0], s.t[2] / s.t[1], 1e-12);
  EXPECT_EQ(s.n, (std::vector<std::size_t>{1000, 2000, 4000, 8000}));
  EXPECT_THROW(parse("t_geom = 0.1, 0.05, 3\n"), InvalidConfig);
  EXPECT_THROW(parse("t_geom = 0.1, 0.5\n"), InvalidConfig);
}

TEST(Config, Overrides) {
  auto s = parse("kind = cut\nn = 500\n");
  apply_override(s, "n=700");
  EXPECT_EQ(s.n, (std::vector<std::size_t>{700}));
  apply_override(s, "kind=emst");
  EXPECT_EQ(s.sweep, "m");
  EXPECT_THROW(apply_override(s, "n"), InvalidConfig);
}

TEST(Run, CutWritesCsvAndFits) {
  auto s = parse("kind = cut\nn = 10000\nt = 0.05, 0.07, 0.1\nmode = MPR\ntrials = 2\n"
                 "expect_slope = 1\nslope_tol = 0.5\n");
  s.out = scratch("cut").string();
  const auto r = run(s);
  ASSERT_EQ(r.curves.size(), 1u);
  EXPECT_TRUE(r.within_tolerance());
  std::istringstream csv(slurp(fs::path(s.out) / "cut.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "mode,n,t,cut_axis,cut_pos,links");
  std::size_t rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 6u);
}

TEST(Run, ByteIdenticalReruns) {
  auto s = parse("kind = throughput\nn = 250\nt = 0.25, 0.3, 0.35\nmode = PTP, MPT_MPR\n"
                 "slots = 400\nwarmup = 100\n");
  s.out = scratch("rerun_a").string();
  run(s);
  const auto a = slurp(fs::path(s.out) / "throughput_rates.csv");
  const auto a_agg = slurp(fs::path(s.out) / "throughput.csv");
  s.out = scratch("rerun_b").string();
  run(s);
  EXPECT_EQ(a, slurp(fs::path(s.out) / "throughput_rates.csv"));
  EXPECT_EQ(a_agg, slurp(fs::path(s.out) / "throughput.csv"));
  std::istringstream agg(a_agg);
  std::string header;
  std::getline(agg, header);
  EXPECT_EQ(header, "mode,n,t,m,mean_rate,stderr");
}

TEST(Run, SweepOrderDoesNotChangeFit) {
  auto a = parse("kind = links\nn = 3000\nt = 0.06, 0.09, 0.12\ntrials = 2\n");
  auto b = parse("kind = links\nn = 3000\nt = 0.12, 0.06, 0.09\ntrials = 2\n");
  a.out = scratch("order_a").string();
  b.out = scratch("order_b").string();
  const auto ra = run(a);
  const auto rb = run(b);
  ASSERT_EQ(ra.curves.size(), 1u);
  ASSERT_EQ(rb.curves.size(), 1u);
  EXPECT_NEAR(ra.curves[0].fit.slope, rb.curves[0].fit.slope, 1e-12);
}

TEST(Run, EmstMatchesStudy) {
  auto s = parse("kind = emst\nm = 4, 16, 64\ntrials = 40\nseed = 3\n");
  s.out = scratch("emst").string();
  const auto r = run(s);
  const std::vector<std::size_t> ms{4, 16, 64};
  const auto study = emst_scaling_study(ms, 40, 3);
  ASSERT_EQ(r.curves.size(), 1u);
  EXPECT_DOUBLE_EQ(r.curves[0].fit.slope, study.slope);
}

TEST(Run, PropertyPAndMemtc) {
  auto p = parse("kind = property_p\nn = 2000\nm = 1, 2, 4\ntrials = 2\n");
  p.out = scratch("pp").string();
  const auto rp = run(p);
  ASSERT_EQ(rp.curves.size(), 1u);
  EXPECT_GT(rp.curves[0].fit.slope, 0.0);

  auto m = parse("kind = memtc\nn = 2000\nt = 0.1, 0.14, 0.2\nm = 5\nsessions = 30\n");
  m.out = scratch("memtc").string();
  const auto rm = run(m);
  ASSERT_EQ(rm.curves.size(), 1u);
  EXPECT_LT(rm.curves[0].fit.slope, 0.0);
}

TEST(Run, GainTracksLogSquared) {
  auto s = parse("kind = gain\nn = 300, 450, 600\nm = 2\nt_const = 2.5\nslots = 2000\nwarmup = 400\n");
  s.out = scratch("gain").string();
  const auto r = run(s);
  ASSERT_EQ(r.curves.size(), 1u);
  EXPECT_TRUE(std::isfinite(r.curves[0].fit.slope));
  EXPECT_TRUE(fs::exists(fs::path(s.out) / "gain.csv"));
}

TEST(Run, ErrorCarriesSweepPoint) {
  auto s = parse("kind = cut\nn = 10000\nt = 0.01\n");
  s.out = scratch("err").string();
  try {
    run(s);
    FAIL();
  } catch (const InvalidParameter& e) {
    EXPECT_NE(std::string(e.what()).find("t=0.01"), std::string::npos) << e.what();
  }
}
