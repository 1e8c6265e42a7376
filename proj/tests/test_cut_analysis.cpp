#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "oracles/oracles.hpp"
#include "wlcap/cut_analysis.hpp"

using namespace wlcap;

namespace {
const Mode kModes[] = {Mode::PTP, Mode::MPT, Mode::MPR, Mode::MPT_MPR};
}

TEST(CutType, PositionRange) {
  EXPECT_NO_THROW(Cut(CutAxis::Vertical, 0.25));
  EXPECT_NO_THROW(Cut(CutAxis::Horizontal, 0.75));
  EXPECT_THROW(Cut(CutAxis::Vertical, 0.2), InvalidParameter);
  EXPECT_THROW(Cut(CutAxis::Vertical, 0.8), InvalidParameter);
}

TEST(CutType, Regions) {
  const Cut v(CutAxis::Vertical, 0.5);
  EXPECT_TRUE(v.in_region({0.49, 0.9}));
  EXPECT_FALSE(v.in_region({0.5, 0.1}));
  const Cut h(CutAxis::Horizontal, 0.3);
  EXPECT_TRUE(h.in_region({0.9, 0.29}));
  EXPECT_FALSE(h.in_region({0.1, 0.31}));
}

TEST(Reduce, SingleDestination) {
  const NetworkInstance net({{0.1, 0.1}, {0.2, 0.2}, {0.9, 0.9}});
  const std::vector<MulticastSession> s{{0, {1}}, {1, {2}}};
  const auto r = reduce_to_unicast(net, s, Cut());
  ASSERT_EQ(r.pairs.size(), 2u);
  EXPECT_EQ(r.pairs[0], std::make_pair(NodeId{0}, NodeId{1}));
  EXPECT_EQ(r.pairs[1], std::make_pair(NodeId{1}, NodeId{2}));
}

TEST(Reduce, PicksAcrossTheCut) {
  const NetworkInstance net({{0.1, 0.5}, {0.2, 0.5}, {0.8, 0.5}, {0.7, 0.1}});
  const std::vector<MulticastSession> s{{0, {1, 3, 2}}};
  const auto r = reduce_to_unicast(net, s, Cut());
  EXPECT_EQ(r.pairs[0].second, 2u);  // lowest id on the right
}

TEST(Reduce, ChosenDestinationIsMember) {
  const auto net = generate_network(10000, 4);
  const auto sessions = make_sessions(net, 3, 4);
  const Cut cut;
  const auto r = reduce_to_unicast(net, sessions, cut);
  ASSERT_EQ(r.pairs.size(), sessions.size());
  std::size_t crossing = 0;
  for (std::size_t i = 0; i < sessions.size(); ++i) {
    const auto& d = sessions[i].destinations;
    EXPECT_EQ(r.pairs[i].first, sessions[i].source);
    EXPECT_NE(std::find(d.begin(), d.end(), r.pairs[i].second), d.end());
    crossing += cut.in_region(net[r.pairs[i].first]) != cut.in_region(net[r.pairs[i].second]);
  }
  EXPECT_EQ(crossing, count_property_p(net, sessions, cut));
}

TEST(PropertyP, AllOnOneSide) {
  auto rng = make_rng(1, 9);
  std::vector<Point> pts(50);
  for (auto& p : pts) p = {0.4 * uniform01(rng), uniform01(rng)};
  const NetworkInstance net(pts);
  EXPECT_EQ(count_property_p(net, make_sessions(net, 3, 1), Cut()), 0u);
}

TEST(PropertyP, FractionMatchesClosedForm) {
  const std::size_t n = 10000;
  for (std::size_t m : {1u, 3u, 6u}) {
    double sum = 0.0;
    const int seeds = 5;
    for (int seed = 1; seed <= seeds; ++seed) {
      const auto net = generate_network(n, seed);
      sum += static_cast<double>(count_property_p(net, make_sessions(net, m, seed), Cut())) / n;
    }
    EXPECT_NEAR(sum / seeds, oracle::property_p_probability(m), 0.02) << "m=" << m;
  }
}

TEST(PropertyP, GrowsTowardOne) {
  const auto net = generate_network(4000, 2);
  const double f20 = static_cast<double>(count_property_p(net, make_sessions(net, 20, 2), Cut())) / 4000;
  EXPECT_GT(f20, 0.99);
}

TEST(CutWitness, FeasibleAndCrossing) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto net = generate_network(5000, seed);
    for (const Cut& cut : {Cut(), Cut(CutAxis::Horizontal, 0.3)}) {
      for (Mode mode : kModes) {
        for (double delta : {0.0, 0.5}) {
          const auto ts = cut_witness(net, cut, mode, 0.06, delta);
          EXPECT_TRUE(oracle::feasible(ts, net)) << to_string(mode);
          EXPECT_GT(ts.size(), 0u);
          for (const auto& l : ts.links) {
            EXPECT_TRUE(cut.in_region(net[l.tx]));
            EXPECT_FALSE(cut.in_region(net[l.rx]));
          }
        }
      }
    }
  }
}

TEST(CutWitness, Monotone) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto net = generate_network(10000, seed);
    for (double t : {0.04, 0.08}) {
      const auto ptp = cut_capacity(net, Cut(), Mode::PTP, t, 0.0);
      const auto mpr = cut_capacity(net, Cut(), Mode::MPR, t, 0.0);
      const auto both = cut_capacity(net, Cut(), Mode::MPT_MPR, t, 0.0);
      EXPECT_GE(both, mpr);
      EXPECT_GE(mpr, ptp);
    }
  }
}

TEST(CutWitness, BelowConnectivityRejected) {
  const auto net = generate_network(10000, 1);
  EXPECT_THROW(cut_capacity(net, Cut(), Mode::PTP, 0.02, 0.0), InvalidParameter);
}

TEST(CutWitness, ScalingExponents) {
  const double ts[] = {0.032, 0.0452, 0.064, 0.0905, 0.128};
  const std::pair<Mode, double> want[] = {
      {Mode::PTP, -1.0}, {Mode::MPT, 1.0}, {Mode::MPR, 1.0}, {Mode::MPT_MPR, 3.0}};
  for (const auto& [mode, slope] : want) {
    std::vector<std::pair<double, double>> xy;
    for (double t : ts) {
      double sum = 0.0;
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        sum += static_cast<double>(cut_capacity(generate_network(10000, seed), Cut(), mode, t, 0.0));
      }
      xy.emplace_back(t, sum / 3.0);
    }
    EXPECT_NEAR(fit_loglog(xy).slope, slope, 0.3) << to_string(mode);
  }
}

TEST(NcBound, Formulas) {
  EXPECT_DOUBLE_EQ(nc_upper_bound_rate(Mode::PTP, 100, 0.1), 0.1);
  EXPECT_DOUBLE_EQ(nc_upper_bound_rate(Mode::MPT, 100, 0.1), nc_upper_bound_rate(Mode::MPR, 100, 0.1));
  EXPECT_NEAR(nc_upper_bound_rate(Mode::MPT_MPR, 1000, 0.1), 1.0, 1e-12);
}

TEST(CutCsv, Rows) {
  std::ostringstream os;
  write_cut_csv_header(os);
  write_cut_csv_row(os, Mode::MPR, 100, 0.05, Cut(CutAxis::Horizontal, 0.4), 12);
  write_property_p_csv_header(os);
  write_property_p_csv_row(os, 100, 3, 7, 0.875);
  EXPECT_EQ(os.str(),
            "mode,n,t,cut_axis,cut_pos,links\nMPR,100,0.05,horizontal,0.4,12\n"
            "n,m,seed,fraction\n100,3,7,0.875\n");
}
