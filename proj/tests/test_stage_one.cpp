// Copyright 2026 The manoma Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "manoma/stage_one.hpp"
#include "manoma/verify.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

namespace manoma {
namespace {

UserChannel single_path(double theta, double phi, cplx f) {
  UserChannel u;
  u.elevation = Eigen::VectorXd::Constant(1, theta);
  u.azimuth = Eigen::VectorXd::Constant(1, phi);
  u.path_response = CVector::Constant(1, f);
  u.distance = 60.0;
  return u;
}

void expect_nondecreasing(const std::vector<double>& trace) {
  for (std::size_t t = 1; t < trace.size(); ++t) EXPECT_GE(trace[t], trace[t - 1]) << "step " << t;
}

TEST(InitialPositions, FeasibleDraw) {
  SystemConfig cfg;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    const auto apv = initial_positions(cfg, rng);
    EXPECT_EQ(apv.size(), cfg.num_antennas);
    EXPECT_TRUE(apv.feasible(cfg.region_side, cfg.min_spacing, 0.0));
  }
}

TEST(InitialPositions, GridFallback) {
  SystemConfig cfg;
  cfg.num_antennas = 7;
  Rng rng(1);
  const auto apv = initial_positions(cfg, rng, 0);
  EXPECT_TRUE(apv.feasible(cfg.region_side, cfg.min_spacing, 1e-12));
  EXPECT_NEAR(apv.min_pairwise_distance(), cfg.min_spacing, 1e-12);

  cfg.num_antennas = 60;
  EXPECT_THROW(initial_positions(cfg, rng, 0), ConfigError);
}

TEST(SnapSpacing, TinyViolationProjected) {
  AntennaPositionVector apv({Point(0, 0), Point(0.05 - 1e-8, 0)});
  EXPECT_TRUE(snap_spacing(apv, 1, 0.3, 0.05));
  EXPECT_GE((apv[1] - apv[0]).norm(), 0.05);
  EXPECT_NEAR(apv[1].x(), 0.05, 1e-9);
}

TEST(SnapSpacing, LargeViolationRejected) {
  AntennaPositionVector apv({Point(0, 0), Point(0.04, 0)});
  EXPECT_FALSE(snap_spacing(apv, 1, 0.3, 0.05));
}

TEST(StageOne, SinglePathIsConstant) {
  SystemConfig cfg;
  cfg.num_paths = 1;
  const auto real = sample_realization(cfg, 8);
  Rng rng(3);
  const auto init = initial_positions(cfg, rng);
  const auto res = optimize_positions_for_gain(real, cfg, init);
  EXPECT_EQ(res.sweeps, 1);
  ASSERT_EQ(res.trace.size(), 2U);
  EXPECT_NEAR(res.trace[1], res.trace[0], 1e-12 * res.trace[0]);
  for (int m = 0; m < init.size(); ++m) EXPECT_EQ(res.apv[m], init[m]);
}

TEST(StageOne, SingleAntennaMatchesGrid) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SystemConfig cfg;
    cfg.num_antennas = 1;
    cfg.num_users = 1;
    cfg.num_paths = 2;
    cfg.eps_stage_one = 1e-9;
    const auto real = sample_realization(cfg, seed);
    const auto res = optimize_positions_for_gain(real, cfg, AntennaPositionVector({Point::Zero()}));
    const double half = cfg.region_side / 2;
    double grid = 0.0;
    for (int a = 0; a < 200; ++a)
      for (int b = 0; b < 200; ++b) {
        const Point u(-half + a * cfg.region_side / 199, -half + b * cfg.region_side / 199);
        grid = std::max(grid, channel_gain(AntennaPositionVector({u}), real.users[0], cfg.wavelength));
      }
    EXPECT_GE(res.trace.back(), 0.99 * grid) << "seed " << seed;
  }
}

TEST(StageOne, MonotoneFeasibleDeterministic) {
  for (std::uint64_t seed = 40; seed < 50; ++seed) {
    SystemConfig cfg;
    const auto real = sample_realization(cfg, seed);
    Rng rng(seed);
    const auto init = initial_positions(cfg, rng);
    const auto a = optimize_positions_for_gain(real, cfg, init);
    const auto b = optimize_positions_for_gain(real, cfg, init);
    expect_nondecreasing(a.trace);
    EXPECT_TRUE(a.apv.feasible(cfg.region_side, cfg.min_spacing, 0.0)) << "seed " << seed;
    EXPECT_LE(a.sweeps, cfg.max_iter_stage_one);
    EXPECT_NEAR(a.trace.back(), total_channel_gain(a.apv, real, cfg.wavelength), 1e-12 * a.trace.back());
    EXPECT_EQ(a.trace, b.trace);
    EXPECT_EQ(a.apv.positions, b.apv.positions);
  }
}

TEST(StageOne, ConicPathAgrees) {
  SystemConfig cfg;
  cfg.num_users = 3;
  const auto real = sample_realization(cfg, 77);
  Rng rng(77);
  const auto init = initial_positions(cfg, rng);
  StageOneOptions conic;
  conic.use_conic = true;
  const auto a = optimize_positions_for_gain(real, cfg, init);
  const auto b = optimize_positions_for_gain(real, cfg, init, conic);
  expect_nondecreasing(b.trace);
  EXPECT_TRUE(b.apv.feasible(cfg.region_side, cfg.min_spacing, 0.0));
  EXPECT_NEAR(b.trace[1], a.trace[1], 1e-4 * a.trace[1]);
}

TEST(StageOne, RejectsInfeasibleStart) {
  SystemConfig cfg;
  cfg.num_antennas = 2;
  const auto real = sample_realization(cfg, 1);
  EXPECT_THROW(optimize_positions_for_gain(real, cfg, AntennaPositionVector({Point(0, 0), Point(0.01, 0)})),
               std::invalid_argument);
}

TEST(StageOne, Oracles) {
  const auto r = verify_stage_one(VerifyOptions{}, 5);
  for (const auto& c : r) EXPECT_TRUE(c.passed) << c.operation << ": " << c.detail;
}

TEST(DecodingOrder, WeakerUserFirst) {
  ChannelRealization real;
  real.users = {single_path(0.3, 0.2, cplx(2.0, 0.0)), single_path(1.1, -0.4, cplx(0.0, 1.0))};
  const AntennaPositionVector apv({Point(0.01, 0.02)});
  EXPECT_NEAR(channel_gain(apv, real.users[0], 0.1), 4.0, 1e-12);
  EXPECT_EQ(determine_order(apv, real, 0.1).users, (std::vector<int>{1, 0}));
}

TEST(DecodingOrder, TiesKeepIndexOrder) {
  ChannelRealization real;
  for (int k = 0; k < 4; ++k) real.users.push_back(single_path(0.2 * k, 0.1 * k, std::polar(1.5, 0.7 * k)));
  const AntennaPositionVector apv({Point(0.0, 0.0), Point(0.1, 0.0)});
  EXPECT_EQ(determine_order(apv, real, 0.1).users, (std::vector<int>{0, 1, 2, 3}));
}

TEST(DecodingOrder, MatchesSortOracle) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    SystemConfig cfg;
    cfg.num_users = 3;
    const auto real = sample_realization(cfg, seed);
    Rng rng(seed);
    const auto apv = initial_positions(cfg, rng);
    std::vector<std::pair<double, int>> keyed;
    for (int k = 0; k < 3; ++k) {
      const auto h = channel_vector(apv, real.users[static_cast<std::size_t>(k)], cfg.wavelength);
      keyed.emplace_back(h.squaredNorm(), k);
    }
    std::sort(keyed.begin(), keyed.end());
    std::vector<int> want;
    for (const auto& kv : keyed) want.push_back(kv.second);
    const auto got = determine_order(apv, real, cfg.wavelength);
    EXPECT_EQ(got.users, want) << "seed " << seed;
    EXPECT_TRUE(DecodingOrder::is_permutation(got.users));
  }
}

}  // namespace
}  // namespace manoma
