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

#include "manoma/benchmarks.hpp"
#include "manoma/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

namespace manoma {
namespace {

SystemConfig small(int M, int K) {
  SystemConfig cfg;
  cfg.num_antennas = M;
  cfg.num_users = K;
  return cfg;
}

TEST(Fpa, SquareAndRowGeometry) {
  SystemConfig cfg;
  const double q = cfg.wavelength / 4;
  const auto g4 = fpa_positions(cfg);
  const std::vector<Point> want{Point(-q, -q), Point(q, -q), Point(-q, q), Point(q, q)};
  EXPECT_EQ(g4.positions, want);

  cfg.num_antennas = 2;
  const auto g2 = fpa_positions(cfg);
  EXPECT_EQ(g2.positions, (std::vector<Point>{Point(-q, 0), Point(q, 0)}));
}

TEST(Fpa, SpacingExactForAnyFactorization) {
  for (int M = 1; M <= 16; ++M) {
    auto cfg = small(M, 1);
    if (M == 11 || M == 13) {
      EXPECT_THROW(fpa_positions(cfg), ConfigError) << "M " << M;
      continue;
    }
    const auto g = fpa_positions(cfg);
    ASSERT_EQ(g.size(), M);
    EXPECT_TRUE(g.feasible(cfg.region_side, cfg.min_spacing, 1e-15)) << "M " << M;
    if (M > 1) EXPECT_NEAR(g.min_pairwise_distance(), cfg.wavelength / 2, 1e-15) << "M " << M;
    Point c = Point::Zero();
    for (const auto& p : g.positions) c += p;
    EXPECT_LT(c.norm(), 1e-15) << "M " << M;
  }
}

TEST(Fpa, RejectsSpacingAboveHalfWavelength) {
  auto cfg = small(4, 1);
  cfg.min_spacing = 0.08;
  EXPECT_THROW(fpa_positions(cfg), ConfigError);
}

TEST(Fpa, Oracles) {
  for (const auto& c : verify_benchmarks(VerifyOptions{})) EXPECT_TRUE(c.passed) << c.detail;
}

TEST(Scheme, Names) {
  for (Scheme s : kAllSchemes) {
    EXPECT_EQ(parse_scheme(to_string(s)), s);
  }
  EXPECT_EQ(parse_scheme("sdma-fpa"), Scheme::SdmaFpa);
  EXPECT_FALSE(parse_scheme("OMA").has_value());
  EXPECT_TRUE(is_fpa(Scheme::NomaFpa));
  EXPECT_FALSE(is_fpa(Scheme::SdmaMa));
  EXPECT_TRUE(is_sdma(Scheme::SdmaMa));
}

TEST(Scheme, SingleUserSdmaEqualsNoma) {
  const auto cfg = small(2, 1);
  const auto real = sample_realization(cfg, 6);
  for (const auto [noma, sdma] : {std::pair{Scheme::NomaMa, Scheme::SdmaMa}, std::pair{Scheme::NomaFpa, Scheme::SdmaFpa}}) {
    const auto a = run_scheme(noma, real, cfg, GaConfig{}, 6);
    const auto b = run_scheme(sdma, real, cfg, GaConfig{}, 6);
    EXPECT_EQ(a.sum_rate, b.sum_rate) << to_string(noma);
    EXPECT_EQ(a.apv.positions, b.apv.positions);
  }
}

TEST(Scheme, FpaKeepsArrayAndSdmaKeepsIdentity) {
  const auto cfg = small(4, 3);
  const auto real = sample_realization(cfg, 15);
  const auto fpa = run_scheme(Scheme::NomaFpa, real, cfg, GaConfig{}, 15);
  EXPECT_EQ(fpa.apv.positions, fpa_positions(cfg).positions);
  for (const auto& it : fpa.iterates) EXPECT_EQ(it.apv.positions, fpa_positions(cfg).positions);

  const auto sdma = run_scheme(Scheme::SdmaFpa, real, cfg, GaConfig{}, 15);
  EXPECT_EQ(sdma.apv.positions, fpa_positions(cfg).positions);
  EXPECT_EQ(sdma.pi, DecodingIndicatorMatrix::identity(3));

  const auto ma = run_scheme(Scheme::SdmaMa, real, cfg, GaConfig{}, 15);
  for (const auto& it : ma.iterates) EXPECT_EQ(it.pi, DecodingIndicatorMatrix::identity(3));
  EXPECT_TRUE(ma.apv.feasible(cfg.region_side, cfg.min_spacing, 0.0));
}

TEST(ExhaustiveOrder, SingleUserIsTheTwoStageRun) {
  const auto cfg = small(2, 1);
  const auto real = sample_realization(cfg, 2);
  const auto ex = exhaustive_order(real, cfg, GaConfig{}, 2);
  const auto rep = run_two_stage(real, cfg, GaConfig{}, 2);
  ASSERT_EQ(ex.orders.size(), 1U);
  EXPECT_EQ(ex.best.sum_rate, rep.sum_rate);
}

TEST(ExhaustiveOrder, DominatesProposedOrder) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto cfg = small(2, seed == 2 ? 3 : 2);
    const auto real = sample_realization(cfg, seed);
    const auto ex = exhaustive_order(real, cfg, GaConfig{}, seed);
    const auto rep = run_two_stage(real, cfg, GaConfig{}, seed);
    EXPECT_EQ(ex.orders.size(), cfg.num_users == 2 ? 2U : 6U);
    EXPECT_GE(ex.best.sum_rate, rep.sum_rate - 1e-9) << "seed " << seed;
    for (double r : ex.sum_rates) EXPECT_GE(ex.best.sum_rate, r);
    // Stage one is shared, so the proposed order is one of the enumerated runs.
    bool found = false;
    for (std::size_t j = 0; j < ex.orders.size(); ++j)
      if (ex.orders[j].users == rep.order.users) {
        EXPECT_EQ(ex.sum_rates[j], rep.sum_rate);
        found = true;
      }
    EXPECT_TRUE(found);
  }
}

TEST(ExhaustiveOrder, CapEnforced) {
  const auto cfg = small(2, 6);
  EXPECT_THROW(exhaustive_order(sample_realization(cfg, 1), cfg, GaConfig{}, 1), std::invalid_argument);
}

TEST(ExhaustiveIndicator, MatchesBruteForce) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto cfg = small(2, 3);
    const auto real = sample_realization(cfg, seed);
    const AntennaPositionVector apv({Point(-0.05, 0), Point(0.05, 0)});
    const auto w = equal_power_mrt(channel_table(apv, real, cfg.wavelength), cfg.max_power);
    const auto res = exhaustive_indicator(w, apv, real, cfg);
    const auto h = channel_table(apv, real, cfg.wavelength);
    const FitnessContext ctx{received_power_table(h, w), std::vector<double>(3, cfg.noise_power), cfg.min_rate,
                             GaConfig{}.penalty};
    double best = -1e300;
    for (int code = 0; code < 8; ++code) best = std::max(best, fitness({Gene::value_type((code >> 2) & 1),
                                                                       Gene::value_type((code >> 1) & 1),
                                                                       Gene::value_type(code & 1)}, ctx));
    EXPECT_EQ(res.best_fitness, best) << "seed " << seed;
    Rng rng(seed);
    GaConfig ga;
    ga.generations = 10;
    ga.population = 10;
    EXPECT_LE(run_ga(ctx, ga, rng).best_fitness, res.best_fitness);
  }
}

TEST(ExhaustiveIndicator, TwoUsersTwoCandidates) {
  const auto cfg = small(2, 2);
  const auto real = sample_realization(cfg, 4);
  const AntennaPositionVector apv({Point(-0.05, 0), Point(0.05, 0)});
  const auto w = equal_power_mrt(channel_table(apv, real, cfg.wavelength), cfg.max_power);
  const auto h = channel_table(apv, real, cfg.wavelength);
  const FitnessContext ctx{received_power_table(h, w), std::vector<double>(2, cfg.noise_power), cfg.min_rate,
                           GaConfig{}.penalty};
  EXPECT_EQ(exhaustive_indicator(w, apv, real, cfg).best_fitness, std::max(fitness({0}, ctx), fitness({1}, ctx)));
}

TEST(Variants, SingleUserAllIdentical) {
  const auto cfg = small(3, 1);
  const auto real = sample_realization(cfg, 10);
  const auto rep = run_two_stage(real, cfg, GaConfig{}, 10);
  // The fixed variant drops the rate floor, so its SDPs differ within solver tolerance.
  EXPECT_NEAR(fixed_indicator_run(real, cfg, GaConfig{}, 10).sum_rate, rep.sum_rate, 1e-5);
  EXPECT_EQ(random_order_run(real, cfg, GaConfig{}, 10).sum_rate, rep.sum_rate);
  EXPECT_EQ(exhaustive_indicator_run(real, cfg, GaConfig{}, 10).sum_rate, rep.sum_rate);
}

TEST(Variants, FixedIndicatorIsFullSic) {
  const auto cfg = small(2, 3);
  const auto rep = fixed_indicator_run(sample_realization(cfg, 5), cfg, GaConfig{}, 5);
  EXPECT_EQ(rep.pi, DecodingIndicatorMatrix::full(3));
  EXPECT_TRUE(rep.qos_met);  // no rate floor
}

TEST(Variants, RandomOrderIsSeededPermutation) {
  const auto cfg = small(2, 4);
  const auto real = sample_realization(cfg, 7);
  const auto a = random_order_run(real, cfg, GaConfig{}, 7);
  const auto b = random_order_run(real, cfg, GaConfig{}, 7);
  EXPECT_TRUE(DecodingOrder::is_permutation(a.order.users));
  EXPECT_EQ(a.order.users, b.order.users);
  EXPECT_EQ(a.sum_rate, b.sum_rate);
}

}  // namespace
}  // namespace manoma
