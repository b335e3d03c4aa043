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

#include "manoma/orchestrator.hpp"
#include "manoma/problems.hpp"
#include "manoma/stage_one.hpp"
#include "manoma/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <vector>

namespace manoma {
namespace {

bool residuals_ok(const ConicSolution& s, const ConicOptions& o = {}) {
  return s.optimal() && s.primal_residual <= o.feas_tol && s.dual_residual <= o.feas_tol && s.gap <= o.gap_tol;
}

TEST(Conic, UnitInterval) {
  ConicProblem p;
  const int x = p.add_variable("x");
  p.maximize(AffineExpr::var(x));
  p.add_nonnegative(AffineExpr::var(x));
  p.add_less_equal(AffineExpr::var(x), 1.0);
  const auto s = solve_conic(p);
  ASSERT_TRUE(residuals_ok(s)) << to_string(s.status);
  EXPECT_NEAR(s.x[x], 1.0, 1e-7);
  EXPECT_NEAR(s.objective, 1.0, 1e-7);
}

TEST(Conic, NormOfThreeFour) {
  ConicProblem p;
  const int t = p.add_variable("t");
  p.minimize(AffineExpr::var(t));
  p.add_soc({AffineExpr::var(t), 3.0, 4.0});
  const auto s = solve_conic(p);
  ASSERT_TRUE(residuals_ok(s)) << to_string(s.status);
  EXPECT_NEAR(s.x[t], 5.0, 1e-6);
}

TEST(Conic, EqualityAndObjectiveConstant) {
  // max 2 + x + y  s.t.  x + y = 3,  x, y >= 0
  ConicProblem p;
  const int x = p.add_variable();
  const int y = p.add_variable();
  p.maximize(AffineExpr(2.0) + AffineExpr::var(x) + AffineExpr::var(y));
  p.add_equality(AffineExpr::var(x) + AffineExpr::var(y) - 3.0);
  p.add_nonnegative(AffineExpr::var(x));
  p.add_nonnegative(AffineExpr::var(y));
  const auto s = solve_conic(p);
  ASSERT_TRUE(residuals_ok(s));
  EXPECT_NEAR(s.objective, 5.0, 1e-6);
  EXPECT_NEAR(s.x[x] + s.x[y], 3.0, 1e-7);
}

TEST(Conic, Oracles) {
  const auto r = verify_solver(VerifyOptions{}, 50);
  for (const auto& c : r) EXPECT_TRUE(c.passed) << c.operation << ": " << c.detail;
}

TEST(Conic, InfeasibleAndUnbounded) {
  ConicProblem p;
  const int x = p.add_variable();
  p.maximize(AffineExpr::var(x));
  p.add_soc({1.0, AffineExpr::var(x)});
  p.add_nonnegative(AffineExpr::var(x) - 3.0);
  EXPECT_EQ(solve_conic(p).status, ConicStatus::Infeasible);

  ConicProblem q;
  const int t = q.add_variable();
  const int u = q.add_variable();
  q.maximize(AffineExpr::var(t));
  q.add_soc({AffineExpr::var(t), AffineExpr::var(u)});
  EXPECT_EQ(solve_conic(q).status, ConicStatus::Unbounded);
}

TEST(Conic, RejectsMalformedBlocks) {
  ConicProblem p;
  p.add_variable();
  EXPECT_THROW(p.add_soc({}), std::invalid_argument);
  EXPECT_THROW(p.add_psd(2, {AffineExpr(1.0)}), std::invalid_argument);
}

TEST(Conic, DumpListsBlocks) {
  ConicProblem p;
  const int t = p.add_variable("t");
  p.maximize(AffineExpr::var(t));
  p.add_soc({1.0, AffineExpr::var(t)});
  std::ostringstream os;
  p.dump(os);
  EXPECT_NE(os.str().find("sense maximize"), std::string::npos);
}

// ---------------------------------------------------------------------------
// Gain QP.

GainQpData hand_made(Point anchor, Point gradient, double curvature, double side) {
  GainQpData d;
  d.anchor = anchor;
  d.gradient = gradient;
  d.curvature = curvature;
  d.value = 1.0;
  AntennaPositionVector apv({anchor});
  d.constraints = region_and_spacing(apv, 0, side, 0.05);
  return d;
}

TEST(GainQp, FlatObjectiveStaysAtAnchor) {
  const auto d = hand_made(Point(0.02, -0.07), Point::Zero(), 0.0, 0.3);
  EXPECT_EQ(solve_gain_qp_closed_form(d), d.anchor);
  const auto qp = build_gain_qp(d, 0.1);
  const auto s = solve_conic(qp.problem);
  ASSERT_TRUE(s.optimal());
  EXPECT_NEAR(s.objective * qp.scale, d.value, 1e-9);
  EXPECT_TRUE(d.feasible(qp.position(s), 1e-7));
}

TEST(GainQp, VertexClippedToBox) {
  const auto d = hand_made(Point::Zero(), Point(1.0, -2.0), 10.0, 0.3);
  const Point want(0.1, -0.15);  // vertex (0.1, -0.2), y clipped to -A/2
  EXPECT_LT((solve_gain_qp_closed_form(d) - want).norm(), 1e-12);
  const auto qp = build_gain_qp(d, 0.1);
  const auto s = solve_conic(qp.problem);
  ASSERT_TRUE(residuals_ok(s));
  // The objective is flat at the optimum, so only its value is pinned tightly.
  EXPECT_NEAR(d.surrogate(qp.position(s)), d.surrogate(want), 1e-7);
  EXPECT_LT((qp.position(s) - want).norm(), 1e-3 * 0.1);

  const auto inside = hand_made(Point::Zero(), Point(0.3, 0.2), 10.0, 0.3);
  EXPECT_LT((solve_gain_qp_closed_form(inside) - Point(0.03, 0.02)).norm(), 1e-12);
}

TEST(GainQp, CutsExcludingBoxFallBackToAnchor) {
  auto d = hand_made(Point::Zero(), Point(1.0, 0.0), 1.0, 0.3);
  d.constraints.push_back({Point(1.0, 0.0), -10.0});
  EXPECT_EQ(solve_gain_qp_closed_form(d), d.anchor);
}

struct QpCase {
  SystemConfig cfg;
  ChannelRealization real;
  AntennaPositionVector apv;
};

QpCase qp_case(std::uint64_t seed) {
  QpCase c;
  c.real = sample_realization(c.cfg, seed);
  Rng rng(derive_seed(seed, 7));
  c.apv = initial_positions(c.cfg, rng);
  return c;
}

TEST(GainQp, BeatsConstrainedGrid) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto c = qp_case(seed);
    const PhiContext ctx(c.real, c.cfg.wavelength);
    const int m = static_cast<int>(seed % 4);
    const auto d = gain_qp_data(m, ctx, c.apv, c.cfg);
    const double scale = std::abs(d.value);
    double grid_best = -std::numeric_limits<double>::infinity();
    const double half = c.cfg.region_side / 2;
    for (int a = 0; a < 100; ++a)
      for (int b = 0; b < 100; ++b) {
        const Point u(-half + a * c.cfg.region_side / 99, -half + b * c.cfg.region_side / 99);
        if (d.feasible(u)) grid_best = std::max(grid_best, d.surrogate(u));
      }
    const Point closed = solve_gain_qp_closed_form(d);
    EXPECT_TRUE(d.feasible(closed, 1e-9)) << "seed " << seed;
    EXPECT_GE(d.surrogate(closed), grid_best - 1e-6 * scale) << "seed " << seed;

    const auto qp = build_gain_qp(d, c.cfg.wavelength);
    const auto s = solve_conic(qp.problem);
    ASSERT_TRUE(residuals_ok(s)) << "seed " << seed << " " << to_string(s.status);
    const Point conic = qp.position(s);
    EXPECT_GE(d.surrogate(conic), grid_best - 1e-6 * scale) << "seed " << seed;
    EXPECT_NEAR(d.surrogate(conic), d.surrogate(closed), 1e-6 * scale) << "seed " << seed;
  }
}

TEST(GainQp, NeverLowersPhi) {
  for (std::uint64_t seed = 100; seed < 150; ++seed) {
    const auto c = qp_case(seed);
    const PhiContext ctx(c.real, c.cfg.wavelength);
    for (int m = 0; m < c.apv.size(); ++m) {
      const auto d = gain_qp_data(m, ctx, c.apv, c.cfg);
      const double after = phi_value(ctx, solve_gain_qp_closed_form(d));
      EXPECT_GE(after, d.value - 1e-9 * d.value) << "seed " << seed << " m " << m;
    }
  }
}

// ---------------------------------------------------------------------------
// Beamforming SDP.

struct SdpRun {
  std::vector<CVector> w;
  std::vector<double> ratios;
  ConicSolution last;
};

// Sequential refinement of the anchors until the beams stop changing.
SdpRun refine(const std::vector<CVector>& h, const DecodingIndicatorMatrix& pi, std::vector<CVector> w,
              const std::vector<double>& noise, double max_power, int iterations) {
  SdpRun run;
  for (int t = 0; t < iterations; ++t) {
    const auto anchors = tight_anchors(received_power_table(h, w), pi, noise);
    const auto sdp = build_beamforming_sdp(h, pi, anchors, noise, max_power, 0.0);
    run.last = solve_conic(sdp.problem);
    if (!run.last.optimal()) break;
    run.ratios.clear();
    w.clear();
    for (const auto& W : sdp.covariances(run.last)) {
      const auto r = extract_rank_one(W);
      w.push_back(r.w);
      run.ratios.push_back(r.ratio);
    }
  }
  run.w = w;
  return run;
}

TEST(BeamformingSdp, SingleUserReachesMrt) {
  SystemConfig cfg;
  cfg.num_users = 1;
  const auto real = sample_realization(cfg, 3);
  const AntennaPositionVector apv({Point(-0.1, 0), Point(0.1, 0), Point(0, 0.1), Point(0, -0.1)});
  const auto h = channel_table(apv, real, cfg.wavelength);
  const std::vector<double> noise{cfg.noise_power};
  const std::vector<CVector> start{h[0] * (std::sqrt(cfg.max_power / 4) / h[0].norm())};
  const auto run = refine(h, DecodingIndicatorMatrix::identity(1), start, noise, cfg.max_power, 25);
  ASSERT_TRUE(run.last.optimal());
  const double want = std::log2(1.0 + cfg.max_power * h[0].squaredNorm() / cfg.noise_power);
  EXPECT_NEAR(sum_rate(h, run.w, DecodingIndicatorMatrix::identity(1), noise), want, 1e-3);
  EXPECT_NEAR(run.last.objective, want, 1e-3);
  EXPECT_LT(run.ratios[0], kRankOneTol);
  EXPECT_NEAR(std::abs(run.w[0].normalized().dot(h[0].normalized())), 1.0, 1e-6);
}

TEST(BeamformingSdp, OrthogonalUsersMatchPowerGrid) {
  const std::vector<CVector> h{CVector::Unit(2, 0) * 3.0, CVector::Unit(2, 1) * 1.0};
  const std::vector<double> noise{1.0, 1.0};
  const auto pi = DecodingIndicatorMatrix::identity(2);
  const std::vector<CVector> start{CVector::Unit(2, 0) * std::sqrt(0.5), CVector::Unit(2, 1) * std::sqrt(0.5)};
  const auto run = refine(h, pi, start, noise, 1.0, 40);
  ASSERT_TRUE(run.last.optimal());

  double grid = 0.0;
  for (int n = 0; n <= 10000; ++n) {
    const double p = n / 10000.0;
    grid = std::max(grid, std::log2(1.0 + 9.0 * p) + std::log2(1.0 + (1.0 - p)));
  }
  EXPECT_NEAR(sum_rate(h, run.w, pi, noise), grid, 1e-3);
  EXPECT_LE(total_power(run.w), 1.0 + 1e-6);
}

TEST(BeamformingSdp, IdentityIndicatorSize) {
  const int K = 3, M = 2;
  SystemConfig cfg;
  cfg.num_users = K;
  const auto real = sample_realization(cfg, 9);
  const AntennaPositionVector apv({Point(-0.1, 0), Point(0.1, 0)});
  const auto h = channel_table(apv, real, cfg.wavelength);
  const std::vector<CVector> w = equal_power_mrt(h, cfg.max_power);
  const std::vector<double> noise(K, cfg.noise_power);
  const auto pi = DecodingIndicatorMatrix::identity(K);
  const auto sdp = build_beamforming_sdp(h, pi, tight_anchors(received_power_table(h, w), pi, noise), noise,
                                         cfg.max_power, 0.0);
  EXPECT_EQ(sdp.problem.num_psd(), K);
  EXPECT_EQ(sdp.problem.num_variables(), K * M * M + 2 * K + K);
  EXPECT_EQ(sdp.problem.num_soc(), K);

  const auto full = DecodingIndicatorMatrix::full(K);
  const auto big = build_beamforming_sdp(h, full, tight_anchors(received_power_table(h, w), full, noise), noise,
                                         cfg.max_power, 0.0);
  EXPECT_EQ(big.problem.num_soc(), K * (K + 1) / 2);
}

TEST(BeamformingSdp, RejectsNonPositiveAnchors) {
  const std::vector<CVector> h{CVector::Ones(2)};
  SlackAnchors a;
  a.pairs.push_back({0, 0, 0.0, 1.0});
  EXPECT_THROW(build_beamforming_sdp(h, DecodingIndicatorMatrix::identity(1), a, {1.0}, 1.0, 0.0),
               std::invalid_argument);
}

TEST(BeamformingSdp, HyperbolicConstraintsHold) {
  SystemConfig cfg;
  cfg.num_users = 3;
  const auto real = sample_realization(cfg, 21);
  const AntennaPositionVector apv({Point(-0.1, 0), Point(0.1, 0), Point(0, 0.1), Point(0, -0.1)});
  const auto h = channel_table(apv, real, cfg.wavelength);
  const auto w = equal_power_mrt(h, cfg.max_power);
  const std::vector<double> noise(3, cfg.noise_power);
  const auto pi = DecodingIndicatorMatrix::full(3);
  const auto sdp = build_beamforming_sdp(h, pi, tight_anchors(received_power_table(h, w), pi, noise), noise,
                                         cfg.max_power, 0.0);
  const auto s = solve_conic(sdp.problem);
  ASSERT_TRUE(residuals_ok(s));
  const auto W = sdp.covariances(s);
  for (const auto& [k, i] : pi.active_pairs()) {
    const std::string name = "alpha" + std::to_string(k) + "_" + std::to_string(i);
    int var = -1;
    for (int j = 0; j < sdp.problem.num_variables(); ++j)
      if (sdp.problem.name(j) == name) var = j;
    ASSERT_GE(var, 0) << name;
    const auto& hi = h[static_cast<std::size_t>(i)];
    const double gain = (hi.adjoint() * W[static_cast<std::size_t>(k)] * hi)(0, 0).real() / cfg.noise_power;
    EXPECT_GE(s.x[var] * gain, 1.0 - 1e-6) << name;
  }
}

TEST(BeamformingSdp, Deterministic) {
  const std::vector<CVector> h{CVector::Unit(2, 0) * 2.0 + CVector::Unit(2, 1), CVector::Unit(2, 1) * 1.5};
  const std::vector<double> noise{1.0, 1.0};
  const auto pi = DecodingIndicatorMatrix::full(2);
  const auto w = equal_power_mrt(h, 1.0);
  const auto sdp = build_beamforming_sdp(h, pi, tight_anchors(received_power_table(h, w), pi, noise), noise, 1.0, 0.0);
  const auto a = solve_conic(sdp.problem);
  const auto b = solve_conic(sdp.problem);
  ASSERT_TRUE(a.optimal());
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.iterations, b.iterations);
}

// ---------------------------------------------------------------------------
// Rank-one extraction.

TEST(RankOne, RecoversOuterProduct) {
  CVector w(3);
  w << cplx(1, 2), cplx(-0.5, 0.3), cplx(0, -1);
  const CMatrix W = w * w.adjoint();
  const auto r = extract_rank_one(W);
  EXPECT_TRUE(r.principal);
  EXPECT_LT((r.w * r.w.adjoint() - W).norm(), 1e-8);
}

TEST(RankOne, IdentityIsMaximallyNonRankOne) {
  const auto r = extract_rank_one(CMatrix::Identity(2, 2));
  EXPECT_NEAR(r.ratio, 1.0, 1e-12);
  EXPECT_FALSE(r.principal);

  Rng rng(5);
  const std::vector<CVector> h{CVector::Ones(2)};
  const auto rec = recover_beams({CMatrix::Identity(2, 2)}, h, DecodingIndicatorMatrix::identity(1), {1.0}, 0.0, rng);
  EXPECT_TRUE(rec.randomized);
  EXPECT_NEAR(rec.w[0].squaredNorm(), 2.0, 1e-9);
}

TEST(RankOne, SmallNoiseKeepsPrincipalPath) {
  Rng rng(11);
  std::normal_distribution<double> n01;
  CVector w(4);
  for (int i = 0; i < 4; ++i) w[i] = cplx(n01(rng), n01(rng));
  CMatrix N(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) N(a, b) = cplx(n01(rng), n01(rng));
  const CMatrix W = w * w.adjoint() + 1e-6 * (N * N.adjoint()) / N.squaredNorm();
  const auto r = extract_rank_one(W);
  EXPECT_LT(r.ratio, kRankOneTol);
  EXPECT_TRUE(r.principal);
  const std::vector<CVector> h{CVector::Ones(4)};
  const auto rec = recover_beams({W}, h, DecodingIndicatorMatrix::identity(1), {1.0}, 0.0, rng);
  EXPECT_FALSE(rec.randomized);
}

TEST(RankOne, RejectsNonHermitian) {
  CMatrix W = CMatrix::Identity(2, 2);
  W(0, 1) = cplx(0.5, 0.0);
  EXPECT_THROW(extract_rank_one(W), std::invalid_argument);
  EXPECT_THROW(extract_rank_one(CMatrix::Ones(2, 3)), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Position SOCP.

TEST(PositionProgram, SinglePathRateIgnoresPosition) {
  SystemConfig cfg;
  cfg.num_antennas = 1;
  cfg.num_users = 1;
  cfg.num_paths = 1;
  const auto real = sample_realization(cfg, 4);
  const auto pi = DecodingIndicatorMatrix::identity(1);
  for (const Point& u : {Point(0, 0), Point(0.12, -0.04)}) {
    const AntennaPositionVector apv({u});
    const auto h = channel_table(apv, real, cfg.wavelength);
    const auto w = equal_power_mrt(h, cfg.max_power);
    const double stage = sum_rate(h, w, pi, {cfg.noise_power});
    const auto pp = build_position_program(0, w, apv, real, pi, cfg, 0.0);
    const auto s = solve_conic(pp.problem);
    ASSERT_TRUE(residuals_ok(s));
    EXPECT_NEAR(s.objective, stage, 1e-6 * stage);
  }
}

TEST(PositionProgram, MonotoneAndSpacingFeasible) {
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    SystemConfig cfg;
    cfg.num_users = 3;
    const auto real = sample_realization(cfg, seed);
    Rng rng(seed);
    const auto apv = initial_positions(cfg, rng);
    const auto h = channel_table(apv, real, cfg.wavelength);
    const auto w = equal_power_mrt(h, cfg.max_power);
    const auto pi = seed % 2 ? DecodingIndicatorMatrix::full(3) : DecodingIndicatorMatrix::identity(3);
    const double anchor = sum_rate(h, w, pi, std::vector<double>(3, cfg.noise_power));
    const int m = static_cast<int>(seed % 4);
    const auto pp = build_position_program(m, w, apv, real, pi, cfg, 0.0);
    const auto s = solve_conic(pp.problem);
    ASSERT_TRUE(residuals_ok(s)) << "seed " << seed;
    EXPECT_GE(s.objective, anchor - 1e-6 * std::max(1.0, anchor)) << "seed " << seed;
    const Point u = pp.position(s);
    EXPECT_TRUE(AntennaPositionVector({u}).in_region(cfg.region_side, 1e-7));
    for (int n = 0; n < apv.size(); ++n) {
      if (n == m) continue;
      const Point d0 = apv[m] - apv[n];
      const double lb = d0.squaredNorm() + 2.0 * d0.dot(u - apv[m]);
      const double D2 = cfg.min_spacing * cfg.min_spacing;
      EXPECT_GE(lb, D2 - 1e-7 * cfg.wavelength * cfg.wavelength) << "seed " << seed << " n " << n;
    }
  }
}

}  // namespace
}  // namespace manoma
