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

// Stage one: maximize the overall channel gain sum_k ||h_k||^2 by sweeping the
// antennas one at a time, then order users by their resulting gains.

#ifndef MANOMA_STAGE_ONE_HPP
#define MANOMA_STAGE_ONE_HPP

#include "manoma/channel.hpp"
#include "manoma/frcalc.hpp"
#include "manoma/problems.hpp"
#include "manoma/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

namespace manoma {

/// Feasible starting positions: uniform draws in the region, redrawing any
/// point too close to an accepted one, at most `max_attempts` draws in total.
/// Falls back to the first M points of a centered half-wavelength grid.
inline AntennaPositionVector initial_positions(const SystemConfig& cfg, Rng& rng, int max_attempts = 10000) {
  const double half = cfg.region_side / 2.0;
  std::uniform_real_distribution<double> coord(-half, half);
  std::vector<Point> pts;
  int attempts = 0;
  while (static_cast<int>(pts.size()) < cfg.num_antennas && attempts < max_attempts) {
    ++attempts;
    const double x = coord(rng);
    const double y = coord(rng);
    const Point p(x, y);
    const bool ok = std::all_of(pts.begin(), pts.end(),
                                [&](const Point& o) { return (o - p).norm() >= cfg.min_spacing; });
    if (ok) pts.push_back(p);
  }
  if (static_cast<int>(pts.size()) == cfg.num_antennas) return AntennaPositionVector(std::move(pts));

  const double step = std::max(cfg.wavelength / 2.0, cfg.min_spacing);
  const int per_side = static_cast<int>(std::floor(cfg.region_side / step + 1e-9)) + 1;
  const double origin = -(per_side - 1) * step / 2.0;
  pts.clear();
  for (int r = 0; r < per_side && static_cast<int>(pts.size()) < cfg.num_antennas; ++r)
    for (int c = 0; c < per_side && static_cast<int>(pts.size()) < cfg.num_antennas; ++c)
      pts.emplace_back(origin + c * step, origin + r * step);
  if (static_cast<int>(pts.size()) < cfg.num_antennas)
    throw ConfigError("num_antennas: cannot place antennas with the requested spacing");
  return AntennaPositionVector(std::move(pts));
}

inline double total_channel_gain(const AntennaPositionVector& apv, const ChannelRealization& real,
                                 double wavelength) {
  double g = 0.0;
  for (const auto& u : real.users) g += channel_gain(apv, u, wavelength);
  return g;
}

/// Moves a point that violates the spacing constraint by at most `tol` onto the
/// constraint boundary and back into the region. Returns false when a larger
/// violation remains.
inline bool snap_spacing(AntennaPositionVector& apv, int m, double side, double spacing, double tol = 1e-6) {
  const double half = side / 2.0;
  auto& u = apv[m];
  u.x() = std::clamp(u.x(), -half, half);
  u.y() = std::clamp(u.y(), -half, half);
  for (int pass = 0; pass < 3; ++pass) {
    bool moved = false;
    for (int n = 0; n < apv.size(); ++n) {
      if (n == m) continue;
      const Point diff = u - apv[n];
      const double dist = diff.norm();
      if (dist >= spacing) continue;
      if (spacing - dist > tol || dist == 0.0) return false;
      u = apv[n] + diff * (spacing * (1.0 + 1e-12) / dist);
      u.x() = std::clamp(u.x(), -half, half);
      u.y() = std::clamp(u.y(), -half, half);
      moved = true;
    }
    if (!moved) break;
  }
  return apv.feasible(side, spacing, 0.0);
}

struct StageOneOptions {
  bool use_conic = false;  // solve the gain QP with the conic solver instead of the exact projection
  CurvatureRule curvature = CurvatureRule::Global;
  ConicOptions conic;
};

struct StageOneResult {
  AntennaPositionVector apv;
  std::vector<double> trace;  // overall gain, initial value first, then once per sweep
  int sweeps = 0;
  int reverts = 0;
};

inline StageOneResult optimize_positions_for_gain(const ChannelRealization& real, const SystemConfig& cfg,
                                                  const AntennaPositionVector& init,
                                                  const StageOneOptions& opt = {}) {
  if (!init.feasible(cfg.region_side, cfg.min_spacing))
    throw std::invalid_argument("optimize_positions_for_gain: initial positions are infeasible");
  const PhiContext ctx(real, cfg.wavelength);
  StageOneResult res;
  res.apv = init;
  double total = 0.0;
  for (int m = 0; m < init.size(); ++m) total += phi_value(ctx, init[m]);
  res.trace.push_back(total);

  for (int sweep = 0; sweep < cfg.max_iter_stage_one; ++sweep) {
    for (int m = 0; m < res.apv.size(); ++m) {
      const auto data = gain_qp_data(m, ctx, res.apv, cfg, opt.curvature);
      Point cand = data.anchor;
      if (opt.use_conic) {
        const auto qp = build_gain_qp(data, cfg.wavelength);
        const auto sol = solve_conic(qp.problem, opt.conic);
        if (sol.optimal()) cand = qp.position(sol);
      } else {
        cand = solve_gain_qp_closed_form(data);
      }
      AntennaPositionVector next = res.apv;
      next[m] = cand;
      if (!snap_spacing(next, m, cfg.region_side, cfg.min_spacing) ||
          phi_value(ctx, next[m]) < data.value) {
        ++res.reverts;
        continue;
      }
      res.apv = next;
    }
    ++res.sweeps;
    double now = 0.0;
    for (int m = 0; m < res.apv.size(); ++m) now += phi_value(ctx, res.apv[m]);
    const double prev = res.trace.back();
    res.trace.push_back(now);
    if (prev <= 0.0 || (now - prev) / prev < cfg.eps_stage_one) break;
  }
  return res;
}

/// Users sorted by ascending channel gain; ties keep ascending user index.
/// Gains are compared after rounding to 40 mantissa bits, so gains that are
/// equal up to rounding in the channel evaluation count as ties.
inline DecodingOrder determine_order(const AntennaPositionVector& apv, const ChannelRealization& real,
                                     double wavelength) {
  std::vector<double> gains;
  for (const auto& u : real.users) {
    int e = 0;
    const double mant = std::frexp(channel_gain(apv, u, wavelength), &e);
    gains.push_back(std::ldexp(std::round(std::ldexp(mant, 40)), e - 40));
  }
  std::vector<int> z(gains.size());
  std::iota(z.begin(), z.end(), 0);
  std::stable_sort(z.begin(), z.end(), [&](int a, int b) {
    return gains[static_cast<std::size_t>(a)] < gains[static_cast<std::size_t>(b)];
  });
  return DecodingOrder(std::move(z));
}

}  // namespace manoma

#endif  // MANOMA_STAGE_ONE_HPP
