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

// Baseline schemes and brute-force references: fixed-position arrays, SDMA,
// exhaustive and random decoding orders, exhaustive and fixed indicators.

#ifndef MANOMA_BENCHMARKS_HPP
#define MANOMA_BENCHMARKS_HPP

#include "manoma/channel.hpp"
#include "manoma/ga.hpp"
#include "manoma/orchestrator.hpp"
#include "manoma/rates.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace manoma {

/// Centered r x c uniform planar array at half-wavelength spacing, r <= c and
/// r * c = M with c - r minimal. Rows run along y.
inline AntennaPositionVector fpa_positions(const SystemConfig& cfg) {
  const int M = cfg.num_antennas;
  int r = static_cast<int>(std::floor(std::sqrt(static_cast<double>(M))));
  while (M % r != 0) --r;
  const int c = M / r;
  const double step = cfg.wavelength / 2.0;
  if (step < cfg.min_spacing * (1.0 - 1e-12))
    throw ConfigError("min_spacing: exceeds the half-wavelength spacing of the fixed-position array");
  if ((c - 1) * step > cfg.region_side * (1.0 + 1e-12))
    throw ConfigError("num_antennas: a " + std::to_string(r) + "x" + std::to_string(c) +
                      " half-wavelength array does not fit in the moving region");
  // Clamping only removes rounding when the array spans the region exactly.
  const double half = cfg.region_side / 2.0;
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(M));
  for (int a = 0; a < r; ++a)
    for (int b = 0; b < c; ++b)
      pts.emplace_back(std::clamp((b - (c - 1) / 2.0) * step, -half, half),
                       std::clamp((a - (r - 1) / 2.0) * step, -half, half));
  return AntennaPositionVector(std::move(pts));
}

enum class Scheme { NomaMa, NomaFpa, SdmaMa, SdmaFpa };

inline constexpr Scheme kAllSchemes[] = {Scheme::NomaMa, Scheme::NomaFpa, Scheme::SdmaMa, Scheme::SdmaFpa};

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::NomaMa: return "NOMA-MA";
    case Scheme::NomaFpa: return "NOMA-FPA";
    case Scheme::SdmaMa: return "SDMA-MA";
    case Scheme::SdmaFpa: return "SDMA-FPA";
  }
  return "unknown";
}

/// Accepts the display names and their lower-case forms.
inline std::optional<Scheme> parse_scheme(std::string_view name) {
  std::string low(name);
  std::transform(low.begin(), low.end(), low.begin(), [](unsigned char ch) { return std::tolower(ch); });
  for (Scheme s : kAllSchemes) {
    std::string n = to_string(s);
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (n == low) return s;
  }
  return std::nullopt;
}

inline bool is_sdma(Scheme s) { return s == Scheme::SdmaMa || s == Scheme::SdmaFpa; }
inline bool is_fpa(Scheme s) { return s == Scheme::NomaFpa || s == Scheme::SdmaFpa; }

/// Run options for a scheme on top of `base`.
inline RunOptions scheme_options(Scheme s, const SystemConfig& cfg, RunOptions base = {}) {
  if (is_fpa(s)) base.fixed_positions = fpa_positions(cfg);
  if (is_sdma(s)) {
    base.initial_indicator = DecodingIndicatorMatrix::identity(cfg.num_users);
    base.indicator = IndicatorSearch::Frozen;
  }
  return base;
}

inline RunReport run_scheme(Scheme s, const ChannelRealization& real, const SystemConfig& cfg, const GaConfig& ga,
                            std::uint64_t seed, const RunOptions& base = {}) {
  return run_two_stage(real, cfg, ga, seed, scheme_options(s, cfg, base));
}

inline constexpr int kMaxExhaustiveOrderUsers = 5;

struct OrderSearchResult {
  DecodingOrder best_order;
  RunReport best;
  std::vector<DecodingOrder> orders;  // lexicographic
  std::vector<double> sum_rates;      // NaN for excluded runs
};

/// Stage two for every one of the K! decoding orders from the same stage-one
/// positions and seed; keeps the best.
inline OrderSearchResult exhaustive_order(const ChannelRealization& real, const SystemConfig& cfg,
                                          const GaConfig& ga, std::uint64_t seed, const RunOptions& opt = {}) {
  const int K = real.num_users();
  if (K > kMaxExhaustiveOrderUsers)
    throw std::invalid_argument("exhaustive_order: K = " + std::to_string(K) + " exceeds the cap of " +
                                std::to_string(kMaxExhaustiveOrderUsers) + " users");
  cfg.validate();
  ga.validate();
  const auto s1 = run_stage_one(real, cfg, seed, opt);
  OrderSearchResult res;
  std::vector<int> z(static_cast<std::size_t>(K));
  std::iota(z.begin(), z.end(), 0);
  bool have = false;
  do {
    DecodingOrder order(z);
    auto rep = run_stage_two(real, s1.apv, order, cfg, ga, seed, opt);
    rep.gain_trace = s1.gain_trace;
    rep.stage_one_sweeps = s1.sweeps;
    res.orders.push_back(order);
    res.sum_rates.push_back(rep.excluded ? std::numeric_limits<double>::quiet_NaN() : rep.sum_rate);
    if (!rep.excluded && (!have || rep.sum_rate > res.best.sum_rate)) {
      res.best = std::move(rep);
      res.best_order = order;
      have = true;
    }
  } while (std::next_permutation(z.begin(), z.end()));
  if (!have) {
    res.best.excluded = true;
    res.best.excluded_reason = "every decoding order was excluded";
  }
  return res;
}

/// Stage one as usual, then a decoding order drawn uniformly from all K!.
inline RunReport random_order_run(const ChannelRealization& real, const SystemConfig& cfg, const GaConfig& ga,
                                  std::uint64_t seed, const RunOptions& opt = {}) {
  cfg.validate();
  ga.validate();
  const auto s1 = run_stage_one(real, cfg, seed, opt);
  std::vector<int> z(static_cast<std::size_t>(real.num_users()));
  std::iota(z.begin(), z.end(), 0);
  Rng rng(derive_seed(seed, 104));
  std::shuffle(z.begin(), z.end(), rng);
  auto rep = run_stage_two(real, s1.apv, DecodingOrder(std::move(z)), cfg, ga, seed, opt);
  rep.gain_trace = s1.gain_trace;
  rep.stage_one_sweeps = s1.sweeps;
  return rep;
}

/// Conventional NOMA: all-ones indicator frozen and no rate floor.
inline RunReport fixed_indicator_run(const ChannelRealization& real, SystemConfig cfg, const GaConfig& ga,
                                     std::uint64_t seed, RunOptions opt = {}) {
  cfg.min_rate = 0.0;
  opt.initial_indicator = DecodingIndicatorMatrix::full(real.num_users());
  opt.indicator = IndicatorSearch::Frozen;
  return run_two_stage(real, cfg, ga, seed, opt);
}

/// Adaptive-indicator runs with the GA replaced by full enumeration.
inline RunReport exhaustive_indicator_run(const ChannelRealization& real, const SystemConfig& cfg,
                                          const GaConfig& ga, std::uint64_t seed, RunOptions opt = {}) {
  opt.indicator = IndicatorSearch::Exhaustive;
  return run_two_stage(real, cfg, ga, seed, opt);
}

/// Best indicator at fixed beams and positions. `real` and `w` are in decoding
/// order.
inline GaResult exhaustive_indicator(const std::vector<CVector>& w, const AntennaPositionVector& apv,
                                     const ChannelRealization& real, const SystemConfig& cfg,
                                     double penalty = GaConfig{}.penalty) {
  const auto h = channel_table(apv, real, cfg.wavelength);
  FitnessContext ctx{received_power_table(h, w),
                     std::vector<double>(static_cast<std::size_t>(real.num_users()), cfg.noise_power),
                     cfg.min_rate, penalty};
  return exhaustive_indicator(ctx);
}

}  // namespace manoma

#endif  // MANOMA_BENCHMARKS_HPP
