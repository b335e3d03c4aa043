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

// The two-stage loop: order users by stage-one channel gains, then alternate
// beamforming, per-antenna position and decoding-indicator updates. Every
// step is wrapped in a revert-on-decrease safeguard, so the sum-rate trace is
// monotone.

#ifndef MANOMA_ORCHESTRATOR_HPP
#define MANOMA_ORCHESTRATOR_HPP

#include "manoma/channel.hpp"
#include "manoma/conic.hpp"
#include "manoma/ga.hpp"
#include "manoma/problems.hpp"
#include "manoma/rates.hpp"
#include "manoma/stage_one.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace manoma {

enum class IndicatorSearch { Genetic, Exhaustive, Frozen };

struct RunOptions {
  /// Positions used as-is: no stage-one movement and no position steps.
  std::optional<AntennaPositionVector> fixed_positions;
  /// Positions to start stage one from instead of a random draw.
  std::optional<AntennaPositionVector> initial_positions;
  /// Skip stage-two position steps while still running stage one.
  bool optimize_positions = true;
  std::optional<DecodingOrder> fixed_order;
  /// Starting indicator, kept for the whole run when `indicator == Frozen`.
  /// Defaults to the identity (no cross decoding).
  std::optional<DecodingIndicatorMatrix> initial_indicator;
  IndicatorSearch indicator = IndicatorSearch::Genetic;
  bool tight_upsilon = false;
  CurvatureRule curvature = CurvatureRule::Global;
  int position_backtracks = 3;
  int randomization_candidates = 100;
  ConicOptions conic;
  std::string dump_dir;  // when set, every conic problem is written there
};

struct SolverStats {
  int sdp_solves = 0;
  int sdp_optimal = 0;
  int socp_solves = 0;
  int socp_optimal = 0;
  int conic_iterations = 0;
  int randomizations = 0;
  int beam_rejects = 0;
  int position_reverts = 0;
  int position_backtracks = 0;
  int indicator_accepts = 0;
  int anchor_clamps = 0;
  std::vector<double> rank_one_ratios;  // largest lambda2/lambda1 per optimal SDP solve
};

/// Snapshot of an accepted iterate.
struct Iterate {
  std::vector<CVector> beams;
  AntennaPositionVector apv;
  DecodingIndicatorMatrix pi;
  double sum_rate = 0.0;
};

struct RunReport {
  DecodingOrder order;
  std::vector<CVector> beams;  // in decoding order
  AntennaPositionVector apv;
  DecodingIndicatorMatrix pi;
  std::vector<double> rates;   // in decoding order
  double sum_rate = 0.0;
  double initial_sum_rate = 0.0;       // equal-power MRT start, before any solve
  std::vector<double> sum_rate_trace;  // stage two, one entry per outer iteration after the start
  std::vector<double> gain_trace;      // stage one
  std::vector<Iterate> iterates;
  int stage_one_sweeps = 0;
  int stage_two_iterations = 0;
  bool qos_met = false;
  bool excluded = false;
  std::string excluded_reason;
  SolverStats stats;
  double wall_clock_seconds = 0.0;
};

/// Tight slack anchors for the incumbent (alpha = sigma^2/Gamma, beta =
/// Upsilon/sigma^2 per active pair). `real` is indexed in decoding order.
inline SlackAnchors refresh_anchors(const std::vector<CVector>& w, const AntennaPositionVector& apv,
                                    const DecodingIndicatorMatrix& pi, const ChannelRealization& real,
                                    const SystemConfig& cfg, bool* clamped = nullptr) {
  const auto h = channel_table(apv, real, cfg.wavelength);
  return tight_anchors(received_power_table(h, w), pi,
                       std::vector<double>(static_cast<std::size_t>(pi.size()), cfg.noise_power), clamped);
}

/// Surrogate sum rate at the anchors: sum_k min_i theta(alpha_ki, beta_ki).
inline double anchor_sum_rate(const SlackAnchors& anchors, const DecodingIndicatorMatrix& pi) {
  double s = 0.0;
  for (int k = 0; k < pi.size(); ++k) {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& p : anchors.pairs)
      if (p.k == k) r = std::min(r, rate_surrogate_theta(p.alpha, p.beta, p.alpha, p.beta));
    s += r;
  }
  return s;
}

/// w_k = sqrt(P/K) h_k / ||h_k||.
inline std::vector<CVector> equal_power_mrt(const std::vector<CVector>& h, double max_power) {
  const double per = max_power / static_cast<double>(h.size());
  std::vector<CVector> w;
  for (const auto& hk : h) {
    const double n = hk.norm();
    w.push_back(n > 0.0 ? CVector(hk * (std::sqrt(per) / n)) : CVector(CVector::Zero(hk.size())));
  }
  return w;
}

namespace detail {

class StageTwo {
 public:
  StageTwo(const ChannelRealization& real, const SystemConfig& cfg, const GaConfig& ga, std::uint64_t seed,
           const RunOptions& opt, RunReport& rep)
      : real_(real),
        cfg_(cfg),
        ga_(ga),
        opt_(opt),
        rep_(rep),
        noise_(static_cast<std::size_t>(real.num_users()), cfg.noise_power),
        ga_rng_(derive_seed(seed, 102)),
        rand_rng_(derive_seed(seed, 103)) {}

  void run(AntennaPositionVector apv, DecodingIndicatorMatrix pi, bool move_positions) {
    apv_ = std::move(apv);
    pi_ = std::move(pi);
    beams_ = equal_power_mrt(channel_table(apv_, real_, cfg_.wavelength), cfg_.max_power);
    evaluate_current();
    rep_.initial_sum_rate = cur_;

    // Feasibility phase: relax the QoS level until a beamforming solve succeeds.
    if (cfg_.min_rate > 0.0 && viol_ > 0) {
      for (int attempt = 0; attempt < 3 && viol_ > 0; ++attempt) {
        bool solved = false;
        for (double level : {cfg_.min_rate, cfg_.min_rate / 2.0, 0.0}) {
          if (auto w = solve_beams(level)) {
            beams_ = std::move(*w);
            solved = true;
            break;
          }
        }
        if (!solved) {
          if (attempt == 0) {
            rep_.excluded = true;
            rep_.excluded_reason = "beamforming failed at every QoS level";
            finish();
            return;
          }
          break;
        }
        evaluate_current();
      }
    }
    rep_.sum_rate_trace.push_back(cur_);
    record();

    for (int t = 0; t < cfg_.max_iter_stage_two; ++t) {
      const double prev = cur_;
      step_beamforming();
      if (move_positions) step_positions();
      step_indicator();
      const bool converged = prev <= 0.0 || (cur_ - prev) / prev < cfg_.eps_stage_two;
      // The last position or indicator move leaves the beams tuned to the old problem.
      if (converged) step_beamforming();
      rep_.sum_rate_trace.push_back(cur_);
      ++rep_.stage_two_iterations;
      record();
      if (converged) break;
    }
    finish();
  }

 private:
  [[nodiscard]] std::pair<double, int> evaluate(const std::vector<CVector>& w, const AntennaPositionVector& apv,
                                                const DecodingIndicatorMatrix& pi) const {
    const auto h = channel_table(apv, real_, cfg_.wavelength);
    const auto r = achievable_rates(received_power_table(h, w), pi, noise_);
    double s = 0.0;
    for (double v : r) s += v;
    return {s, qos_violations(r, cfg_.min_rate)};
  }

  void evaluate_current() {
    const auto [s, v] = evaluate(beams_, apv_, pi_);
    cur_ = s;
    viol_ = v;
  }

  [[nodiscard]] double qos_level() const { return viol_ == 0 ? cfg_.min_rate : 0.0; }

  void dump(const ConicProblem& p, const char* kind) {
    if (opt_.dump_dir.empty()) return;
    std::filesystem::create_directories(opt_.dump_dir);
    const auto path = std::filesystem::path(opt_.dump_dir) /
                      ("conic_" + std::to_string(dump_seq_++) + "_" + kind + ".txt");
    std::ofstream os(path);
    p.dump(os);
  }

  std::optional<std::vector<CVector>> solve_beams(double level) {
    const auto h = channel_table(apv_, real_, cfg_.wavelength);
    bool clamped = false;
    const auto anchors = tight_anchors(received_power_table(h, beams_), pi_, noise_, &clamped);
    if (clamped) ++rep_.stats.anchor_clamps;
    const auto sdp = build_beamforming_sdp(h, pi_, anchors, noise_, cfg_.max_power, level);
    dump(sdp.problem, "sdp");
    const auto sol = solve_conic(sdp.problem, opt_.conic);
    ++rep_.stats.sdp_solves;
    rep_.stats.conic_iterations += sol.iterations;
    if (!sol.optimal()) return std::nullopt;
    ++rep_.stats.sdp_optimal;
    const auto rec = recover_beams(sdp.covariances(sol), h, pi_, noise_, cfg_.min_rate, rand_rng_,
                                   opt_.randomization_candidates);
    rep_.stats.rank_one_ratios.push_back(*std::max_element(rec.ratios.begin(), rec.ratios.end()));
    if (rec.randomized) ++rep_.stats.randomizations;
    auto w = rec.w;
    const double p = total_power(w);
    if (p > cfg_.max_power) {
      const double f = std::sqrt(cfg_.max_power / p);
      for (auto& v : w) v *= f;
    }
    return w;
  }

  void step_beamforming() {
    auto w = solve_beams(qos_level());
    if (!w) {
      ++rep_.stats.beam_rejects;
      return;
    }
    const auto [s, v] = evaluate(*w, apv_, pi_);
    if (s >= cur_ && v <= viol_) {
      beams_ = std::move(*w);
      cur_ = s;
      viol_ = v;
    } else {
      ++rep_.stats.beam_rejects;
    }
  }

  void step_positions() {
    for (int m = 0; m < apv_.size(); ++m) {
      const auto pp = build_position_program(m, beams_, apv_, real_, pi_, cfg_, qos_level(), opt_.tight_upsilon,
                                       opt_.curvature);
      dump(pp.problem, "socp");
      const auto sol = solve_conic(pp.problem, opt_.conic);
      ++rep_.stats.socp_solves;
      rep_.stats.conic_iterations += sol.iterations;
      if (!sol.optimal()) {
        ++rep_.stats.position_reverts;
        continue;
      }
      ++rep_.stats.socp_optimal;
      Point step = pp.position(sol) - apv_[m];
      bool accepted = false;
      for (int b = 0; b <= opt_.position_backtracks && !accepted; ++b) {
        if (b > 0) {
          ++rep_.stats.position_backtracks;
          step *= 0.5;
        }
        AntennaPositionVector trial = apv_;
        trial[m] = apv_[m] + step;
        if (!snap_spacing(trial, m, cfg_.region_side, cfg_.min_spacing)) continue;
        const auto [s, v] = evaluate(beams_, trial, pi_);
        if (s >= cur_ && v <= viol_) {
          apv_ = std::move(trial);
          cur_ = s;
          viol_ = v;
          accepted = true;
        }
      }
      if (!accepted) ++rep_.stats.position_reverts;
    }
  }

  void step_indicator() {
    if (opt_.indicator == IndicatorSearch::Frozen) return;
    const auto h = channel_table(apv_, real_, cfg_.wavelength);
    FitnessContext ctx{received_power_table(h, beams_), noise_, cfg_.min_rate, ga_.penalty};
    const auto res = opt_.indicator == IndicatorSearch::Genetic ? run_ga(ctx, ga_, ga_rng_) : exhaustive_indicator(ctx);
    const auto [s, v] = evaluate(beams_, apv_, res.best);
    if (s > cur_ && v <= viol_) {
      pi_ = res.best;
      cur_ = s;
      viol_ = v;
      ++rep_.stats.indicator_accepts;
    }
  }

  void record() { rep_.iterates.push_back({beams_, apv_, pi_, cur_}); }

  void finish() {
    rep_.beams = beams_;
    rep_.apv = apv_;
    rep_.pi = pi_;
    const auto h = channel_table(apv_, real_, cfg_.wavelength);
    rep_.rates = achievable_rates(received_power_table(h, beams_), pi_, noise_);
    rep_.sum_rate = 0.0;
    for (double r : rep_.rates) rep_.sum_rate += r;
    rep_.qos_met = qos_violations(rep_.rates, cfg_.min_rate) == 0;
  }

  const ChannelRealization& real_;
  const SystemConfig& cfg_;
  const GaConfig& ga_;
  const RunOptions& opt_;
  RunReport& rep_;
  std::vector<double> noise_;
  Rng ga_rng_;
  Rng rand_rng_;
  std::vector<CVector> beams_;
  AntennaPositionVector apv_;
  DecodingIndicatorMatrix pi_;
  double cur_ = 0.0;
  int viol_ = 0;
  int dump_seq_ = 0;
};

}  // namespace detail

/// Stage two only, from given positions and order. `real` is in original user
/// order; it is reindexed by `order` internally.
inline RunReport run_stage_two(const ChannelRealization& real, const AntennaPositionVector& apv,
                               const DecodingOrder& order, const SystemConfig& cfg, const GaConfig& ga,
                               std::uint64_t seed, const RunOptions& opt = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  RunReport rep;
  rep.order = order;
  const auto ordered = real.reordered(order.users);
  const int K = real.num_users();
  DecodingIndicatorMatrix pi = opt.initial_indicator.value_or(DecodingIndicatorMatrix::identity(K));
  detail::StageTwo s2(ordered, cfg, ga, seed, opt, rep);
  const bool move = opt.optimize_positions && !opt.fixed_positions.has_value();
  s2.run(apv, std::move(pi), move);
  rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

struct StageOneOutcome {
  AntennaPositionVector apv;
  DecodingOrder order;
  std::vector<double> gain_trace;
  int sweeps = 0;
};

/// Stage one, or just the ordering when positions are fixed.
inline StageOneOutcome run_stage_one(const ChannelRealization& real, const SystemConfig& cfg, std::uint64_t seed,
                                     const RunOptions& opt = {}) {
  StageOneOutcome out;
  if (opt.fixed_positions) {
    out.apv = *opt.fixed_positions;
    out.gain_trace.push_back(total_channel_gain(out.apv, real, cfg.wavelength));
  } else {
    Rng rng(derive_seed(seed, 101));
    const auto init = opt.initial_positions ? *opt.initial_positions : initial_positions(cfg, rng);
    StageOneOptions s1opt;
    s1opt.curvature = opt.curvature;
    s1opt.conic = opt.conic;
    auto s1 = optimize_positions_for_gain(real, cfg, init, s1opt);
    out.apv = std::move(s1.apv);
    out.gain_trace = std::move(s1.trace);
    out.sweeps = s1.sweeps;
  }
  out.order = opt.fixed_order ? *opt.fixed_order : determine_order(out.apv, real, cfg.wavelength);
  return out;
}

inline RunReport run_two_stage(const ChannelRealization& real, const SystemConfig& cfg, const GaConfig& ga,
                               std::uint64_t seed, const RunOptions& opt = {}) {
  cfg.validate();
  ga.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const auto s1 = run_stage_one(real, cfg, seed, opt);
  RunReport rep = run_stage_two(real, s1.apv, s1.order, cfg, ga, seed, opt);
  rep.gain_trace = s1.gain_trace;
  rep.stage_one_sweeps = s1.sweeps;
  rep.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

/// Checks power, region, spacing and indicator structure of one iterate.
inline bool iterate_feasible(const Iterate& it, const SystemConfig& cfg, std::string* why = nullptr) {
  auto fail = [&](const char* m) {
    if (why) *why = m;
    return false;
  };
  if (total_power(it.beams) > cfg.max_power * (1.0 + 1e-7)) return fail("power budget exceeded");
  if (!it.apv.in_region(cfg.region_side, 1e-12)) return fail("antenna outside the region");
  if (it.apv.size() > 1 && it.apv.min_pairwise_distance() < cfg.min_spacing * (1.0 - 1e-9))
    return fail("spacing violated");
  if (!it.pi.valid()) return fail("indicator matrix malformed");
  return true;
}

}  // namespace manoma

#endif  // MANOMA_ORCHESTRATOR_HPP
