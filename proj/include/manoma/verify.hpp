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

// Self-check suites: finite-difference calculus, curvature dominance,
// surrogate one-sidedness, solver oracles, structural invariants and small
// end-to-end closed forms. Each check names its module, operation and the
// seed of the first failing instance.

#ifndef MANOMA_VERIFY_HPP
#define MANOMA_VERIFY_HPP

#include "manoma/benchmarks.hpp"
#include "manoma/channel.hpp"
#include "manoma/conic.hpp"
#include "manoma/frcalc.hpp"
#include "manoma/ga.hpp"
#include "manoma/orchestrator.hpp"
#include "manoma/problems.hpp"
#include "manoma/rates.hpp"
#include "manoma/stage_one.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace manoma {

struct CheckResult {
  std::string module;
  std::string operation;
  bool passed = true;
  std::string detail;
  std::uint64_t seed = 0;  // first failing instance, or the suite seed
};

/// Fault injection for mutation tests of the suites themselves.
struct VerifyHooks {
  std::function<Point(const PhiContext&, const Point&)> phi_grad;
  std::function<void(DecodingIndicatorMatrix&)> corrupt_indicator;
};

struct VerifyOptions {
  std::uint64_t seed = 20260101;
  int instances = 100;
  int points = 1000;  // sample points per surrogate instance
  double grad_tol = 1e-5;
  double hess_tol = 1e-4;
  VerifyHooks hooks;
};

namespace verify {

// Accumulates one check over many instances.
class Tally {
 public:
  Tally(std::string module, std::string operation, std::uint64_t seed)
      : module_(std::move(module)), operation_(std::move(operation)), seed_(seed) {}

  void add(bool ok, double metric, std::uint64_t seed, const std::string& what = {}) {
    ++count_;
    if (std::isfinite(metric)) worst_ = std::max(worst_, metric);
    if (!ok) {
      if (failed_ == 0) {
        first_seed_ = seed;
        first_ = what;
      }
      ++failed_;
    }
  }

  [[nodiscard]] CheckResult finish(const std::string& metric_name = "max error") const {
    std::ostringstream os;
    os << std::setprecision(3);
    if (failed_ == 0)
      os << count_ << " cases, " << metric_name << " " << worst_;
    else
      os << failed_ << "/" << count_ << " cases failed, " << metric_name << " " << worst_
         << (first_.empty() ? "" : "; first: " + first_);
    return {module_, operation_, failed_ == 0 && count_ > 0, os.str(), failed_ ? first_seed_ : seed_};
  }

 private:
  std::string module_, operation_;
  std::uint64_t seed_;
  int count_ = 0, failed_ = 0;
  double worst_ = 0.0;
  std::uint64_t first_seed_ = 0;
  std::string first_;
};

inline std::string describe(double got, double want) {
  std::ostringstream os;
  os << std::setprecision(10) << "got " << got << ", expected " << want;
  return os.str();
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

template <class F>
Point fd_gradient(F&& f, const Point& u, double h) {
  const Point ex(h, 0.0), ey(0.0, h);
  return {(f(u + ex) - f(u - ex)) / (2 * h), (f(u + ey) - f(u - ey)) / (2 * h)};
}

// Second differences of values.
template <class F>
Hessian2 fd_hessian(F&& f, const Point& u, double h) {
  const Point ex(h, 0.0), ey(0.0, h);
  const double f0 = f(u);
  Hessian2 H;
  H(0, 0) = (f(u + ex) - 2 * f0 + f(u - ex)) / (h * h);
  H(1, 1) = (f(u + ey) - 2 * f0 + f(u - ey)) / (h * h);
  H(0, 1) = H(1, 0) = (f(u + ex + ey) - f(u + ex - ey) - f(u - ex + ey) + f(u - ex - ey)) / (4 * h * h);
  return H;
}

inline double lambda_max(const Hessian2& H) {
  const double tr = 0.5 * (H(0, 0) + H(1, 1));
  const double d = 0.5 * (H(0, 0) - H(1, 1));
  return tr + std::sqrt(d * d + H(0, 1) * H(1, 0));
}

/// Random small instance: 1-4 antennas anywhere in the region, 1-4 users,
/// 2-5 paths, random beams at full power and a random indicator.
struct Instance {
  SystemConfig cfg;
  ChannelRealization real;
  AntennaPositionVector apv;
  std::vector<CVector> w;
  DecodingIndicatorMatrix pi;
};

inline Point random_point(const SystemConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> c(-cfg.region_side / 2, cfg.region_side / 2);
  const double x = c(rng);
  return {x, c(rng)};
}

inline Instance random_instance(std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_int_distribution<int> mk(1, 4), paths(2, 5);
  Instance in;
  in.cfg.num_antennas = mk(rng);
  in.cfg.num_users = mk(rng);
  in.cfg.num_paths = paths(rng);
  in.real = sample_realization(in.cfg, derive_seed(seed, 1));
  std::vector<Point> pts;
  for (int m = 0; m < in.cfg.num_antennas; ++m) pts.push_back(random_point(in.cfg, rng));
  in.apv = AntennaPositionVector(std::move(pts));
  std::normal_distribution<double> n01;
  double total = 0.0;
  for (int k = 0; k < in.cfg.num_users; ++k) {
    CVector v(in.cfg.num_antennas);
    for (int m = 0; m < in.cfg.num_antennas; ++m) v[m] = cplx(n01(rng), n01(rng));
    total += v.squaredNorm();
    in.w.push_back(v);
  }
  for (auto& v : in.w) v *= std::sqrt(in.cfg.max_power / total);
  in.pi = DecodingIndicatorMatrix::identity(in.cfg.num_users);
  std::bernoulli_distribution bit(0.5);
  for (int k = 0; k < in.cfg.num_users; ++k)
    for (int i = k + 1; i < in.cfg.num_users; ++i) in.pi.set(k, i, bit(rng));
  return in;
}

// |h_i^H w_k|^2 at antenna m moved to u.
inline double gamma_oracle(const Instance& in, int k, int i, int m, const Point& u) {
  auto apv = in.apv;
  apv[m] = u;
  const auto h = channel_vector(apv, in.real.users[static_cast<std::size_t>(i)], in.cfg.wavelength);
  return std::norm(h.dot(in.w[static_cast<std::size_t>(k)]));
}

inline double phi_oracle(const Instance& in, const Point& u) {
  double s = 0.0;
  for (const auto& user : in.real.users) s += std::norm(frv(u, user, in.cfg.wavelength).dot(user.path_response));
  return s;
}

inline double rel(double err, double scale) { return err / std::max(scale, 1e-300); }

}  // namespace verify

// ---------------------------------------------------------------------------

inline std::vector<CheckResult> verify_channel(const VerifyOptions& opt) {
  using verify::Tally;
  Tally t_pd("channel", "path_difference", opt.seed), t_frv("channel", "frv", opt.seed),
      t_h("channel", "channel_vector", opt.seed), t_g("channel", "channel_gain", opt.seed),
      t_s("channel", "sample_realization", opt.seed);

  const double pi = std::numbers::pi;
  t_pd.add(path_difference(Point(0, 0), 1.3, 0.4) == 0.0, 0.0, opt.seed, "origin");
  const double e1 = std::abs(path_difference(Point(1, 0), pi / 2, 0.0) - 1.0);
  t_pd.add(e1 < 1e-15, e1, opt.seed, "u=(1,0)");
  const double e2 = std::abs(path_difference(Point(0.3, -0.2), 1.1, 0.7) -
                             (0.3 * std::sin(1.1) * std::cos(0.7) - 0.2 * std::cos(1.1)));
  t_pd.add(e2 < 1e-15, e2, opt.seed, "direct formula");

  for (int n = 0; n < opt.instances; ++n) {
    const auto seed = derive_seed(opt.seed, static_cast<std::uint64_t>(n));
    const auto in = verify::random_instance(seed);
    const double wl = in.cfg.wavelength;
    for (const auto& user : in.real.users) {
      const Point u = in.apv[0];
      const auto g = frv(u, user, wl);
      double err = 0.0;
      for (int l = 0; l < user.num_paths(); ++l) {
        const double ph = kTwoPi / wl * path_difference(u, user.elevation[l], user.azimuth[l]);
        err = std::max(err, std::abs(g[l] - std::polar(1.0, ph)));
        err = std::max(err, std::abs(std::abs(g[l]) - 1.0));
      }
      t_frv.add(err < 1e-12, err, seed);

      CMatrix G(user.num_paths(), in.apv.size());
      for (int m = 0; m < in.apv.size(); ++m) G.col(m) = frv(in.apv[m], user, wl);
      const CVector want = G.adjoint() * user.path_response;
      const CVector h = channel_vector(in.apv, user, wl);
      const double eh = verify::rel((h - want).norm(), want.norm());
      t_h.add(eh < 1e-12, eh, seed);
      const double eg = verify::rel(std::abs(channel_gain(in.apv, user, wl) - want.squaredNorm()), want.squaredNorm());
      t_g.add(eg < 1e-12, eg, seed);
    }
  }
  {
    SystemConfig cfg;
    cfg.num_paths = 1;
    const auto real = sample_realization(cfg, opt.seed);
    const auto apv = AntennaPositionVector({Point(0.01, -0.1), Point(0.12, 0.03), Point(-0.1, 0.1), Point(0, 0)});
    for (const auto& user : real.users) {
      const double want = 4.0 * std::norm(user.path_response[0]);
      const double e = verify::rel(std::abs(channel_gain(apv, user, cfg.wavelength) - want), want);
      t_g.add(e < 1e-12, e, opt.seed, "single path");
    }
  }
  {
    SystemConfig cfg;
    const auto a = sample_realization(cfg, opt.seed);
    const auto b = sample_realization(cfg, opt.seed);
    bool same = true, ranges = true;
    for (int k = 0; k < cfg.num_users; ++k) {
      const auto& ua = a.users[static_cast<std::size_t>(k)];
      const auto& ub = b.users[static_cast<std::size_t>(k)];
      same = same && ua.elevation == ub.elevation && ua.azimuth == ub.azimuth &&
             ua.path_response == ub.path_response && ua.distance == ub.distance;
      ranges = ranges && ua.elevation.minCoeff() >= 0 && ua.elevation.maxCoeff() <= std::numbers::pi &&
               ua.azimuth.minCoeff() >= 0 && ua.azimuth.maxCoeff() <= std::numbers::pi &&
               ua.distance >= cfg.distance_min && ua.distance <= cfg.distance_max;
    }
    t_s.add(same, 0.0, opt.seed, "repeat draw differs");
    t_s.add(ranges, 0.0, opt.seed, "angle or distance out of range");
  }
  return {t_pd.finish(), t_frv.finish(), t_h.finish("max rel error"), t_g.finish("max rel error"),
          t_s.finish()};
}

/// Closed-form gradients against central differences (step 1e-6 lambda) and
/// Hessians against second differences of the value (step 1e-4 lambda). Errors
/// are max-entry errors relative to the largest entry of the oracle.
inline std::vector<CheckResult> verify_calculus(const VerifyOptions& opt) {
  using verify::Tally;
  Tally t_pv("frcalc", "phi_value", opt.seed), t_pg("frcalc", "phi_grad", opt.seed),
      t_ph("frcalc", "phi_hess", opt.seed), t_gv("frcalc", "gamma_value", opt.seed),
      t_gg("frcalc", "gamma_grad", opt.seed), t_gh("frcalc", "gamma_hess", opt.seed),
      t_ug("frcalc", "upsilon_grad", opt.seed), t_uh("frcalc", "upsilon_hess", opt.seed);

  auto grad_err = [](const Point& got, const Point& want, double floor) {
    return verify::rel((got - want).cwiseAbs().maxCoeff(), std::max(want.cwiseAbs().maxCoeff(), floor));
  };
  auto hess_err = [](const Hessian2& got, const Hessian2& want, double floor) {
    return verify::rel(verify::max_abs(got - want), std::max(verify::max_abs(want), floor));
  };

  for (int n = 0; n < opt.instances; ++n) {
    const auto seed = derive_seed(opt.seed, static_cast<std::uint64_t>(n));
    const auto in = verify::random_instance(seed);
    Rng rng(derive_seed(seed, 2));
    const double wl = in.cfg.wavelength;
    const double kap = kTwoPi / wl;
    const double hg = 1e-6 * wl, hh = 1e-4 * wl;
    const Point u = verify::random_point(in.cfg, rng);

    const PhiContext pctx(in.real, wl);
    auto phi = [&](const Point& p) { return phi_value(pctx, p); };
    const double pv = phi(u), pw = verify::phi_oracle(in, u);
    const double ev = verify::rel(std::abs(pv - pw), pw);
    t_pv.add(ev < 1e-10, ev, seed, verify::describe(pv, pw));
    const Point pg = opt.hooks.phi_grad ? opt.hooks.phi_grad(pctx, u) : phi_grad(pctx, u);
    const double eg = grad_err(pg, verify::fd_gradient(phi, u, hg), 1e-6 * kap * pv);
    t_pg.add(eg < opt.grad_tol, eg, seed);
    const double eh = hess_err(phi_hess(pctx, u), verify::fd_hessian(phi, u, hh), 1e-6 * kap * kap * pv);
    t_ph.add(eh < opt.hess_tol, eh, seed);

    const int K = in.cfg.num_users;
    std::uniform_int_distribution<int> uk(0, K - 1), um(0, in.cfg.num_antennas - 1);
    const int k = uk(rng), i = uk(rng), m = um(rng);
    const auto gctx = build_gamma_context(in.w, in.apv, in.real, wl, m, k, i);
    auto gam = [&](const Point& p) { return gamma_value(gctx, p); };
    const double gv = gam(u), gw = verify::gamma_oracle(in, k, i, m, u);
    const double egv = verify::rel(std::abs(gv - gw), gw);
    t_gv.add(egv < 1e-10 && gv >= 0.0, egv, seed, verify::describe(gv, gw));
    const double egg = grad_err(gamma_grad(gctx, u), verify::fd_gradient(gam, u, hg), 1e-6 * kap * gv);
    t_gg.add(egg < opt.grad_tol, egg, seed);
    const double egh = hess_err(gamma_hess(gctx, u), verify::fd_hessian(gam, u, hh), 1e-6 * kap * kap * gv);
    t_gh.add(egh < opt.hess_tol, egh, seed);

    const auto cols = gamma_contexts(in.w, in.apv, in.real, wl, m);
    const auto& col = cols[static_cast<std::size_t>(i)];
    const int kk = std::min(k, i);
    auto ups = [&](const Point& p) { return upsilon_value(col, in.pi, kk, i, 0.0, p); };
    const double uv = ups(u);
    const double eug = grad_err(upsilon_grad(col, in.pi, kk, i, u), verify::fd_gradient(ups, u, hg), 1e-6 * kap * uv);
    t_ug.add(eug < opt.grad_tol, eug, seed);
    const double euh =
        hess_err(upsilon_hess(col, in.pi, kk, i, u), verify::fd_hessian(ups, u, hh), 1e-6 * kap * kap * uv);
    t_uh.add(euh < opt.hess_tol, euh, seed);
  }
  return {t_pv.finish("max rel error"), t_pg.finish("max rel error"), t_ph.finish("max rel error"),
          t_gv.finish("max rel error"), t_gg.finish("max rel error"), t_gh.finish("max rel error"),
          t_ug.finish("max rel error"), t_uh.finish("max rel error")};
}

/// Curvature bounds against the largest Hessian eigenvalue: the
/// position-independent bounds at `opt.points / 100` random points per
/// instance, the anchor Frobenius bounds at the anchor. psi is compared with
/// the eigenvalue of a second-difference Hessian of Upsilon.
inline std::vector<CheckResult> verify_curvature(const VerifyOptions& opt) {
  using verify::Tally;
  Tally t_d("frcalc", "phi_curvature", opt.seed), t_g("frcalc", "gamma_curvature", opt.seed),
      t_p("frcalc", "upsilon_curvature", opt.seed);
  const int pts = std::max(1, opt.points / 100);
  for (int n = 0; n < opt.instances; ++n) {
    const auto seed = derive_seed(opt.seed, static_cast<std::uint64_t>(n));
    const auto in = verify::random_instance(seed);
    Rng rng(derive_seed(seed, 3));
    const double wl = in.cfg.wavelength;
    const PhiContext pctx(in.real, wl);
    const double delta = phi_curvature_global(pctx);
    std::uniform_int_distribution<int> uk(0, in.cfg.num_users - 1), um(0, in.cfg.num_antennas - 1);
    const int k = uk(rng), i = uk(rng), m = um(rng);
    const auto cols = gamma_contexts(in.w, in.apv, in.real, wl, m);
    const auto& col = cols[static_cast<std::size_t>(i)];
    const auto& gctx = col[static_cast<std::size_t>(k)];
    const double gamma = gamma_curvature_global(gctx);
    const int kk = std::min(k, i);
    std::vector<double> gb;
    for (const auto& c : col) gb.push_back(gamma_curvature_global(c));
    const double psi = upsilon_curvature(gb, in.pi, kk, i);
    auto ups = [&](const Point& p) { return upsilon_value(col, in.pi, kk, i, 0.0, p); };

    for (int p = 0; p < pts; ++p) {
      const Point u = verify::random_point(in.cfg, rng);
      const auto Hp = phi_hess(pctx, u);
      const double lp = verify::lambda_max(Hp);
      t_d.add(delta >= lp * (1 - 1e-12) && phi_curvature_bound(pctx, u) >= lp * (1 - 1e-12),
              lp / std::max(delta, 1e-300), seed, verify::describe(delta, lp));
      const auto Hg = gamma_hess(gctx, u);
      const double lg = verify::lambda_max(Hg);
      t_g.add(gamma >= lg * (1 - 1e-12) && gamma_curvature_bound(gctx, u) >= lg * (1 - 1e-12),
              lg / std::max(gamma, 1e-300), seed, verify::describe(gamma, lg));
      const auto Hu = verify::fd_hessian(ups, u, 1e-4 * wl);
      const double lu = verify::lambda_max(Hu);
      const double slack = 1e-6 * verify::max_abs(Hu);
      t_p.add(psi >= lu - slack, lu / std::max(psi, 1e-300), seed, verify::describe(psi, lu));
    }
  }
  return {t_d.finish("max lambda/bound"), t_g.finish("max lambda/bound"), t_p.finish("max lambda/bound")};
}

/// Surrogates at `opt.points` uniform points of the region per instance, with
/// the anchor drawn from the region too. One-sidedness is checked to 1e-9
/// relative to the function scale, anchoring to 1e-9 relative.
inline std::vector<CheckResult> verify_surrogates(const VerifyOptions& opt,
                                                  CurvatureRule rule = CurvatureRule::Global) {
  using verify::Tally;
  Tally t_p("frcalc", "surrogate_phi_lb", opt.seed), t_g("frcalc", "surrogate_gamma_lb", opt.seed),
      t_u("frcalc", "surrogate_upsilon_ub", opt.seed), t_d("frcalc", "surrogate_distance_lb", opt.seed),
      t_t("frcalc", "rate_surrogate_theta", opt.seed);
  const double tol = 1e-9;

  for (int n = 0; n < opt.instances; ++n) {
    const auto seed = derive_seed(opt.seed, static_cast<std::uint64_t>(n));
    const auto in = verify::random_instance(seed);
    Rng rng(derive_seed(seed, 4));
    const double wl = in.cfg.wavelength;
    const PhiContext pctx(in.real, wl);
    std::uniform_int_distribution<int> uk(0, in.cfg.num_users - 1), um(0, in.cfg.num_antennas - 1);
    const int k = uk(rng), i = uk(rng), m = um(rng);
    const auto cols = gamma_contexts(in.w, in.apv, in.real, wl, m);
    const auto& col = cols[static_cast<std::size_t>(i)];
    const auto& gctx = col[static_cast<std::size_t>(k)];
    const int kk = std::min(k, i);
    const double noise = in.cfg.noise_power;

    const Point a = verify::random_point(in.cfg, rng);
    const Point other = verify::random_point(in.cfg, rng);
    const auto sp = surrogate_phi_lb(pctx, a, rule);
    const auto sg = surrogate_gamma_lb(gctx, a, rule);
    const auto su = surrogate_upsilon_ub(col, in.pi, kk, i, noise, a, rule);
    const auto sd = surrogate_distance_lb(a, other);

    const double p0 = phi_value(pctx, a), g0 = gamma_value(gctx, a);
    const double u0 = upsilon_value(col, in.pi, kk, i, noise, a), d0 = (a - other).squaredNorm();
    const double ep = std::abs(sp(a) - p0), eg = std::abs(sg(a) - g0), eu = std::abs(su(a) - u0),
                 ed = std::abs(sd(a) - d0);
    t_p.add(ep <= tol * p0, verify::rel(ep, p0), seed, "anchor " + verify::describe(sp(a), p0));
    t_g.add(eg <= tol * std::max(g0, 1e-300), verify::rel(eg, g0), seed, "anchor " + verify::describe(sg(a), g0));
    t_u.add(eu <= tol * u0, verify::rel(eu, u0), seed, "anchor " + verify::describe(su(a), u0));
    t_d.add(ed <= tol * std::max(d0, 1e-300), verify::rel(ed, d0), seed, "anchor");

    // Scales for the relative one-sided tolerance.
    const double ps = std::max(p0, 1e-300), gs = std::max(sg.value + sg.gradient.norm() * in.cfg.region_side, 1e-300);
    double worst_p = -1e300, worst_g = -1e300, worst_u = -1e300, worst_d = -1e300;
    for (int q = 0; q < opt.points; ++q) {
      const Point u = verify::random_point(in.cfg, rng);
      worst_p = std::max(worst_p, (sp(u) - phi_value(pctx, u)) / ps);
      worst_g = std::max(worst_g, (sg(u) - gamma_value(gctx, u)) / gs);
      worst_u = std::max(worst_u, (upsilon_value(col, in.pi, kk, i, noise, u) - su(u)) / u0);
      worst_d = std::max(worst_d, (sd(u) - (u - other).squaredNorm()) / std::max(d0, in.cfg.region_side * in.cfg.region_side));
    }
    t_p.add(worst_p <= tol, std::max(0.0, worst_p), seed, "surrogate above Phi");
    t_g.add(worst_g <= tol, std::max(0.0, worst_g), seed, "surrogate above Gamma");
    t_u.add(worst_u <= tol, std::max(0.0, worst_u), seed, "surrogate below Upsilon");
    t_d.add(worst_d <= tol, std::max(0.0, worst_d), seed, "surrogate above distance");

    // theta: anchors log-uniform over six decades, points within +-2 decades.
    std::uniform_real_distribution<double> dec(-3.0, 3.0), jit(-2.0, 2.0);
    const double at = std::pow(10.0, dec(rng)), bt = std::pow(10.0, dec(rng));
    const double t0 = rate_surrogate_theta(at, bt, at, bt), tw = std::log2(1.0 + 1.0 / (at * bt));
    t_t.add(std::abs(t0 - tw) <= tol * std::max(1.0, tw), std::abs(t0 - tw), seed, "anchor");
    double worst_t = -1e300;
    for (int q = 0; q < opt.points; ++q) {
      const double al = at * std::pow(10.0, jit(rng)), be = bt * std::pow(10.0, jit(rng));
      const double tv = std::log2(1.0 + 1.0 / (al * be));
      worst_t = std::max(worst_t, (rate_surrogate_theta(al, be, at, bt) - tv) / std::max(1.0, std::abs(tv)));
    }
    t_t.add(worst_t <= tol, std::max(0.0, worst_t), seed, "theta above the rate");
  }
  {
    const double got = rate_surrogate_theta(2.0, 1.0, 1.0, 1.0);
    const double want = 1.0 - std::numbers::log2e / 2.0;
    t_t.add(std::abs(got - want) < 1e-12, std::abs(got - want), opt.seed, verify::describe(got, want));
  }
  return {t_p.finish("max violation"), t_g.finish("max violation"), t_u.finish("max violation"),
          t_d.finish("max violation"), t_t.finish("max violation")};
}

/// LP/SOC/SDP unit problems and random 3x3 maximum-eigenvalue SDPs against
/// Eigen's eigensolver.
inline std::vector<CheckResult> verify_solver(const VerifyOptions& opt, int eig_instances = 50) {
  using verify::Tally;
  Tally t_u("solver", "solve_conic unit problems", opt.seed), t_e("solver", "solve_conic max-eigenvalue SDP", opt.seed),
      t_c("solver", "solve_conic certificates", opt.seed);
  const ConicOptions copt;
  auto residuals_ok = [&](const ConicSolution& s) {
    return s.optimal() && s.primal_residual <= copt.feas_tol && s.dual_residual <= copt.feas_tol &&
           s.gap <= copt.gap_tol;
  };
  {
    ConicProblem p;
    const int x = p.add_variable("x");
    p.maximize(AffineExpr::var(x));
    p.add_nonnegative(AffineExpr::var(x));
    p.add_nonnegative(1.0 - AffineExpr::var(x));
    const auto s = solve_conic(p);
    const double e = s.x.size() ? std::abs(s.x[x] - 1.0) : 1.0;
    t_u.add(residuals_ok(s) && e < 1e-6, e, opt.seed, std::string("LP ") + to_string(s.status));
  }
  {
    ConicProblem p;
    const int t = p.add_variable("t");
    p.minimize(AffineExpr::var(t));
    p.add_soc({AffineExpr::var(t), 3.0, 4.0});
    const auto s = solve_conic(p);
    const double e = s.x.size() ? std::abs(s.x[t] - 5.0) : 1.0;
    t_u.add(residuals_ok(s) && e < 1e-6, e, opt.seed, std::string("SOC ") + to_string(s.status));
  }
  for (int n = 0; n < eig_instances; ++n) {
    const auto seed = derive_seed(opt.seed, static_cast<std::uint64_t>(n));
    Rng rng(seed);
    std::normal_distribution<double> n01;
    Eigen::Matrix3d C;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) C(a, b) = n01(rng);
    C = (0.5 * (C + C.transpose())).eval();
    ConicProblem p;
    const int v0 = p.add_variables(6, "X");
    std::vector<AffineExpr> lower;
    AffineExpr obj, trace;
    int idx = 0;
    for (int j = 0; j < 3; ++j)
      for (int r = j; r < 3; ++r, ++idx) {
        lower.push_back(AffineExpr::var(v0 + idx));
        obj.add(v0 + idx, r == j ? C(r, j) : 2.0 * C(r, j));
        if (r == j) trace.add(v0 + idx, 1.0);
      }
    p.add_psd(3, lower);
    p.add_equality(trace - 1.0);
    p.maximize(obj);
    const auto s = solve_conic(p);
    const double want = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(C).eigenvalues()[2];
    const double e = std::abs(s.objective - want);
    t_e.add(residuals_ok(s) && e < 1e-6, e, seed, std::string(to_string(s.status)) + ", " + verify::describe(s.objective, want));
  }
  {
    ConicProblem p;
    const int x = p.add_variable("x");
    p.maximize(AffineExpr::var(x));
    p.add_nonnegative(AffineExpr::var(x) - 2.0);
    p.add_nonnegative(1.0 - AffineExpr::var(x));
    const auto s = solve_conic(p);
    t_c.add(s.status == ConicStatus::Infeasible, 0.0, opt.seed, std::string("infeasible LP: ") + to_string(s.status));
    ConicProblem q;
    const int y = q.add_variable("y");
    q.maximize(AffineExpr::var(y));
    q.add_nonnegative(AffineExpr::var(y) - 2.0);
    const auto s2 = solve_conic(q);
    t_c.add(s2.status == ConicStatus::Unbounded, 0.0, opt.seed, std::string("unbounded LP: ") + to_string(s2.status));
  }
  return {t_u.finish(), t_e.finish(), t_c.finish()};
}

/// Rates against a from-scratch evaluation of the SINR sums.
inline std::vector<CheckResult> verify_rates(const VerifyOptions& opt) {
  using verify::Tally;
  Tally t_r("rates", "achievable_rate", opt.seed), t_s("rates", "sum_rate", opt.seed),
      t_b("rates", "rate <= own-decoding rate", opt.seed);
  for (int n = 0; n < opt.instances; ++n) {
    const auto seed = derive_seed(opt.seed, static_cast<std::uint64_t>(n));
    const auto in = verify::random_instance(seed);
    const auto h = channel_table(in.apv, in.real, in.cfg.wavelength);
    const std::vector<double> noise(static_cast<std::size_t>(in.cfg.num_users), in.cfg.noise_power);
    const auto dense = in.pi.dense();
    const int K = in.cfg.num_users;
    double total = 0.0;
    for (int k = 0; k < K; ++k) {
      double best = std::numeric_limits<double>::infinity();
      for (int i = k; i < K; ++i) {
        if (!dense[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]) continue;
        const auto& hi = h[static_cast<std::size_t>(i)];
        double all = 0.0, cancelled = 0.0;
        for (int j = 0; j < K; ++j) {
          const double pw = std::norm(hi.dot(in.w[static_cast<std::size_t>(j)]));
          all += pw;
          if (j <= k) cancelled += dense[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] * pw;
        }
        const double num = std::norm(hi.dot(in.w[static_cast<std::size_t>(k)]));
        best = std::min(best, std::log2(1.0 + num / (all - cancelled + noise[static_cast<std::size_t>(i)])));
      }
      const double got = achievable_rate(h, in.w, in.pi, noise, k);
      const double e = std::abs(got - best) / std::max(1.0, best);
      t_r.add(e < 1e-10, e, seed, verify::describe(got, best));
      const double own = std::log2(1.0 + sinr_own(h, in.w, in.pi, noise, k));
      t_b.add(got <= own + 1e-12, std::max(0.0, got - own), seed);
      total += best;
    }
    const double s = sum_rate(h, in.w, in.pi, noise);
    const double e = std::abs(s - total) / std::max(1.0, total);
    t_s.add(e < 1e-10, e, seed, verify::describe(s, total));
  }
  {
    // gamma_{1->1} = 3, gamma_{1->2} = 1 gives R_1 = min(2, 1).
    Eigen::MatrixXd power(2, 2);
    power << 3.0, 1.0, 0.0, 0.0;
    const auto pi = DecodingIndicatorMatrix::full(2);
    const double r = achievable_rate(power, pi, {1.0, 1.0}, 0);
    t_r.add(std::abs(r - 1.0) < 1e-15, std::abs(r - 1.0), opt.seed, "two-user example " + verify::describe(r, 1.0));
  }
  return {t_r.finish("max rel error"), t_s.finish("max rel error"), t_b.finish("max excess")};
}

/// Indicator structure: every matrix produced by the public constructors, the
/// gene map, GA runs and stage-two runs must be upper triangular with a unit
/// diagonal.
inline std::vector<CheckResult> verify_indicator_structure(const VerifyOptions& opt) {
  verify::Tally t("rates", "DecodingIndicatorMatrix invariant", opt.seed),
      t_g("ga", "gene_to_matrix round trip", opt.seed);
  auto check = [&](DecodingIndicatorMatrix pi, std::uint64_t seed, const std::string& what) {
    if (opt.hooks.corrupt_indicator) opt.hooks.corrupt_indicator(pi);
    bool ok = pi.valid();
    const auto d = pi.dense();
    for (int k = 0; k < pi.size(); ++k)
      for (int i = 0; i < pi.size(); ++i) {
        const int v = d[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        if ((k == i && v != 1) || (k > i && v != 0)) ok = false;
      }
    t.add(ok, 0.0, seed, what);
  };
  for (int K = 1; K <= 6; ++K) {
    check(DecodingIndicatorMatrix::identity(K), opt.seed, "identity K=" + std::to_string(K));
    check(DecodingIndicatorMatrix::full(K), opt.seed, "full K=" + std::to_string(K));
  }
  for (int n = 0; n < opt.instances; ++n) {
    const auto seed = derive_seed(opt.seed, static_cast<std::uint64_t>(n));
    Rng rng(seed);
    const int K = 2 + static_cast<int>(seed % 5);
    Gene g(static_cast<std::size_t>(gene_length(K)));
    std::bernoulli_distribution bit(0.5);
    for (auto& b : g) b = bit(rng) ? 1 : 0;
    const auto pi = gene_to_matrix(g, K);
    check(pi, seed, "gene K=" + std::to_string(K));
    t_g.add(matrix_to_gene(pi) == g, 0.0, seed);
  }
  {
    const auto pi = gene_to_matrix(Gene{1, 0, 1}, 3);
    const std::vector<std::vector<int>> want = {{1, 1, 0}, {0, 1, 1}, {0, 0, 1}};
    t_g.add(pi.dense() == want, 0.0, opt.seed, "layout example K=3");
  }
  return {t.finish(), t_g.finish()};
}

/// GA never beats enumeration and finds the 8-candidate optimum at K=3.
inline std::vector<CheckResult> verify_ga(const VerifyOptions& opt, int trials = 50) {
  verify::Tally t_d("ga", "run_ga <= exhaustive", opt.seed), t_m("ga", "run_ga matches exhaustive", opt.seed),
      t_mono("ga", "run_ga best-fitness trace", opt.seed);
  int matched = 0;
  for (int n = 0; n < trials; ++n) {
    const auto seed = derive_seed(opt.seed, static_cast<std::uint64_t>(n));
    SystemConfig cfg;
    cfg.num_antennas = 2;
    cfg.num_users = 3;
    const auto real = sample_realization(cfg, seed);
    Rng rng(derive_seed(seed, 5));
    std::vector<Point> pts = {Point(-0.05, 0.0), Point(0.05, 0.0)};
    const AntennaPositionVector apv(pts);
    const auto h = channel_table(apv, real, cfg.wavelength);
    const auto w = equal_power_mrt(h, cfg.max_power);
    FitnessContext ctx{received_power_table(h, w), std::vector<double>(3, cfg.noise_power), cfg.min_rate,
                       GaConfig{}.penalty};
    const auto ex = exhaustive_indicator(ctx);
    const auto ga = run_ga(ctx, GaConfig{}, rng);
    t_d.add(ga.best_fitness <= ex.best_fitness, ga.best_fitness - ex.best_fitness, seed,
            verify::describe(ga.best_fitness, ex.best_fitness));
    if (ga.best_fitness == ex.best_fitness) ++matched;
    bool mono = true;
    for (std::size_t v = 1; v < ga.trace.size(); ++v) mono = mono && ga.trace[v] >= ga.trace[v - 1];
    t_mono.add(mono, 0.0, seed);
  }
  const double frac = static_cast<double>(matched) / trials;
  t_m.add(frac >= 0.95, frac, opt.seed, std::to_string(matched) + "/" + std::to_string(trials) + " matched");
  return {t_d.finish("max excess"), t_m.finish("match fraction"), t_mono.finish()};
}

/// Gain QP: closed form against the conic path; stage one monotone and
/// feasible.
inline std::vector<CheckResult> verify_stage_one(const VerifyOptions& opt, int runs = 5) {
  verify::Tally t_q("solver", "build_gain_qp closed form vs conic", opt.seed),
      t_m("stage_one", "optimize_positions_for_gain", opt.seed), t_o("stage_one", "determine_order", opt.seed);
  for (int n = 0; n < runs; ++n) {
    const auto seed = derive_seed(opt.seed, static_cast<std::uint64_t>(n));
    SystemConfig cfg;
    const auto real = sample_realization(cfg, seed);
    Rng rng(derive_seed(seed, 101));
    const auto init = initial_positions(cfg, rng);
    const PhiContext ctx(real, cfg.wavelength);
    for (int m = 0; m < init.size(); ++m) {
      const auto data = gain_qp_data(m, ctx, init, cfg);
      const Point cf = solve_gain_qp_closed_form(data);
      const auto qp = build_gain_qp(data, cfg.wavelength);
      const auto sol = solve_conic(qp.problem);
      if (!sol.optimal()) {
        t_q.add(false, 0.0, seed, std::string("conic status ") + to_string(sol.status));
        continue;
      }
      const Point cc = qp.position(sol);
      const double scale = std::max(std::abs(data.value), 1e-300);
      const double diff = (data.surrogate(cc) - data.surrogate(cf)) / scale;
      t_q.add(diff <= 1e-6 && data.feasible(cf, 1e-9) && data.surrogate(cf) >= data.value - 1e-9 * scale,
              std::max(0.0, diff), seed);
    }
    StageOneOptions s1;
    const auto res = optimize_positions_for_gain(real, cfg, init, s1);
    bool mono = true;
    for (std::size_t j = 1; j < res.trace.size(); ++j) mono = mono && res.trace[j] >= res.trace[j - 1] * (1 - 1e-9);
    const bool feas = res.apv.feasible(cfg.region_side, cfg.min_spacing);
    t_m.add(mono && feas && res.sweeps <= cfg.max_iter_stage_one, 0.0, seed,
            !mono ? "gain trace decreased" : (!feas ? "positions infeasible" : "sweep cap exceeded"));
    const auto order = determine_order(res.apv, real, cfg.wavelength);
    bool sorted = DecodingOrder::is_permutation(order.users);
    for (int k = 1; sorted && k < cfg.num_users; ++k) {
      const double a = channel_gain(res.apv, real.users[static_cast<std::size_t>(order.users[k - 1])], cfg.wavelength);
      const double b = channel_gain(res.apv, real.users[static_cast<std::size_t>(order.users[k])], cfg.wavelength);
      sorted = a <= b;
    }
    t_o.add(sorted, 0.0, seed);
  }
  return {t_q.finish("max conic advantage"), t_m.finish(), t_o.finish()};
}

/// Single-user runs against the matched-filter closed form at the final
/// positions; one small multi-user run checked for monotone traces, feasible
/// iterates and determinism.
inline std::vector<CheckResult> verify_orchestrator(const VerifyOptions& opt) {
  verify::Tally t_k1("orchestrator", "run_two_stage K=1 closed form", opt.seed),
      t_inv("orchestrator", "run_two_stage invariants", opt.seed);
  for (int M = 1; M <= 4; ++M) {
    const auto seed = derive_seed(opt.seed, static_cast<std::uint64_t>(M));
    SystemConfig cfg;
    cfg.num_antennas = M;
    cfg.num_users = 1;
    const auto real = sample_realization(cfg, seed);
    const auto rep = run_two_stage(real, cfg, GaConfig{}, seed);
    const double gain = channel_gain(rep.apv, real.users[0], cfg.wavelength);
    const double want = std::log2(1.0 + cfg.max_power * gain / cfg.noise_power);
    const double e = std::abs(rep.sum_rate - want);
    t_k1.add(!rep.excluded && e < 1e-3, e, seed, "M=" + std::to_string(M) + " " + verify::describe(rep.sum_rate, want));
  }
  {
    const auto seed = derive_seed(opt.seed, 99);
    SystemConfig cfg;
    cfg.num_antennas = 2;
    cfg.num_users = 3;
    const auto real = sample_realization(cfg, seed);
    const auto a = run_two_stage(real, cfg, GaConfig{}, seed);
    const auto b = run_two_stage(real, cfg, GaConfig{}, seed);
    bool mono = true;
    for (std::size_t j = 1; j < a.sum_rate_trace.size(); ++j)
      mono = mono && a.sum_rate_trace[j] >= a.sum_rate_trace[j - 1] - 1e-9;
    for (std::size_t j = 1; j < a.gain_trace.size(); ++j)
      mono = mono && a.gain_trace[j] >= a.gain_trace[j - 1] * (1 - 1e-9);
    std::string why;
    bool feas = true;
    for (const auto& it : a.iterates) feas = feas && iterate_feasible(it, cfg, &why);
    const bool same = a.sum_rate == b.sum_rate && a.apv.positions == b.apv.positions && a.pi == b.pi;
    t_inv.add(mono && feas && same, 0.0, seed,
              !mono ? "trace decreased" : (!feas ? why : "repeat run differs"));
  }
  return {t_k1.finish("max rate gap"), t_inv.finish()};
}

inline std::vector<CheckResult> verify_benchmarks(const VerifyOptions& opt) {
  verify::Tally t("benchmarks", "fpa_positions", opt.seed);
  SystemConfig cfg;
  const double q = cfg.wavelength / 4;
  const auto g4 = fpa_positions(cfg);
  double e = 0.0;
  const std::vector<Point> want = {Point(-q, -q), Point(q, -q), Point(-q, q), Point(q, q)};
  for (int m = 0; m < 4; ++m) e = std::max(e, (g4[m] - want[static_cast<std::size_t>(m)]).norm());
  t.add(e < 1e-15, e, opt.seed, "M=4 grid");
  cfg.num_antennas = 2;
  const auto g2 = fpa_positions(cfg);
  const double e2 = std::abs((g2[1] - g2[0]).norm() - cfg.wavelength / 2);
  t.add(e2 < 1e-15 && g2.feasible(cfg.region_side, cfg.min_spacing), e2, opt.seed, "M=2 row");
  return {t.finish()};
}

/// Every suite in order.
inline std::vector<CheckResult> run_verification(const VerifyOptions& opt = {}) {
  std::vector<CheckResult> all;
  auto append = [&](std::vector<CheckResult> r) { all.insert(all.end(), r.begin(), r.end()); };
  append(verify_channel(opt));
  append(verify_calculus(opt));
  append(verify_curvature(opt));
  append(verify_surrogates(opt));
  append(verify_rates(opt));
  append(verify_solver(opt));
  append(verify_indicator_structure(opt));
  append(verify_ga(opt));
  append(verify_stage_one(opt));
  append(verify_orchestrator(opt));
  append(verify_benchmarks(opt));
  return all;
}

inline bool all_passed(const std::vector<CheckResult>& r) {
  return std::all_of(r.begin(), r.end(), [](const CheckResult& c) { return c.passed; });
}

inline void print_verification(std::ostream& os, const std::vector<CheckResult>& results) {
  std::size_t wm = 6, wo = 9;
  for (const auto& r : results) {
    wm = std::max(wm, r.module.size());
    wo = std::max(wo, r.operation.size());
  }
  os << std::left << std::setw(static_cast<int>(wm)) << "module" << "  " << std::setw(static_cast<int>(wo))
     << "operation" << "  status  seed                  detail\n";
  for (const auto& r : results)
    os << std::left << std::setw(static_cast<int>(wm)) << r.module << "  " << std::setw(static_cast<int>(wo))
       << r.operation << "  " << (r.passed ? "PASS  " : "FAIL  ") << "  " << std::setw(20) << r.seed << "  "
       << r.detail << '\n';
  const auto failed = std::count_if(results.begin(), results.end(), [](const CheckResult& c) { return !c.passed; });
  os << results.size() - static_cast<std::size_t>(failed) << "/" << results.size() << " checks passed\n";
}

}  // namespace manoma

#endif  // MANOMA_VERIFY_HPP
