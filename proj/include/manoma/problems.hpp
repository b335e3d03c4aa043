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

// Convex subproblems of the alternating optimization:
//
//   * the per-antenna gain QP (concave quadratic over a polygon),
//   * the relaxed beamforming SDP with hyperbolic slack constraints,
//   * the per-antenna position SOCP,
//
// plus rank-one beam recovery from the lifted SDP solution.
//
// Powers inside the conic problems are normalized by the noise power and the
// transmit budget, and positions are measured in wavelengths, so that the
// solver sees quantities of order one.

#ifndef MANOMA_PROBLEMS_HPP
#define MANOMA_PROBLEMS_HPP

#include "manoma/channel.hpp"
#include "manoma/conic.hpp"
#include "manoma/frcalc.hpp"
#include "manoma/rates.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace manoma {

// ---------------------------------------------------------------------------
// Gain QP: maximize Phi_lb(u) over the region and the linearized spacing
// constraints of one antenna.

/// a^T u <= b
struct HalfPlane {
  Point a;
  double b;
};

struct GainQpData {
  int m = 0;
  Point anchor = Point::Zero();
  double value = 0.0;       // Phi(anchor)
  Point gradient = Point::Zero();
  double curvature = 0.0;   // delta_m
  std::vector<HalfPlane> constraints;  // box edges first, then spacing cuts

  [[nodiscard]] double surrogate(const Point& u) const {
    const Point d = u - anchor;
    return value + gradient.dot(d) - 0.5 * curvature * d.squaredNorm();
  }

  [[nodiscard]] bool feasible(const Point& u, double tol = 1e-12) const {
    for (const auto& c : constraints)
      if (c.a.dot(u) > c.b + tol * (1.0 + std::abs(c.b))) return false;
    return true;
  }
};

/// Linearized spacing constraint of antenna m against fixed antenna n, as a
/// half-plane: ||u0 - un||^2 + 2 (u0 - un)^T (u - u0) >= D^2.
inline HalfPlane spacing_cut(const Point& anchor, const Point& other, double spacing) {
  const Point diff = anchor - other;
  return {-2.0 * diff, diff.squaredNorm() - spacing * spacing - 2.0 * diff.dot(anchor)};
}

inline std::vector<HalfPlane> region_and_spacing(const AntennaPositionVector& apv, int m, double side,
                                                 double spacing) {
  const double half = side / 2.0;
  std::vector<HalfPlane> cs = {
      {Point(1, 0), half}, {Point(-1, 0), half}, {Point(0, 1), half}, {Point(0, -1), half}};
  for (int n = 0; n < apv.size(); ++n)
    if (n != m) cs.push_back(spacing_cut(apv[m], apv[n], spacing));
  return cs;
}

inline GainQpData gain_qp_data(int m, const PhiContext& ctx, const AntennaPositionVector& apv,
                               const SystemConfig& cfg, CurvatureRule rule = CurvatureRule::Global) {
  if (m < 0 || m >= apv.size()) throw std::out_of_range("gain_qp_data: antenna index out of range");
  GainQpData q;
  q.m = m;
  q.anchor = apv[m];
  const auto s = surrogate_phi_lb(ctx, q.anchor, rule);
  q.value = s.value;
  q.gradient = s.gradient;
  q.curvature = s.curvature;
  q.constraints = region_and_spacing(apv, m, cfg.region_side, cfg.min_spacing);
  return q;
}

/// Conic form of the gain QP in wavelength units: variables d = (u - u0)/lambda
/// and q >= ||d||^2; the objective is divided by `scale`.
struct GainQp {
  ConicProblem problem;
  int dx = 0;
  int dy = 1;
  int q = 2;
  Point anchor = Point::Zero();
  double wavelength = 1.0;
  double scale = 1.0;

  [[nodiscard]] Point position(const ConicSolution& sol) const {
    return anchor + wavelength * Point(sol.x[dx], sol.x[dy]);
  }
};

inline GainQp build_gain_qp(const GainQpData& data, double wavelength) {
  GainQp g;
  g.anchor = data.anchor;
  g.wavelength = wavelength;
  g.scale = std::max({std::abs(data.value), data.gradient.norm() * wavelength,
                      data.curvature * wavelength * wavelength, 1e-300});
  auto& P = g.problem;
  g.dx = P.add_variable("dx");
  g.dy = P.add_variable("dy");
  g.q = P.add_variable("q");
  const auto dx = AffineExpr::var(g.dx);
  const auto dy = AffineExpr::var(g.dy);
  const auto q = AffineExpr::var(g.q);
  const double wl = wavelength;
  AffineExpr obj = (data.value / g.scale) + dx * (data.gradient.x() * wl / g.scale) +
                   dy * (data.gradient.y() * wl / g.scale) - q * (0.5 * data.curvature * wl * wl / g.scale);
  P.maximize(obj);
  P.add_soc({q + 1.0, 2.0 * dx, 2.0 * dy, q - 1.0});
  for (const auto& c : data.constraints) {
    // a^T (u0 + wl d) <= b
    const double slack = (c.b - c.a.dot(data.anchor)) / wl;
    P.add_nonnegative(slack - dx * c.a.x() - dy * c.a.y());
  }
  return g;
}

inline GainQp build_gain_qp(int m, const PhiContext& ctx, const AntennaPositionVector& apv,
                            const SystemConfig& cfg) {
  return build_gain_qp(gain_qp_data(m, ctx, apv, cfg), cfg.wavelength);
}

namespace detail {

inline std::optional<Point> line_intersection(const HalfPlane& p, const HalfPlane& r) {
  const double det = p.a.x() * r.a.y() - p.a.y() * r.a.x();
  const double scale = p.a.norm() * r.a.norm();
  if (std::abs(det) <= 1e-14 * scale) return std::nullopt;
  return Point((p.b * r.a.y() - r.b * p.a.y()) / det, (p.a.x() * r.b - r.a.x() * p.b) / det);
}

}  // namespace detail

/// Exact maximizer of the gain QP. With delta > 0 the problem is the
/// Euclidean projection of u0 + g/delta onto the polygon, found by enumerating
/// the point itself, its projections onto every edge line and every vertex.
/// With delta = 0 it is a linear program solved over the vertices.
inline Point solve_gain_qp_closed_form(const GainQpData& data) {
  const auto& cs = data.constraints;
  std::vector<Point> cands;
  for (std::size_t a = 0; a < cs.size(); ++a)
    for (std::size_t b = a + 1; b < cs.size(); ++b)
      if (auto v = detail::line_intersection(cs[a], cs[b])) cands.push_back(*v);
  Point best = data.anchor;
  if (data.curvature > 0.0) {
    const Point target = data.anchor + data.gradient / data.curvature;
    cands.push_back(target);
    for (const auto& c : cs) {
      const double nn = c.a.squaredNorm();
      cands.push_back(target - (c.a.dot(target) - c.b) / nn * c.a);
    }
    double best_dist = (data.anchor - target).squaredNorm();
    for (const auto& p : cands) {
      if (!data.feasible(p, 1e-12)) continue;
      const double dist = (p - target).squaredNorm();
      if (dist < best_dist) {
        best_dist = dist;
        best = p;
      }
    }
    return best;
  }
  if (data.gradient.squaredNorm() == 0.0) return data.anchor;
  double best_val = data.gradient.dot(data.anchor);
  for (const auto& p : cands) {
    if (!data.feasible(p, 1e-12)) continue;
    const double v = data.gradient.dot(p);
    if (v > best_val) {
      best_val = v;
      best = p;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Slack anchors shared by the beamforming and position programs.

/// Anchor values (alpha_t, beta_t) of one active (k, i) pair, in units where
/// the noise power of user i is 1: alpha = sigma^2/Gamma, beta = Upsilon/sigma^2.
struct PairAnchor {
  int k = 0;
  int i = 0;
  double alpha = 1.0;
  double beta = 1.0;
};

struct SlackAnchors {
  std::vector<PairAnchor> pairs;

  [[nodiscard]] const PairAnchor& at(int k, int i) const {
    for (const auto& p : pairs)
      if (p.k == k && p.i == i) return p;
    throw std::out_of_range("SlackAnchors: no anchor for pair");
  }

  [[nodiscard]] bool positive() const {
    return std::all_of(pairs.begin(), pairs.end(),
                       [](const PairAnchor& p) { return p.alpha > 0.0 && p.beta > 0.0; });
  }
};

inline constexpr double kAlphaClamp = 1e12;

/// Anchors tight at the incumbent (w, h): alpha = 1/Gamma, beta = Upsilon.
/// Gamma = 0 clamps alpha to 1e12 and sets `clamped`.
inline SlackAnchors tight_anchors(const Eigen::MatrixXd& power, const DecodingIndicatorMatrix& pi,
                                  const std::vector<double>& noise, bool* clamped = nullptr) {
  SlackAnchors a;
  if (clamped) *clamped = false;
  for (const auto& [k, i] : pi.active_pairs()) {
    const double sig = noise[static_cast<std::size_t>(i)];
    PairAnchor p;
    p.k = k;
    p.i = i;
    const double g = power(k, i) / sig;
    if (g * kAlphaClamp <= 1.0) {
      p.alpha = kAlphaClamp;
      if (clamped) *clamped = true;
    } else {
      p.alpha = 1.0 / g;
    }
    double ups = sig;
    for (int j = 0; j < pi.size(); ++j)
      if (!(j <= k && pi(j, i))) ups += power(j, i);
    p.beta = ups / sig;
    a.pairs.push_back(p);
  }
  return a;
}

// ---------------------------------------------------------------------------
// Beamforming SDP.

/// Index layout of one Hermitian M x M block: M diagonal entries (real), then
/// for each i < j (row-major) Re W_ij and Im W_ij.
struct HermitianBlock {
  int first = 0;
  int order = 0;

  [[nodiscard]] int diag(int i) const { return first + i; }
  [[nodiscard]] int offdiag_index(int i, int j) const {
    // position of (i, j), i < j, in row-major strict upper order
    return i * order - i * (i + 1) / 2 + (j - i - 1);
  }
  [[nodiscard]] int re(int i, int j) const { return first + order + 2 * offdiag_index(i, j); }
  [[nodiscard]] int im(int i, int j) const { return re(i, j) + 1; }
  [[nodiscard]] int size() const { return order * order; }

  /// Re Tr(W H) for Hermitian H.
  [[nodiscard]] AffineExpr trace_with(const CMatrix& H) const {
    AffineExpr e;
    for (int i = 0; i < order; ++i) e.add(diag(i), H(i, i).real());
    for (int i = 0; i < order; ++i)
      for (int j = i + 1; j < order; ++j) {
        e.add(re(i, j), 2.0 * H(j, i).real());
        e.add(im(i, j), -2.0 * H(j, i).imag());
      }
    return e;
  }

  [[nodiscard]] AffineExpr trace() const {
    AffineExpr e;
    for (int i = 0; i < order; ++i) e.add(diag(i), 1.0);
    return e;
  }

  /// Lower triangle (column-major) of the real symmetric embedding
  /// [[Re W, -Im W], [Im W, Re W]].
  [[nodiscard]] std::vector<AffineExpr> real_embedding() const {
    const int M = order;
    auto X = [&](int a, int b) -> AffineExpr {
      if (a == b) return AffineExpr::var(diag(a));
      return AffineExpr::var(re(std::min(a, b), std::max(a, b)));
    };
    auto Y = [&](int a, int b) -> AffineExpr {
      if (a == b) return AffineExpr(0.0);
      if (a < b) return AffineExpr::var(im(a, b));
      return AffineExpr::var(im(b, a), -1.0);
    };
    std::vector<AffineExpr> low;
    for (int c = 0; c < 2 * M; ++c)
      for (int r = c; r < 2 * M; ++r) {
        if (r < M)
          low.push_back(X(r, c));
        else if (c < M)
          low.push_back(Y(r - M, c));
        else
          low.push_back(X(r - M, c - M));
      }
    return low;
  }

  [[nodiscard]] CMatrix value(const Eigen::VectorXd& x) const {
    CMatrix W(order, order);
    for (int i = 0; i < order; ++i) W(i, i) = x[diag(i)];
    for (int i = 0; i < order; ++i)
      for (int j = i + 1; j < order; ++j) {
        W(i, j) = cplx(x[re(i, j)], x[im(i, j)]);
        W(j, i) = std::conj(W(i, j));
      }
    return W;
  }
};

struct BeamformingSdp {
  ConicProblem problem;
  std::vector<HermitianBlock> blocks;
  std::vector<int> rate_vars;
  double max_power = 1.0;

  /// Lifted covariance matrices W_k in watts.
  [[nodiscard]] std::vector<CMatrix> covariances(const ConicSolution& sol) const {
    std::vector<CMatrix> out;
    for (const auto& b : blocks) out.push_back(max_power * b.value(sol.x));
    return out;
  }
};

/// Relaxed beamforming problem at fixed positions. `h` is indexed in decoding
/// order. `qos_level` is the per-user minimum rate imposed (0 disables QoS).
inline BeamformingSdp build_beamforming_sdp(const std::vector<CVector>& h, const DecodingIndicatorMatrix& pi,
                                            const SlackAnchors& anchors, const std::vector<double>& noise,
                                            double max_power, double qos_level) {
  const int K = pi.size();
  if (static_cast<int>(h.size()) != K || static_cast<int>(noise.size()) != K)
    throw std::invalid_argument("build_beamforming_sdp: size mismatch");
  if (!anchors.positive()) throw std::invalid_argument("build_beamforming_sdp: anchors must be positive");
  const int M = static_cast<int>(h.front().size());
  BeamformingSdp sdp;
  sdp.max_power = max_power;
  auto& P = sdp.problem;
  for (int k = 0; k < K; ++k) {
    HermitianBlock b;
    b.order = M;
    b.first = P.add_variables(M * M, "W" + std::to_string(k) + "_");
    sdp.blocks.push_back(b);
  }
  for (int k = 0; k < K; ++k) sdp.rate_vars.push_back(P.add_variable("R" + std::to_string(k)));

  // Normalized channel outer products: h~ = h sqrt(P)/sigma.
  std::vector<CMatrix> H(static_cast<std::size_t>(K));
  for (int i = 0; i < K; ++i) {
    const CVector hn = h[static_cast<std::size_t>(i)] * std::sqrt(max_power / noise[static_cast<std::size_t>(i)]);
    H[static_cast<std::size_t>(i)] = hn * hn.adjoint();
  }

  AffineExpr objective;
  AffineExpr power;
  for (int k = 0; k < K; ++k) {
    const auto& blk = sdp.blocks[static_cast<std::size_t>(k)];
    P.add_psd(2 * M, blk.real_embedding());
    power += blk.trace();
    objective += AffineExpr::var(sdp.rate_vars[static_cast<std::size_t>(k)]);
  }
  P.add_less_equal(power, 1.0);

  for (const auto& [k, i] : pi.active_pairs()) {
    const auto& anc = anchors.at(k, i);
    const std::string tag = std::to_string(k) + "_" + std::to_string(i);
    const auto alpha = AffineExpr::var(P.add_variable("alpha" + tag));
    const auto beta = AffineExpr::var(P.add_variable("beta" + tag));
    const auto gain = sdp.blocks[static_cast<std::size_t>(k)].trace_with(H[static_cast<std::size_t>(i)]);
    // alpha * gain >= 1
    P.add_soc({alpha + gain, 2.0, alpha - gain});
    AffineExpr interference = 1.0;
    for (int j = 0; j < K; ++j)
      if (upsilon_weight(pi, j, k, i) != 0.0)
        interference += sdp.blocks[static_cast<std::size_t>(j)].trace_with(H[static_cast<std::size_t>(i)]);
    P.add_less_equal(interference, beta);
    const auto th = rate_surrogate_coefficients(anc.alpha, anc.beta);
    P.add_less_equal(AffineExpr::var(sdp.rate_vars[static_cast<std::size_t>(k)]),
                     th.base + th.d_alpha * alpha + th.d_beta * beta);
  }
  if (qos_level > 0.0)
    for (int k = 0; k < K; ++k)
      P.add_nonnegative(AffineExpr::var(sdp.rate_vars[static_cast<std::size_t>(k)]) - qos_level);
  P.maximize(objective);
  return sdp;
}

// ---------------------------------------------------------------------------
// Rank-one recovery.

struct RankOneResult {
  CVector w;
  double ratio = 0.0;  // lambda_2 / lambda_1
  bool principal = true;
};

inline constexpr double kRankOneTol = 1e-4;

/// Principal eigenpair of a Hermitian PSD matrix: w = sqrt(l1) v1.
inline RankOneResult extract_rank_one(const CMatrix& W) {
  if (W.rows() != W.cols()) throw std::invalid_argument("extract_rank_one: matrix not square");
  const double scale = std::max(1e-300, W.norm());
  if ((W - W.adjoint()).norm() > 1e-8 * std::max(1.0, scale))
    throw std::invalid_argument("extract_rank_one: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (W + W.adjoint()));
  const auto& ev = es.eigenvalues();
  const auto n = ev.size();
  RankOneResult r;
  const double l1 = std::max(0.0, ev[n - 1]);
  const double l2 = n > 1 ? std::max(0.0, ev[n - 2]) : 0.0;
  r.w = std::sqrt(l1) * es.eigenvectors().col(n - 1);
  r.ratio = l1 > 1e-14 * scale ? l2 / l1 : 0.0;
  r.principal = r.ratio <= kRankOneTol;
  return r;
}

struct BeamRecovery {
  std::vector<CVector> w;
  std::vector<double> ratios;
  bool randomized = false;
};

/// Beam vectors from lifted covariances. Falls back to Gaussian
/// randomization (`candidates` draws, each beam rescaled to the power of its
/// covariance) when any block is not numerically rank one; the candidate with
/// the fewest QoS violations and then the largest sum rate wins.
inline BeamRecovery recover_beams(const std::vector<CMatrix>& W, const std::vector<CVector>& h,
                                  const DecodingIndicatorMatrix& pi, const std::vector<double>& noise,
                                  double min_rate, Rng& rng, int candidates = 100) {
  BeamRecovery out;
  bool all_principal = true;
  for (const auto& Wk : W) {
    const auto r = extract_rank_one(Wk);
    out.w.push_back(r.w);
    out.ratios.push_back(r.ratio);
    all_principal = all_principal && r.principal;
  }
  if (all_principal) return out;
  out.randomized = true;
  auto score = [&](const std::vector<CVector>& w) {
    const auto pw = received_power_table(h, w);
    const auto rates = achievable_rates(pw, pi, noise);
    double s = 0.0;
    for (double v : rates) s += v;
    return std::make_pair(qos_violations(rates, min_rate), s);
  };
  auto best = score(out.w);
  std::vector<Eigen::MatrixXcd> factors;
  std::vector<double> traces;
  for (const auto& Wk : W) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (Wk + Wk.adjoint()));
    const Eigen::VectorXd l = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    factors.push_back(es.eigenvectors() * l.asDiagonal());
    traces.push_back(std::max(0.0, Wk.trace().real()));
  }
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  std::vector<CVector> cand(W.size());
  for (int c = 0; c < candidates; ++c) {
    for (std::size_t k = 0; k < W.size(); ++k) {
      CVector r(W[k].rows());
      for (Eigen::Index t = 0; t < r.size(); ++t) {
        const double re = normal(rng);
        const double im = normal(rng);
        r[t] = cplx(re, im);
      }
      CVector v = factors[k] * r;
      const double nv = v.squaredNorm();
      cand[k] = nv > 0.0 ? CVector(v * std::sqrt(traces[k] / nv)) : v;
    }
    const auto sc = score(cand);
    if (sc.first < best.first || (sc.first == best.first && sc.second > best.second)) {
      best = sc;
      out.w = cand;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Position SOCP for one antenna.

struct PositionProgram {
  ConicProblem problem;
  int dx = 0;
  int dy = 1;
  int q = 2;
  std::vector<int> rate_vars;
  Point anchor = Point::Zero();
  double wavelength = 1.0;

  [[nodiscard]] Point position(const ConicSolution& sol) const {
    return anchor + wavelength * Point(sol.x[dx], sol.x[dy]);
  }
};

/// Contexts Gamma_{j,i}(u_m) for every beam j and decoder i, at antenna m.
inline std::vector<GammaColumn> gamma_contexts(const std::vector<CVector>& w, const AntennaPositionVector& apv,
                                               const ChannelRealization& real, double wavelength, int m) {
  const int K = real.num_users();
  std::vector<GammaColumn> cols(static_cast<std::size_t>(K));
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < static_cast<int>(w.size()); ++j)
      cols[static_cast<std::size_t>(i)].push_back(build_gamma_context(w, apv, real, wavelength, m, j, i));
  return cols;
}

/// Problem in the moving antenna m with beams, other antennas and Pi fixed.
/// `real` is indexed in decoding order. With `tight_upsilon` the Upsilon
/// curvature is computed from Upsilon itself instead of summing per beam.
inline PositionProgram build_position_program(int m, const std::vector<CVector>& w,
                                              const AntennaPositionVector& apv, const ChannelRealization& real,
                                              const DecodingIndicatorMatrix& pi, const SystemConfig& cfg,
                                              double qos_level, bool tight_upsilon = false,
                                              CurvatureRule rule = CurvatureRule::Global) {
  const int K = pi.size();
  const double wl = cfg.wavelength;
  const double sig = cfg.noise_power;
  const auto cols = gamma_contexts(w, apv, real, wl, m);
  PositionProgram pp;
  pp.anchor = apv[m];
  pp.wavelength = wl;
  auto& P = pp.problem;
  pp.dx = P.add_variable("dx");
  pp.dy = P.add_variable("dy");
  pp.q = P.add_variable("q");
  const auto dx = AffineExpr::var(pp.dx);
  const auto dy = AffineExpr::var(pp.dy);
  const auto q = AffineExpr::var(pp.q);
  for (int k = 0; k < K; ++k) pp.rate_vars.push_back(P.add_variable("R" + std::to_string(k)));
  P.add_soc({q + 1.0, 2.0 * dx, 2.0 * dy, q - 1.0});

  // Quadratic surrogate in wavelength units, normalized by the noise power.
  auto in_d = [&](const QuadraticSurrogate& s) {
    const double f = 1.0 / sig;
    const double quad = 0.5 * s.curvature * wl * wl * f;
    AffineExpr e = s.value * f + dx * (s.gradient.x() * wl * f) + dy * (s.gradient.y() * wl * f);
    return s.sense == BoundSense::Lower ? e - quad * q : e + quad * q;
  };

  // Power table at the anchor for the tight rate anchors.
  const auto h = channel_table(apv, real, wl);
  const auto anchors = tight_anchors(received_power_table(h, w), pi,
                                     std::vector<double>(static_cast<std::size_t>(K), sig));
  AffineExpr objective;
  for (int k = 0; k < K; ++k) objective += AffineExpr::var(pp.rate_vars[static_cast<std::size_t>(k)]);

  for (const auto& [k, i] : pi.active_pairs()) {
    const auto& col = cols[static_cast<std::size_t>(i)];
    const std::string tag = std::to_string(k) + "_" + std::to_string(i);
    const auto t = AffineExpr::var(P.add_variable("t" + tag));
    const auto alpha = AffineExpr::var(P.add_variable("alpha" + tag));
    const auto beta = AffineExpr::var(P.add_variable("beta" + tag));
    const auto glb = surrogate_gamma_lb(col[static_cast<std::size_t>(k)], pp.anchor, rule);
    P.add_less_equal(t, in_d(glb));
    P.add_soc({alpha + t, 2.0, alpha - t});
    const auto uub = surrogate_upsilon_ub(col, pi, k, i, sig, pp.anchor, rule, tight_upsilon);
    P.add_less_equal(in_d(uub), beta);
    const auto& anc = anchors.at(k, i);
    const auto th = rate_surrogate_coefficients(anc.alpha, anc.beta);
    P.add_less_equal(AffineExpr::var(pp.rate_vars[static_cast<std::size_t>(k)]),
                     th.base + th.d_alpha * alpha + th.d_beta * beta);
  }
  if (qos_level > 0.0)
    for (int k = 0; k < K; ++k)
      P.add_nonnegative(AffineExpr::var(pp.rate_vars[static_cast<std::size_t>(k)]) - qos_level);
  for (const auto& c : region_and_spacing(apv, m, cfg.region_side, cfg.min_spacing)) {
    const double slack = (c.b - c.a.dot(pp.anchor)) / wl;
    P.add_nonnegative(slack - dx * c.a.x() - dy * c.a.y());
  }
  P.maximize(objective);
  return pp;
}

}  // namespace manoma

#endif  // MANOMA_PROBLEMS_HPP
