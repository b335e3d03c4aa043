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

// Closed-form values, gradients and Hessians of the position-dependent
// quantities used by the per-antenna SCA steps, plus the quadratic surrogates
// built from them.
//
//   Phi(u)        = sum_k |g_k(u)^H f_k|^2            (overall channel gain of one antenna)
//   Gamma_ki(u_m) = |h_i^H w_k|^2                     (as a function of one antenna position)
//   Upsilon_ki    = sum_j Gamma_ji - sum_{j<=k} pi_ji Gamma_ji + sigma_i^2
//
// Every value is written as a sum of |coefficient| * cos(phase(u)) terms whose
// phases are affine in u, so derivatives are exact trigonometric sums.

#ifndef MANOMA_FRCALC_HPP
#define MANOMA_FRCALC_HPP

#include "manoma/channel.hpp"
#include "manoma/rates.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace manoma {

using Hessian2 = Eigen::Matrix2d;

namespace detail {

// Direction cosines of the path differences: rho_l(u) = a_l x + b_l y.
struct PathGeometry {
  Eigen::VectorXd a;  // sin(theta) cos(phi)
  Eigen::VectorXd b;  // cos(theta)

  explicit PathGeometry(const UserChannel& user) : a(user.num_paths()), b(user.num_paths()) {
    for (int l = 0; l < user.num_paths(); ++l) {
      a[l] = std::sin(user.elevation[l]) * std::cos(user.azimuth[l]);
      b[l] = std::cos(user.elevation[l]);
    }
  }
  PathGeometry() = default;
};

// Accumulates value/gradient/Hessian of sum_l1 sum_l2 |M| cos(arg M + wn (rho_l2 - rho_l1)).
struct TrigTerms {
  double value = 0.0;
  Point grad = Point::Zero();
  Hessian2 hess = Hessian2::Zero();
};

inline void accumulate_quadratic_form(const CMatrix& M, const PathGeometry& geo, double wn,
                                      const Point& u, int order, TrigTerms& out) {
  const auto L = M.rows();
  for (Eigen::Index l1 = 0; l1 < L; ++l1) {
    for (Eigen::Index l2 = 0; l2 < L; ++l2) {
      const double mag = std::abs(M(l1, l2));
      if (mag == 0.0) continue;
      const double da = geo.a[l2] - geo.a[l1];
      const double db = geo.b[l2] - geo.b[l1];
      const double phase = std::arg(M(l1, l2)) + wn * (da * u.x() + db * u.y());
      const double c = std::cos(phase);
      out.value += mag * c;
      if (order >= 1) {
        const double s = std::sin(phase);
        out.grad.x() -= wn * mag * s * da;
        out.grad.y() -= wn * mag * s * db;
      }
      if (order >= 2) {
        const double f = -wn * wn * mag * c;
        out.hess(0, 0) += f * da * da;
        out.hess(0, 1) += f * da * db;
        out.hess(1, 1) += f * db * db;
      }
    }
  }
  if (order >= 2) out.hess(1, 0) = out.hess(0, 1);
}

// wn^2 sum |M(l1,l2)| ||g_l2 - g_l1||^2 with g_l = (a_l, b_l): every
// eigenvalue of the Hessian of the quadratic-form part lies within +-this,
// for every position.
inline double quadratic_form_curvature(const CMatrix& M, const PathGeometry& geo, double wn) {
  double s = 0.0;
  for (Eigen::Index l1 = 0; l1 < M.rows(); ++l1)
    for (Eigen::Index l2 = 0; l2 < M.cols(); ++l2) {
      const double da = geo.a[l2] - geo.a[l1];
      const double db = geo.b[l2] - geo.b[l1];
      s += std::abs(M(l1, l2)) * (da * da + db * db);
    }
  return wn * wn * s;
}

// Same for sum_l |c_l| cos(wn rho_l - arg c_l).
inline double linear_phase_curvature(const CVector& c, const PathGeometry& geo, double wn) {
  double s = 0.0;
  for (Eigen::Index l = 0; l < c.size(); ++l) s += std::abs(c[l]) * (geo.a[l] * geo.a[l] + geo.b[l] * geo.b[l]);
  return wn * wn * s;
}

}  // namespace detail

/// Curvature used by the quadratic surrogates.
enum class CurvatureRule {
  Global,    // bounds the Hessian at every position, so surrogates are one-sided everywhere
  AtAnchor,  // Frobenius norm of the Hessian at the anchor
};

// ---------------------------------------------------------------------------
// Phi: overall channel gain contributed by a single antenna.

struct PhiContext {
  std::vector<CMatrix> outer;  // A_k = f_k f_k^H
  std::vector<detail::PathGeometry> geometry;
  double wavelength = 1.0;

  PhiContext(const ChannelRealization& real, double wl) : wavelength(wl) {
    for (const auto& user : real.users) {
      outer.push_back(user.path_response * user.path_response.adjoint());
      geometry.emplace_back(user);
    }
  }

  [[nodiscard]] double wavenumber() const { return kTwoPi / wavelength; }
};

namespace detail {
inline TrigTerms phi_terms(const PhiContext& ctx, const Point& u, int order) {
  TrigTerms t;
  for (std::size_t k = 0; k < ctx.outer.size(); ++k)
    accumulate_quadratic_form(ctx.outer[k], ctx.geometry[k], ctx.wavenumber(), u, order, t);
  return t;
}
}  // namespace detail

inline double phi_value(const PhiContext& ctx, const Point& u) {
  return detail::phi_terms(ctx, u, 0).value;
}

inline Point phi_grad(const PhiContext& ctx, const Point& u) {
  return detail::phi_terms(ctx, u, 1).grad;
}

inline Hessian2 phi_hess(const PhiContext& ctx, const Point& u) {
  return detail::phi_terms(ctx, u, 2).hess;
}

/// delta_m = ||Hessian of Phi||_F at u; dominates its largest eigenvalue.
inline double phi_curvature_bound(const PhiContext& ctx, const Point& u) {
  return phi_hess(ctx, u).norm();
}

/// Position-independent bound on |eigenvalues| of the Hessian of Phi.
inline double phi_curvature_global(const PhiContext& ctx) {
  double d = 0.0;
  for (std::size_t k = 0; k < ctx.outer.size(); ++k)
    d += detail::quadratic_form_curvature(ctx.outer[k], ctx.geometry[k], ctx.wavenumber());
  return d;
}

// ---------------------------------------------------------------------------
// Gamma_{k,i}(u_m) = |f_i^H g_i(u_m) w_{k,m} + zeta_{k,i,m}|^2

struct GammaContext {
  int k = 0;
  int i = 0;
  int m = 0;
  CMatrix outer;       // B = |w_{k,m}|^2 f_i f_i^H
  CVector cross;       // c = 2 conj(w_{k,m}) zeta f_i
  cplx residual{};     // zeta: contribution of the fixed antennas n != m
  detail::PathGeometry geometry;
  double wavelength = 1.0;
  std::uint64_t fingerprint = 0;

  [[nodiscard]] double wavenumber() const { return kTwoPi / wavelength; }
};

namespace detail {

inline std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t j = 0; j < n; ++j) {
    h ^= p[j];
    h *= 0x100000001B3ULL;
  }
  return h;
}

// Hash of everything a GammaContext depends on besides the moving antenna.
inline std::uint64_t gamma_fingerprint(const std::vector<CVector>& w, const AntennaPositionVector& apv,
                                       int m, int k, int i) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  const int idx[3] = {m, k, i};
  h = fnv1a(idx, sizeof(idx), h);
  for (const auto& v : w) h = fnv1a(v.data(), sizeof(cplx) * static_cast<std::size_t>(v.size()), h);
  for (int n = 0; n < apv.size(); ++n)
    if (n != m) h = fnv1a(apv[n].data(), 2 * sizeof(double), h);
  return h;
}

}  // namespace detail

inline GammaContext build_gamma_context(const std::vector<CVector>& w, const AntennaPositionVector& apv,
                                        const ChannelRealization& real, double wavelength, int m, int k,
                                        int i) {
  if (m < 0 || m >= apv.size()) throw std::out_of_range("build_gamma_context: antenna index out of range");
  if (k < 0 || k >= static_cast<int>(w.size()) || i < 0 || i >= real.num_users())
    throw std::out_of_range("build_gamma_context: user index out of range");
  const auto& user = real.users[static_cast<std::size_t>(i)];
  const auto& wk = w[static_cast<std::size_t>(k)];
  GammaContext ctx;
  ctx.k = k;
  ctx.i = i;
  ctx.m = m;
  ctx.wavelength = wavelength;
  ctx.geometry = detail::PathGeometry(user);
  for (int n = 0; n < apv.size(); ++n) {
    if (n == m) continue;
    // f_i^H g_i(u_n) w_{k,n}
    ctx.residual += user.path_response.dot(frv(apv[n], user, wavelength)) * wk[n];
  }
  const cplx wkm = wk[m];
  ctx.outer = std::norm(wkm) * (user.path_response * user.path_response.adjoint());
  ctx.cross = 2.0 * std::conj(wkm) * ctx.residual * user.path_response;
  ctx.fingerprint = detail::gamma_fingerprint(w, apv, m, k, i);
  return ctx;
}

/// True when ctx was built from exactly these beams and fixed antennas.
inline bool gamma_context_matches(const GammaContext& ctx, const std::vector<CVector>& w,
                                  const AntennaPositionVector& apv) {
  return ctx.fingerprint == detail::gamma_fingerprint(w, apv, ctx.m, ctx.k, ctx.i);
}

namespace detail {
inline TrigTerms gamma_terms(const GammaContext& ctx, const Point& u, int order) {
  TrigTerms t;
  const double wn = ctx.wavenumber();
  accumulate_quadratic_form(ctx.outer, ctx.geometry, wn, u, order, t);
  // Cross terms: Re(c_l exp(-j wn rho_l)) = |c_l| cos(wn rho_l - arg c_l).
  for (Eigen::Index l = 0; l < ctx.cross.size(); ++l) {
    const double mag = std::abs(ctx.cross[l]);
    if (mag == 0.0) continue;
    const double a = ctx.geometry.a[l];
    const double b = ctx.geometry.b[l];
    const double phase = -std::arg(ctx.cross[l]) + wn * (a * u.x() + b * u.y());
    const double c = std::cos(phase);
    t.value += mag * c;
    if (order >= 1) {
      const double s = std::sin(phase);
      t.grad.x() -= wn * mag * a * s;
      t.grad.y() -= wn * mag * b * s;
    }
    if (order >= 2) {
      const double f = -wn * wn * mag * c;
      t.hess(0, 0) += f * a * a;
      t.hess(0, 1) += f * a * b;
      t.hess(1, 1) += f * b * b;
    }
  }
  if (order >= 2) t.hess(1, 0) = t.hess(0, 1);
  t.value += std::norm(ctx.residual);
  return t;
}
}  // namespace detail

inline double gamma_value(const GammaContext& ctx, const Point& u) {
  // Clamp the rounding noise of the cosine expansion; the exact value is |.|^2.
  return std::max(0.0, detail::gamma_terms(ctx, u, 0).value);
}

inline Point gamma_grad(const GammaContext& ctx, const Point& u) {
  return detail::gamma_terms(ctx, u, 1).grad;
}

inline Hessian2 gamma_hess(const GammaContext& ctx, const Point& u) {
  return detail::gamma_terms(ctx, u, 2).hess;
}

inline double gamma_curvature_bound(const GammaContext& ctx, const Point& u) {
  return gamma_hess(ctx, u).norm();
}

/// Position-independent bound on |eigenvalues| of the Hessian of Gamma.
inline double gamma_curvature_global(const GammaContext& ctx) {
  const double wn = ctx.wavenumber();
  return detail::quadratic_form_curvature(ctx.outer, ctx.geometry, wn) +
         detail::linear_phase_curvature(ctx.cross, ctx.geometry, wn);
}

// ---------------------------------------------------------------------------
// Upsilon: interference-plus-noise seen by user i while decoding user k.

/// Contexts for one antenna m and one decoder i, indexed by the beam j.
using GammaColumn = std::vector<GammaContext>;

// Weight of Gamma_{j,i} inside Upsilon_{k,i}: 0 when cancelled by SIC.
inline double upsilon_weight(const DecodingIndicatorMatrix& pi, int j, int k, int i) {
  return (j <= k && pi(j, i)) ? 0.0 : 1.0;
}

inline double upsilon_value(const GammaColumn& column, const DecodingIndicatorMatrix& pi, int k, int i,
                            double noise, const Point& u) {
  double v = noise;
  for (int j = 0; j < static_cast<int>(column.size()); ++j)
    v += upsilon_weight(pi, j, k, i) * gamma_value(column[static_cast<std::size_t>(j)], u);
  return v;
}

inline Point upsilon_grad(const GammaColumn& column, const DecodingIndicatorMatrix& pi, int k, int i,
                          const Point& u) {
  Point g = Point::Zero();
  for (int j = 0; j < static_cast<int>(column.size()); ++j)
    g += upsilon_weight(pi, j, k, i) * gamma_grad(column[static_cast<std::size_t>(j)], u);
  return g;
}

inline Hessian2 upsilon_hess(const GammaColumn& column, const DecodingIndicatorMatrix& pi, int k, int i,
                             const Point& u) {
  Hessian2 h = Hessian2::Zero();
  for (int j = 0; j < static_cast<int>(column.size()); ++j)
    h += upsilon_weight(pi, j, k, i) * gamma_hess(column[static_cast<std::size_t>(j)], u);
  return h;
}

/// psi_{k,i} as the sum of the per-beam curvature bounds gamma_{j,i}.
/// `gamma_bounds[j]` holds gamma_{j,i} for the fixed decoder i.
inline double upsilon_curvature(const std::vector<double>& gamma_bounds, const DecodingIndicatorMatrix& pi,
                                int k, int i) {
  double psi = 0.0;
  for (int j = 0; j < static_cast<int>(gamma_bounds.size()); ++j)
    psi += upsilon_weight(pi, j, k, i) * gamma_bounds[static_cast<std::size_t>(j)];
  return psi;
}

/// Position-independent bound for Upsilon: the weighted Gamma expansions share
/// the decoder's path geometry, so their coefficients are summed before
/// bounding.
inline double upsilon_curvature_global_tight(const GammaColumn& column, const DecodingIndicatorMatrix& pi, int k,
                                             int i) {
  if (column.empty()) return 0.0;
  CMatrix outer = CMatrix::Zero(column.front().outer.rows(), column.front().outer.cols());
  CVector cross = CVector::Zero(column.front().cross.size());
  for (int j = 0; j < static_cast<int>(column.size()); ++j) {
    const double wgt = upsilon_weight(pi, j, k, i);
    if (wgt == 0.0) continue;
    outer += wgt * column[static_cast<std::size_t>(j)].outer;
    cross += wgt * column[static_cast<std::size_t>(j)].cross;
  }
  const double wn = column.front().wavenumber();
  return detail::quadratic_form_curvature(outer, column.front().geometry, wn) +
         detail::linear_phase_curvature(cross, column.front().geometry, wn);
}

/// Frobenius norm of the Upsilon Hessian itself; tighter than the summed bound.
inline double upsilon_curvature_tight(const GammaColumn& column, const DecodingIndicatorMatrix& pi, int k,
                                      int i, const Point& u) {
  return upsilon_hess(column, pi, k, i, u).norm();
}

// ---------------------------------------------------------------------------
// Quadratic surrogates anchored at u^t.

enum class BoundSense { Lower, Upper };

struct QuadraticSurrogate {
  Point anchor = Point::Zero();
  double value = 0.0;
  Point gradient = Point::Zero();
  double curvature = 0.0;
  BoundSense sense = BoundSense::Lower;

  [[nodiscard]] double operator()(const Point& u) const {
    const Point d = u - anchor;
    const double quad = 0.5 * curvature * d.squaredNorm();
    return value + gradient.dot(d) + (sense == BoundSense::Lower ? -quad : quad);
  }
};

inline QuadraticSurrogate surrogate_phi_lb(const PhiContext& ctx, const Point& anchor,
                                           CurvatureRule rule = CurvatureRule::Global) {
  const auto t = detail::phi_terms(ctx, anchor, rule == CurvatureRule::AtAnchor ? 2 : 1);
  const double curv = rule == CurvatureRule::AtAnchor ? t.hess.norm() : phi_curvature_global(ctx);
  return {anchor, t.value, t.grad, curv, BoundSense::Lower};
}

inline QuadraticSurrogate surrogate_gamma_lb(const GammaContext& ctx, const Point& anchor,
                                             CurvatureRule rule = CurvatureRule::Global) {
  const auto t = detail::gamma_terms(ctx, anchor, rule == CurvatureRule::AtAnchor ? 2 : 1);
  const double curv = rule == CurvatureRule::AtAnchor ? t.hess.norm() : gamma_curvature_global(ctx);
  return {anchor, std::max(0.0, t.value), t.grad, curv, BoundSense::Lower};
}

/// Upper bound on Upsilon_{k,i}. The curvature is the weighted sum of the
/// per-beam Gamma bounds; with `tight` it is computed from Upsilon itself
/// (summed expansion for the global rule, Hessian norm at the anchor
/// otherwise).
inline QuadraticSurrogate surrogate_upsilon_ub(const GammaColumn& column, const DecodingIndicatorMatrix& pi,
                                               int k, int i, double noise, const Point& anchor,
                                               CurvatureRule rule = CurvatureRule::Global, bool tight = false) {
  QuadraticSurrogate s;
  s.anchor = anchor;
  s.sense = BoundSense::Upper;
  s.value = noise;
  std::vector<double> bounds(column.size());
  Hessian2 hsum = Hessian2::Zero();
  for (std::size_t j = 0; j < column.size(); ++j) {
    const auto t = detail::gamma_terms(column[j], anchor, 2);
    const double wgt = upsilon_weight(pi, static_cast<int>(j), k, i);
    s.value += wgt * std::max(0.0, t.value);
    s.gradient += wgt * t.grad;
    hsum += wgt * t.hess;
    bounds[j] = rule == CurvatureRule::AtAnchor ? t.hess.norm() : gamma_curvature_global(column[j]);
  }
  if (!tight)
    s.curvature = upsilon_curvature(bounds, pi, k, i);
  else
    s.curvature = rule == CurvatureRule::AtAnchor ? hsum.norm() : upsilon_curvature_global_tight(column, pi, k, i);
  return s;
}

/// First-order lower bound of ||u - u_n||^2 at the anchor (exact up to a
/// convex remainder, so the curvature is zero).
inline QuadraticSurrogate surrogate_distance_lb(const Point& anchor, const Point& other) {
  const Point diff = anchor - other;
  return {anchor, diff.squaredNorm(), 2.0 * diff, 0.0, BoundSense::Lower};
}

/// Linear minorant of log2(1 + 1/(alpha beta)) at (alpha_t, beta_t).
inline double rate_surrogate_theta(double alpha, double beta, double alpha_t, double beta_t) {
  if (!(alpha_t > 0.0) || !(beta_t > 0.0))
    throw std::invalid_argument("rate_surrogate_theta: anchors must be positive");
  const double log2e = std::numbers::log2e;
  const double base = std::log2(1.0 + 1.0 / (alpha_t * beta_t));
  const double ca = log2e / (alpha_t + alpha_t * alpha_t * beta_t);
  const double cb = log2e / (beta_t + beta_t * beta_t * alpha_t);
  return base - ca * (alpha - alpha_t) - cb * (beta - beta_t);
}

/// Coefficients (base, d/dalpha, d/dbeta) of the linear minorant, for the
/// problem builders.
struct ThetaCoefficients {
  double base;
  double d_alpha;
  double d_beta;
};

inline ThetaCoefficients rate_surrogate_coefficients(double alpha_t, double beta_t) {
  const double log2e = std::numbers::log2e;
  ThetaCoefficients c{};
  c.d_alpha = -log2e / (alpha_t + alpha_t * alpha_t * beta_t);
  c.d_beta = -log2e / (beta_t + beta_t * beta_t * alpha_t);
  c.base = std::log2(1.0 + 1.0 / (alpha_t * beta_t)) - c.d_alpha * alpha_t - c.d_beta * beta_t;
  return c;
}

}  // namespace manoma

#endif  // MANOMA_FRCALC_HPP
