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

// Small dense conic solver.
//
// Problems are assembled with ConicProblem (variables, affine expressions and
// cone memberships) and lowered to the standard form
//
//   minimize    c^T x
//   subject to  G x + s = h,   A x = b,   s in K
//
// where K is a product of a nonnegative orthant, second-order cones and
// positive semidefinite cones (stored as svec: lower triangle, column-major,
// off-diagonals scaled by sqrt(2)). The solver is a homogeneous self-dual
// primal-dual interior point method with Nesterov-Todd scaling and a Mehrotra
// predictor-corrector, working on dense matrices.

#ifndef MANOMA_CONIC_HPP
#define MANOMA_CONIC_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace manoma {

// ---------------------------------------------------------------------------
// Modeling layer.

/// a^T x + a0 over the problem variables.
struct AffineExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  AffineExpr() = default;
  AffineExpr(double c) : constant(c) {}  // NOLINT(google-explicit-constructor)

  static AffineExpr var(int index, double coef = 1.0) {
    AffineExpr e;
    e.terms.emplace_back(index, coef);
    return e;
  }

  AffineExpr& add(int index, double coef) {
    if (coef != 0.0) terms.emplace_back(index, coef);
    return *this;
  }

  AffineExpr& operator+=(const AffineExpr& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    constant += o.constant;
    return *this;
  }
  AffineExpr& operator-=(const AffineExpr& o) { return *this += o * -1.0; }
  AffineExpr& operator*=(double f) {
    for (auto& t : terms) t.second *= f;
    constant *= f;
    return *this;
  }

  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator*(AffineExpr a, double f) { return a *= f; }
  friend AffineExpr operator*(double f, AffineExpr a) { return a *= f; }
  friend AffineExpr operator-(AffineExpr a) { return a *= -1.0; }

  [[nodiscard]] double eval(const Eigen::VectorXd& x) const {
    double v = constant;
    for (const auto& [i, c] : terms) v += c * x[i];
    return v;
  }
};

enum class ConicStatus { Optimal, Infeasible, Unbounded, MaxIter, NumericalFailure };

inline const char* to_string(ConicStatus s) {
  switch (s) {
    case ConicStatus::Optimal: return "optimal";
    case ConicStatus::Infeasible: return "infeasible";
    case ConicStatus::Unbounded: return "unbounded";
    case ConicStatus::MaxIter: return "max-iter";
    case ConicStatus::NumericalFailure: return "numerical-failure";
  }
  return "unknown";
}

struct ConeDims {
  int l = 0;
  std::vector<int> q;  // second-order cone sizes
  std::vector<int> s;  // PSD orders

  static int svec_size(int p) { return p * (p + 1) / 2; }

  [[nodiscard]] int rows() const {
    int r = l;
    for (int n : q) r += n;
    for (int p : s) r += svec_size(p);
    return r;
  }

  [[nodiscard]] int degree() const {
    int d = l + static_cast<int>(q.size());
    for (int p : s) d += p;
    return d;
  }
};

/// Canonical standard-form data.
struct StandardForm {
  Eigen::VectorXd c;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  ConeDims dims;
};

class ConicProblem {
 public:
  enum class Sense { Minimize, Maximize };

  int add_variable(std::string name = {}) {
    if (name.empty()) name = "x" + std::to_string(num_vars_);
    names_.push_back(std::move(name));
    return num_vars_++;
  }

  int add_variables(int n, const std::string& prefix = {}) {
    const int first = num_vars_;
    for (int j = 0; j < n; ++j) add_variable(prefix.empty() ? std::string{} : prefix + std::to_string(j));
    return first;
  }

  [[nodiscard]] int num_variables() const { return num_vars_; }
  [[nodiscard]] const std::string& name(int j) const { return names_[static_cast<std::size_t>(j)]; }

  void set_objective(AffineExpr e, Sense sense) {
    objective_ = std::move(e);
    sense_ = sense;
  }
  void maximize(AffineExpr e) { set_objective(std::move(e), Sense::Maximize); }
  void minimize(AffineExpr e) { set_objective(std::move(e), Sense::Minimize); }

  [[nodiscard]] const AffineExpr& objective() const { return objective_; }
  [[nodiscard]] Sense sense() const { return sense_; }

  /// e(x) >= 0
  void add_nonnegative(AffineExpr e) { nonneg_.push_back(std::move(e)); }
  /// lhs(x) <= rhs(x)
  void add_less_equal(const AffineExpr& lhs, const AffineExpr& rhs) { add_nonnegative(rhs - lhs); }

  /// rows[0] >= || rows[1..] ||
  void add_soc(std::vector<AffineExpr> rows) {
    if (rows.empty()) throw std::invalid_argument("ConicProblem::add_soc: empty cone");
    soc_.push_back(std::move(rows));
  }

  /// Symmetric matrix of order p, given by its lower triangle in column-major
  /// order (entry (i, j), i >= j), constrained to be positive semidefinite.
  void add_psd(int order, std::vector<AffineExpr> lower) {
    if (static_cast<int>(lower.size()) != ConeDims::svec_size(order))
      throw std::invalid_argument("ConicProblem::add_psd: wrong number of entries");
    psd_.push_back({order, std::move(lower)});
  }

  /// e(x) == 0
  void add_equality(AffineExpr e) { eq_.push_back(std::move(e)); }

  [[nodiscard]] int num_nonnegative() const { return static_cast<int>(nonneg_.size()); }
  [[nodiscard]] int num_soc() const { return static_cast<int>(soc_.size()); }
  [[nodiscard]] int num_psd() const { return static_cast<int>(psd_.size()); }
  [[nodiscard]] int num_equalities() const { return static_cast<int>(eq_.size()); }

  [[nodiscard]] StandardForm to_standard() const {
    StandardForm f;
    const int n = num_vars_;
    f.dims.l = num_nonnegative();
    for (const auto& blk : soc_) f.dims.q.push_back(static_cast<int>(blk.size()));
    for (const auto& blk : psd_) f.dims.s.push_back(blk.order);
    const int m = f.dims.rows();
    f.c = Eigen::VectorXd::Zero(n);
    const double sgn = sense_ == Sense::Maximize ? -1.0 : 1.0;
    for (const auto& [j, v] : objective_.terms) f.c[check(j)] += sgn * v;
    f.G = Eigen::MatrixXd::Zero(m, n);
    f.h = Eigen::VectorXd::Zero(m);
    int row = 0;
    // s = h - G x = e(x)  =>  G row = -a, h = a0
    auto put = [&](const AffineExpr& e, double scale) {
      for (const auto& [j, v] : e.terms) f.G(row, check(j)) -= scale * v;
      f.h[row] = scale * e.constant;
      ++row;
    };
    for (const auto& e : nonneg_) put(e, 1.0);
    for (const auto& blk : soc_)
      for (const auto& e : blk) put(e, 1.0);
    for (const auto& blk : psd_) {
      std::size_t k = 0;
      for (int j = 0; j < blk.order; ++j)
        for (int i = j; i < blk.order; ++i) put(blk.lower[k++], i == j ? 1.0 : std::sqrt(2.0));
    }
    const int p = num_equalities();
    f.A = Eigen::MatrixXd::Zero(p, n);
    f.b = Eigen::VectorXd::Zero(p);
    for (int r = 0; r < p; ++r) {
      const auto& e = eq_[static_cast<std::size_t>(r)];
      for (const auto& [j, v] : e.terms) f.A(r, check(j)) += v;
      f.b[r] = -e.constant;
    }
    return f;
  }

  /// Plain-text listing of the canonical form.
  void dump(std::ostream& os) const {
    const auto f = to_standard();
    os << std::setprecision(17);
    os << "# conic problem (standard form: minimize c'x s.t. Gx + s = h, Ax = b, s in K)\n";
    os << "sense " << (sense_ == Sense::Maximize ? "maximize" : "minimize") << "\n";
    os << "objective_constant " << objective_.constant << "\n";
    os << "variables " << num_vars_ << "\n";
    for (int j = 0; j < num_vars_; ++j) os << "  " << j << " " << names_[static_cast<std::size_t>(j)] << "\n";
    os << "cones l=" << f.dims.l;
    os << " q=[";
    for (std::size_t t = 0; t < f.dims.q.size(); ++t) os << (t ? "," : "") << f.dims.q[t];
    os << "] s=[";
    for (std::size_t t = 0; t < f.dims.s.size(); ++t) os << (t ? "," : "") << f.dims.s[t];
    os << "]\n";
    auto sparse_row = [&os](const Eigen::Ref<const Eigen::RowVectorXd>& r) {
      for (Eigen::Index j = 0; j < r.size(); ++j)
        if (r[j] != 0.0) os << " " << j << ":" << r[j];
    };
    os << "c";
    sparse_row(f.c.transpose());
    os << "\n";
    for (Eigen::Index r = 0; r < f.G.rows(); ++r) {
      os << "G " << r << " h=" << f.h[r] << " |";
      sparse_row(f.G.row(r));
      os << "\n";
    }
    for (Eigen::Index r = 0; r < f.A.rows(); ++r) {
      os << "A " << r << " b=" << f.b[r] << " |";
      sparse_row(f.A.row(r));
      os << "\n";
    }
  }

 private:
  struct PsdBlock {
    int order;
    std::vector<AffineExpr> lower;
  };

  [[nodiscard]] Eigen::Index check(int j) const {
    if (j < 0 || j >= num_vars_) throw std::out_of_range("ConicProblem: unknown variable index");
    return j;
  }

  int num_vars_ = 0;
  std::vector<std::string> names_;
  AffineExpr objective_;
  Sense sense_ = Sense::Minimize;
  std::vector<AffineExpr> nonneg_;
  std::vector<std::vector<AffineExpr>> soc_;
  std::vector<PsdBlock> psd_;
  std::vector<AffineExpr> eq_;
};

struct ConicOptions {
  double feas_tol = 1e-7;
  double gap_tol = 1e-7;
  int max_iter = 100;
};

struct ConicSolution {
  ConicStatus status = ConicStatus::NumericalFailure;
  Eigen::VectorXd x;  // primal point, in problem variable order
  Eigen::VectorXd y;  // equality multipliers
  Eigen::VectorXd z;  // cone multipliers
  Eigen::VectorXd s;  // cone slacks
  double objective = 0.0;  // in the problem's own sense, constant included
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;

  [[nodiscard]] bool optimal() const { return status == ConicStatus::Optimal; }
  [[nodiscard]] double value(const AffineExpr& e) const { return e.eval(x); }
  [[nodiscard]] double value(int var) const { return x[var]; }
};

// ---------------------------------------------------------------------------
// Cone algebra.

namespace cone {

inline void svec_to_mat(const double* v, int p, Eigen::MatrixXd& X) {
  X.resize(p, p);
  int k = 0;
  const double r2 = std::sqrt(0.5);
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i) {
      const double e = i == j ? v[k] : v[k] * r2;
      X(i, j) = e;
      X(j, i) = e;
      ++k;
    }
}

inline void mat_to_svec(const Eigen::MatrixXd& X, double* v) {
  const auto p = static_cast<int>(X.rows());
  int k = 0;
  const double r2 = std::sqrt(2.0);
  for (int j = 0; j < p; ++j)
    for (int i = j; i < p; ++i) {
      v[k] = i == j ? X(i, j) : r2 * 0.5 * (X(i, j) + X(j, i));
      ++k;
    }
}

inline Eigen::VectorXd identity(const ConeDims& d) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(d.rows());
  int off = 0;
  e.head(d.l).setOnes();
  off += d.l;
  for (int n : d.q) {
    e[off] = 1.0;
    off += n;
  }
  for (int p : d.s) {
    int k = 0;
    for (int j = 0; j < p; ++j)
      for (int i = j; i < p; ++i) {
        if (i == j) e[off + k] = 1.0;
        ++k;
      }
    off += ConeDims::svec_size(p);
  }
  return e;
}

/// Largest t with x - t e still in the cone (negative when x is outside).
inline double min_margin(const ConeDims& d, const Eigen::VectorXd& x) {
  double m = std::numeric_limits<double>::infinity();
  int off = 0;
  if (d.l > 0) m = std::min(m, x.head(d.l).minCoeff());
  off += d.l;
  for (int n : d.q) {
    m = std::min(m, x[off] - x.segment(off + 1, n - 1).norm());
    off += n;
  }
  Eigen::MatrixXd X;
  for (int p : d.s) {
    svec_to_mat(x.data() + off, p, X);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X, Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues()[0]);
    off += ConeDims::svec_size(p);
  }
  return m;
}

/// Jordan product u o v.
inline Eigen::VectorXd product(const ConeDims& d, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  Eigen::VectorXd w(u.size());
  int off = 0;
  w.head(d.l) = u.head(d.l).cwiseProduct(v.head(d.l));
  off += d.l;
  for (int n : d.q) {
    w[off] = u.segment(off, n).dot(v.segment(off, n));
    w.segment(off + 1, n - 1) = u[off] * v.segment(off + 1, n - 1) + v[off] * u.segment(off + 1, n - 1);
    off += n;
  }
  Eigen::MatrixXd U, V;
  for (int p : d.s) {
    svec_to_mat(u.data() + off, p, U);
    svec_to_mat(v.data() + off, p, V);
    const Eigen::MatrixXd P = 0.5 * (U * V + V * U);
    mat_to_svec(P, w.data() + off);
    off += ConeDims::svec_size(p);
  }
  return w;
}

/// Solves lambda o x = r for x, where lambda is a scaled point: PSD blocks of
/// lambda are diagonal.
inline Eigen::VectorXd inverse_product(const ConeDims& d, const Eigen::VectorXd& lambda,
                                       const Eigen::VectorXd& r) {
  Eigen::VectorXd x(r.size());
  int off = 0;
  x.head(d.l) = r.head(d.l).cwiseQuotient(lambda.head(d.l));
  off += d.l;
  for (int n : d.q) {
    const double l0 = lambda[off];
    const auto l1 = lambda.segment(off + 1, n - 1);
    const double r0 = r[off];
    const auto r1 = r.segment(off + 1, n - 1);
    const double x0 = (l0 * r0 - l1.dot(r1)) / (l0 * l0 - l1.squaredNorm());
    x[off] = x0;
    x.segment(off + 1, n - 1) = (r1 - x0 * l1) / l0;
    off += n;
  }
  for (int p : d.s) {
    int k = 0;
    std::vector<double> diag(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j)
      for (int i = j; i < p; ++i) {
        if (i == j) diag[static_cast<std::size_t>(i)] = lambda[off + k];
        ++k;
      }
    k = 0;
    for (int j = 0; j < p; ++j)
      for (int i = j; i < p; ++i) {
        x[off + k] = 2.0 * r[off + k] / (diag[static_cast<std::size_t>(i)] + diag[static_cast<std::size_t>(j)]);
        ++k;
      }
    off += ConeDims::svec_size(p);
  }
  return x;
}

/// Largest step a with lambda + a*dx inside the cone (infinity if unbounded).
/// lambda must be a scaled point (diagonal PSD blocks).
inline double max_step(const ConeDims& d, const Eigen::VectorXd& lambda, const Eigen::VectorXd& dx) {
  double a = std::numeric_limits<double>::infinity();
  int off = 0;
  for (int i = 0; i < d.l; ++i)
    if (dx[i] < 0.0) a = std::min(a, -lambda[i] / dx[i]);
  off += d.l;
  for (int n : d.q) {
    // q(t) = (l + t d)^T J (l + t d) = qa t^2 + qb t + qc, qc > 0.
    const double l0 = lambda[off];
    const double d0 = dx[off];
    const auto l1 = lambda.segment(off + 1, n - 1);
    const auto d1 = dx.segment(off + 1, n - 1);
    const double qa = d0 * d0 - d1.squaredNorm();
    const double qb = 2.0 * (l0 * d0 - l1.dot(d1));
    const double qc = l0 * l0 - l1.squaredNorm();
    double t = std::numeric_limits<double>::infinity();
    if (std::abs(qa) < 1e-300) {
      if (qb < 0.0) t = -qc / qb;
    } else {
      const double disc = qb * qb - 4.0 * qa * qc;
      if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        const double q = -0.5 * (qb + (qb >= 0.0 ? sq : -sq));
        const double t1 = q / qa;
        const double t2 = q != 0.0 ? qc / q : std::numeric_limits<double>::infinity();
        for (double r : {t1, t2})
          if (r > 0.0) t = std::min(t, r);
      }
    }
    a = std::min(a, t);
    off += n;
  }
  Eigen::MatrixXd D;
  for (int p : d.s) {
    svec_to_mat(dx.data() + off, p, D);
    Eigen::VectorXd isq(p);
    int k = 0;
    for (int j = 0; j < p; ++j)
      for (int i = j; i < p; ++i) {
        if (i == j) isq[i] = 1.0 / std::sqrt(lambda[off + k]);
        ++k;
      }
    const Eigen::MatrixXd S = isq.asDiagonal() * D * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    const double mn = es.eigenvalues()[0];
    if (mn < 0.0) a = std::min(a, -1.0 / mn);
    off += ConeDims::svec_size(p);
  }
  return a;
}

/// Nesterov-Todd scaling W for a pair (s, z) of interior points, with
/// lambda = W z = W^{-T} s.
class NtScaling {
 public:
  enum class Op { W, WT, WInv, WInvT };

  bool compute(const ConeDims& d, const Eigen::VectorXd& s, const Eigen::VectorXd& z) {
    dims_ = d;
    lambda_.resize(s.size());
    int off = 0;
    d_.resize(d.l);
    for (int i = 0; i < d.l; ++i) {
      if (!(s[i] > 0.0) || !(z[i] > 0.0)) return false;
      d_[i] = std::sqrt(s[i] / z[i]);
      lambda_[i] = std::sqrt(s[i] * z[i]);
    }
    off += d.l;
    beta_.clear();
    v_.clear();
    for (int n : d.q) {
      const auto sb = s.segment(off, n);
      const auto zb = z.segment(off, n);
      const double ns2 = sb[0] * sb[0] - sb.tail(n - 1).squaredNorm();
      const double nz2 = zb[0] * zb[0] - zb.tail(n - 1).squaredNorm();
      if (!(ns2 > 0.0) || !(nz2 > 0.0) || !(sb[0] > 0.0) || !(zb[0] > 0.0)) return false;
      const double ns = std::sqrt(ns2);
      const double nz = std::sqrt(nz2);
      Eigen::VectorXd sn = sb / ns;
      Eigen::VectorXd zn = zb / nz;
      const double gamma = std::sqrt((1.0 + sn.dot(zn)) / 2.0);
      Eigen::VectorXd w(n);
      w[0] = (sn[0] + zn[0]) / (2.0 * gamma);
      w.tail(n - 1) = (sn.tail(n - 1) - zn.tail(n - 1)) / (2.0 * gamma);
      // Reflection vector v = (w + e) / sqrt(2 (w0 + 1)).
      Eigen::VectorXd v = w;
      v[0] += 1.0;
      v /= std::sqrt(2.0 * (w[0] + 1.0));
      beta_.push_back(std::sqrt(ns / nz));
      v_.push_back(std::move(v));
      off += n;
    }
    r_.clear();
    rinv_.clear();
    Eigen::MatrixXd S, Z;
    for (int p : d.s) {
      svec_to_mat(s.data() + off, p, S);
      svec_to_mat(z.data() + off, p, Z);
      Eigen::LLT<Eigen::MatrixXd> ls(S), lz(Z);
      if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
      const Eigen::MatrixXd Ls = ls.matrixL();
      const Eigen::MatrixXd Lz = lz.matrixL();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lz.transpose() * Ls, Eigen::ComputeFullU | Eigen::ComputeFullV);
      const Eigen::VectorXd lam = svd.singularValues();
      if (!(lam.minCoeff() > 0.0)) return false;
      const Eigen::VectorXd isq = lam.cwiseSqrt().cwiseInverse();
      Eigen::MatrixXd R = Ls * svd.matrixV() * isq.asDiagonal();
      Eigen::MatrixXd Ri = lam.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
                           Ls.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(p, p));
      r_.push_back(std::move(R));
      rinv_.push_back(std::move(Ri));
      int k = 0;
      for (int j = 0; j < p; ++j)
        for (int i = j; i < p; ++i) {
          lambda_[off + k] = i == j ? lam[i] : 0.0;
          ++k;
        }
      off += ConeDims::svec_size(p);
    }
    // The SOC part of lambda is W z.
    off = d.l;
    for (std::size_t t = 0; t < d.q.size(); ++t) {
      const int n = d.q[t];
      lambda_.segment(off, n) = apply_soc(t, z.segment(off, n), Op::W);
      off += n;
    }
    return lambda_.allFinite();
  }

  [[nodiscard]] const Eigen::VectorXd& lambda() const { return lambda_; }

  [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& x, Op op) const {
    Eigen::VectorXd y(x.size());
    int off = 0;
    const int l = dims_.l;
    if (op == Op::W || op == Op::WT)
      y.head(l) = d_.cwiseProduct(x.head(l));
    else
      y.head(l) = x.head(l).cwiseQuotient(d_);
    off += l;
    for (std::size_t t = 0; t < dims_.q.size(); ++t) {
      const int n = dims_.q[t];
      y.segment(off, n) = apply_soc(t, x.segment(off, n), op);
      off += n;
    }
    Eigen::MatrixXd X;
    for (std::size_t t = 0; t < dims_.s.size(); ++t) {
      const int p = dims_.s[t];
      svec_to_mat(x.data() + off, p, X);
      const auto& R = r_[t];
      const auto& Ri = rinv_[t];
      Eigen::MatrixXd Y;
      switch (op) {
        case Op::W: Y = R.transpose() * X * R; break;
        case Op::WT: Y = R * X * R.transpose(); break;
        case Op::WInv: Y = Ri.transpose() * X * Ri; break;
        case Op::WInvT: Y = Ri * X * Ri.transpose(); break;
      }
      mat_to_svec(Y, y.data() + off);
      off += ConeDims::svec_size(p);
    }
    return y;
  }

  /// Applies op to every column of M.
  [[nodiscard]] Eigen::MatrixXd apply_columns(const Eigen::MatrixXd& M, Op op) const {
    Eigen::MatrixXd out(M.rows(), M.cols());
    Eigen::VectorXd col;
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      col = M.col(j);
      out.col(j) = apply(col, op);
    }
    return out;
  }

 private:
  // W = beta (2 v v^T - J), W^{-1} = (1/beta)(2 J v v^T J - J); both symmetric.
  [[nodiscard]] Eigen::VectorXd apply_soc(std::size_t t, const Eigen::VectorXd& x, Op op) const {
    const auto& v = v_[t];
    const double beta = beta_[t];
    Eigen::VectorXd Jx = x;
    Jx.tail(x.size() - 1) *= -1.0;
    if (op == Op::W || op == Op::WT) return beta * (2.0 * v.dot(x) * v - Jx);
    Eigen::VectorXd Jv = v;
    Jv.tail(v.size() - 1) *= -1.0;
    return (2.0 * Jv.dot(x) * Jv - Jx) / beta;
  }

  ConeDims dims_;
  Eigen::VectorXd lambda_;
  Eigen::VectorXd d_;
  std::vector<double> beta_;
  std::vector<Eigen::VectorXd> v_;
  std::vector<Eigen::MatrixXd> r_;
  std::vector<Eigen::MatrixXd> rinv_;
};

}  // namespace cone

// ---------------------------------------------------------------------------
// Interior point method.

namespace detail {

// Solves  A^T dy + G^T dz = rx,  A dx = ry,  G dx - W^T W dz = rz
// for a fixed scaling W. Without equality constraints the reduced system
// (G~^T G~) dx = ... with G~ = W^{-T} G is solved through a QR factorization
// of G~, which avoids squaring its condition number. Every solve is refined
// against the unreduced system.
class KktSolver {
 public:
  bool factor(const StandardForm& f, const cone::NtScaling& w) {
    f_ = &f;
    w_ = &w;
    Gt_ = w.apply_columns(f.G, cone::NtScaling::Op::WInvT);
    const auto n = f.G.cols();
    const auto p = f.A.rows();
    if (p == 0) {
      qr_.compute(Gt_);
      R_ = qr_.matrixQR().topRows(n).triangularView<Eigen::Upper>();
      const double mx = R_.diagonal().cwiseAbs().maxCoeff();
      if (!(mx > 0.0)) return false;
      // Guard exactly rank-deficient columns.
      for (Eigen::Index j = 0; j < n; ++j)
        if (std::abs(R_(j, j)) < 1e-14 * mx) R_(j, j) = 1e-14 * mx;
      return R_.allFinite();
    }
    // [H + A^T A, A^T; A, 0]: same solution, better-conditioned leading block.
    K_ = Eigen::MatrixXd::Zero(n + p, n + p);
    K_.topLeftCorner(n, n) = Gt_.transpose() * Gt_ + f.A.transpose() * f.A;
    K_.topRightCorner(n, p) = f.A.transpose();
    K_.bottomLeftCorner(p, n) = f.A;
    lu_.compute(K_);
    return K_.allFinite();
  }

  // Returns false on a non-finite result.
  bool solve(const Eigen::VectorXd& rx, const Eigen::VectorXd& ry, const Eigen::VectorXd& rz,
             Eigen::VectorXd& dx, Eigen::VectorXd& dy, Eigen::VectorXd& dz, int refine = 2) const {
    using Op = cone::NtScaling::Op;
    const auto& f = *f_;
    const auto p = f.A.rows();
    solve_once(rx, ry, rz, dx, dy, dz);
    Eigen::VectorXd ex, ey, ez;
    for (int it = 0; it < refine; ++it) {
      Eigen::VectorXd e1 = rx - f.G.transpose() * dz;
      if (p > 0) e1 -= f.A.transpose() * dy;
      const Eigen::VectorXd e2 = p > 0 ? Eigen::VectorXd(ry - f.A * dx) : Eigen::VectorXd();
      const Eigen::VectorXd e3 = rz - f.G * dx + w_->apply(w_->apply(dz, Op::W), Op::WT);
      solve_once(e1, e2, e3, ex, ey, ez);
      dx += ex;
      dz += ez;
      if (p > 0) dy += ey;
    }
    return dx.allFinite() && dz.allFinite() && (p == 0 || dy.allFinite());
  }

 private:
  void solve_once(const Eigen::VectorXd& rx, const Eigen::VectorXd& ry, const Eigen::VectorXd& rz,
                  Eigen::VectorXd& dx, Eigen::VectorXd& dy, Eigen::VectorXd& dz) const {
    const auto& f = *f_;
    const auto n = f.G.cols();
    const auto p = f.A.rows();
    const Eigen::VectorXd rzt = w_->apply(rz, cone::NtScaling::Op::WInvT);
    Eigen::VectorXd rhs = rx + Gt_.transpose() * rzt;
    if (p == 0) {
      const Eigen::VectorXd t = R_.transpose().triangularView<Eigen::Lower>().solve(rhs);
      dx = R_.triangularView<Eigen::Upper>().solve(t);
      dy.resize(0);
    } else {
      Eigen::VectorXd full(n + p);
      full.head(n) = rhs + f.A.transpose() * ry;
      full.tail(p) = ry;
      const Eigen::VectorXd sol = lu_.solve(full);
      dx = sol.head(n);
      dy = sol.tail(p);
    }
    const Eigen::VectorXd wdz = Gt_ * dx - rzt;
    dz = w_->apply(wdz, cone::NtScaling::Op::WInv);
  }

  const StandardForm* f_ = nullptr;
  const cone::NtScaling* w_ = nullptr;
  Eigen::MatrixXd Gt_;
  Eigen::HouseholderQR<Eigen::MatrixXd> qr_;
  Eigen::MatrixXd R_;
  Eigen::MatrixXd K_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

}  // namespace detail

inline ConicSolution solve_standard(const StandardForm& f, const ConicOptions& opt = {}) {
  using Op = cone::NtScaling::Op;
  const auto& d = f.dims;
  const auto n = f.G.cols();
  const auto m = f.G.rows();
  const auto p = f.A.rows();
  ConicSolution sol;
  if (m != d.rows() || f.h.size() != m || f.c.size() != n || f.A.cols() != n || f.b.size() != p)
    throw std::invalid_argument("solve_standard: inconsistent dimensions");

  const Eigen::VectorXd e = cone::identity(d);
  const double resx0 = std::max(1.0, f.c.norm());
  const double resy0 = std::max(1.0, f.b.norm());
  const double resz0 = std::max(1.0, f.h.norm());
  const double degree = d.degree();

  Eigen::VectorXd x, y, z, s;
  // Starting point: least-squares primal and minimum-norm dual with W = I.
  {
    cone::NtScaling ident;
    const Eigen::VectorXd ones = e;
    // Scaling at (e, e) is the identity.
    if (!ident.compute(d, ones, ones)) return sol;
    detail::KktSolver kkt;
    if (!kkt.factor(f, ident)) return sol;
    Eigen::VectorXd xx, yy, zz;
    if (!kkt.solve(Eigen::VectorXd::Zero(n), f.b, f.h, xx, yy, zz)) return sol;
    x = xx;
    s = -zz;
    if (!kkt.solve(-f.c, Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(m), xx, yy, zz)) return sol;
    y = yy;
    z = zz;
    const double ts = -cone::min_margin(d, s);
    const double tz = -cone::min_margin(d, z);
    if (ts >= -1e-8 * std::max(1.0, s.norm())) s += (1.0 + ts) * e;
    if (tz >= -1e-8 * std::max(1.0, z.norm())) z += (1.0 + tz) * e;
  }
  if (p == 0) y.resize(0);
  double tau = 1.0;
  double kappa = 1.0;

  cone::NtScaling W;
  detail::KktSolver kkt;
  for (int iter = 0; iter <= opt.max_iter; ++iter) {
    sol.iterations = iter;
    // Residuals of the homogeneous embedding.
    Eigen::VectorXd rx = f.G.transpose() * z + f.c * tau;
    if (p > 0) rx += f.A.transpose() * y;
    Eigen::VectorXd ry = f.b * tau;
    if (p > 0) ry -= f.A * x;
    const Eigen::VectorXd rz = s + f.G * x - f.h * tau;
    const double cx = f.c.dot(x);
    const double by = p > 0 ? f.b.dot(y) : 0.0;
    const double hz = f.h.dot(z);
    const double rt = kappa + cx + by + hz;

    const double pcost = cx / tau;
    const double dcost = -(by + hz) / tau;
    const double gap = s.dot(z) / (tau * tau);
    double relgap = std::numeric_limits<double>::infinity();
    if (pcost < 0.0)
      relgap = gap / -pcost;
    else if (dcost > 0.0)
      relgap = gap / dcost;
    const double pres = std::max(ry.norm() / resy0, rz.norm() / resz0) / tau;
    const double dres = rx.norm() / resx0 / tau;
    sol.primal_residual = pres;
    sol.dual_residual = dres;
    sol.gap = gap;

    if (!x.allFinite() || !z.allFinite() || !s.allFinite() || !std::isfinite(tau)) {
      sol.status = ConicStatus::NumericalFailure;
      return sol;
    }

    if (pres <= opt.feas_tol && dres <= opt.feas_tol && (gap <= opt.gap_tol || relgap <= opt.gap_tol)) {
      sol.status = ConicStatus::Optimal;
      sol.x = x / tau;
      sol.y = y / tau;
      sol.z = z / tau;
      sol.s = s / tau;
      sol.objective = pcost;
      return sol;
    }
    // Infeasibility certificates.
    if (hz + by < 0.0) {
      Eigen::VectorXd cert = f.G.transpose() * z;
      if (p > 0) cert += f.A.transpose() * y;
      if (cert.norm() / resx0 / -(hz + by) <= opt.feas_tol) {
        sol.status = ConicStatus::Infeasible;
        sol.y = y / -(hz + by);
        sol.z = z / -(hz + by);
        sol.x = Eigen::VectorXd::Zero(n);
        return sol;
      }
    }
    if (cx < 0.0) {
      const double ax = p > 0 ? (f.A * x).norm() : 0.0;
      const double gxs = (f.G * x + s).norm();
      if (std::max(ax / resy0, gxs / resz0) / -cx <= opt.feas_tol) {
        sol.status = ConicStatus::Unbounded;
        sol.x = x / -cx;
        sol.s = s / -cx;
        return sol;
      }
    }
    if (iter == opt.max_iter) break;

    if (!W.compute(d, s, z) || !kkt.factor(f, W)) {
      sol.status = ConicStatus::NumericalFailure;
      return sol;
    }
    const Eigen::VectorXd& lambda = W.lambda();
    const double mu = (s.dot(z) + tau * kappa) / (degree + 1.0);

    Eigen::VectorXd x2, y2, z2;
    if (!kkt.solve(-f.c, f.b, f.h, x2, y2, z2)) {
      sol.status = ConicStatus::NumericalFailure;
      return sol;
    }
    const double den = f.c.dot(x2) + (p > 0 ? f.b.dot(y2) : 0.0) + f.h.dot(z2) - kappa / tau;

    const Eigen::VectorXd ll = cone::product(d, lambda, lambda);
    Eigen::VectorXd dsa, dza;
    double dtau_a = 0.0, dkappa_a = 0.0;
    double sigma = 0.0;
    bool ok = true;
    for (int pass = 0; pass < 2 && ok; ++pass) {
      const bool affine = pass == 0;
      const double eta = affine ? 1.0 : 1.0 - sigma;
      Eigen::VectorXd rc = -ll;
      double rk = -tau * kappa;
      if (!affine) {
        rc += -cone::product(d, dsa, dza) + sigma * mu * e;
        rk += -dtau_a * dkappa_a + sigma * mu;
      }
      const Eigen::VectorXd lrc = cone::inverse_product(d, lambda, rc);
      const Eigen::VectorXd rhs_z = -eta * rz - W.apply(lrc, Op::WT);
      Eigen::VectorXd x1, y1, z1;
      if (!kkt.solve(-eta * rx, eta * ry, rhs_z, x1, y1, z1)) {
        ok = false;
        break;
      }
      const double num =
          -eta * rt - rk / tau - (f.c.dot(x1) + (p > 0 ? f.b.dot(y1) : 0.0) + f.h.dot(z1));
      const double dtau = num / den;
      const Eigen::VectorXd dx = x1 + dtau * x2;
      const Eigen::VectorXd dy = p > 0 ? Eigen::VectorXd(y1 + dtau * y2) : Eigen::VectorXd();
      const Eigen::VectorXd dz = z1 + dtau * z2;
      const double dkappa = (rk - kappa * dtau) / tau;
      const Eigen::VectorXd dzt = W.apply(dz, Op::W);
      const Eigen::VectorXd dst = lrc - dzt;

      double amax = std::min(cone::max_step(d, lambda, dst), cone::max_step(d, lambda, dzt));
      if (dtau < 0.0) amax = std::min(amax, -tau / dtau);
      if (dkappa < 0.0) amax = std::min(amax, -kappa / dkappa);
      if (!std::isfinite(dtau) || !dx.allFinite()) {
        ok = false;
        break;
      }
      if (affine) {
        const double a = std::min(1.0, amax);
        sigma = std::pow(1.0 - a, 3);
        dsa = dst;
        dza = dzt;
        dtau_a = dtau;
        dkappa_a = dkappa;
      } else {
        const double a = std::min(1.0, 0.99 * amax);
        x += a * dx;
        if (p > 0) y += a * dy;
        z += a * dz;
        s += a * W.apply(dst, Op::WT);
        tau += a * dtau;
        kappa += a * dkappa;
      }
    }
    if (!ok) {
      sol.status = ConicStatus::NumericalFailure;
      return sol;
    }
  }
  sol.status = ConicStatus::MaxIter;
  sol.x = x / tau;
  sol.y = y / tau;
  sol.z = z / tau;
  sol.s = s / tau;
  sol.objective = f.c.dot(x) / tau;
  return sol;
}

/// Solves a modeled problem. The returned objective is in the problem's own
/// sense and includes the objective constant.
inline ConicSolution solve_conic(const ConicProblem& prob, const ConicOptions& opt = {}) {
  auto sol = solve_standard(prob.to_standard(), opt);
  if (sol.x.size() == prob.num_variables()) {
    sol.objective = prob.objective().eval(sol.x);
  }
  return sol;
}

}  // namespace manoma

#endif  // MANOMA_CONIC_HPP
