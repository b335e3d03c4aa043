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

#ifndef MANOMA_RATES_HPP
#define MANOMA_RATES_HPP

#include "manoma/channel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace manoma {

/// Binary K x K decoding indicator matrix, indexed in decoding order.
/// Entry (k, i) = 1 means the i-th decoded user decodes the signal of the
/// k-th decoded user. Upper triangular with unit diagonal by construction.
class DecodingIndicatorMatrix {
 public:
  DecodingIndicatorMatrix() = default;

  explicit DecodingIndicatorMatrix(int num_users)
      : k_(num_users), bits_(static_cast<std::size_t>(num_users * num_users), 0) {
    if (num_users < 1) throw std::invalid_argument("DecodingIndicatorMatrix: K must be >= 1");
    for (int k = 0; k < k_; ++k) bits_[idx(k, k)] = 1;
  }

  /// Builds from a dense 0/1 matrix; rejects anything that is not upper
  /// triangular with a unit diagonal.
  static DecodingIndicatorMatrix from_dense(const std::vector<std::vector<int>>& rows) {
    const int K = static_cast<int>(rows.size());
    DecodingIndicatorMatrix pi(K);
    for (int k = 0; k < K; ++k) {
      if (static_cast<int>(rows[static_cast<std::size_t>(k)].size()) != K)
        throw std::invalid_argument("DecodingIndicatorMatrix: matrix is not square");
      for (int i = 0; i < K; ++i) {
        const int v = rows[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)];
        if (v != 0 && v != 1)
          throw std::invalid_argument("DecodingIndicatorMatrix: entries must be binary");
        if (k == i && v != 1)
          throw std::invalid_argument("DecodingIndicatorMatrix: diagonal must be 1");
        if (k > i && v != 0)
          throw std::invalid_argument("DecodingIndicatorMatrix: lower triangle must be 0");
        if (k < i) pi.set(k, i, v == 1);
      }
    }
    return pi;
  }

  static DecodingIndicatorMatrix identity(int K) { return DecodingIndicatorMatrix(K); }

  /// Conventional SIC: every user decodes all earlier-ordered signals.
  static DecodingIndicatorMatrix full(int K) {
    DecodingIndicatorMatrix pi(K);
    for (int k = 0; k < K; ++k)
      for (int i = k + 1; i < K; ++i) pi.set(k, i, true);
    return pi;
  }

  [[nodiscard]] int size() const { return k_; }

  [[nodiscard]] bool operator()(int k, int i) const { return bits_[idx(k, i)] != 0; }

  /// Sets a strict-upper-triangle entry.
  void set(int k, int i, bool value) {
    if (!(0 <= k && k < i && i < k_))
      throw std::out_of_range("DecodingIndicatorMatrix::set: only strict upper entries are free");
    bits_[idx(k, i)] = value ? 1 : 0;
  }

  /// Re-checks the structural invariant. Always true for values produced
  /// through the public interface.
  [[nodiscard]] bool valid() const {
    for (int k = 0; k < k_; ++k)
      for (int i = 0; i < k_; ++i) {
        const auto v = bits_[idx(k, i)];
        if (v > 1) return false;
        if (k == i && v != 1) return false;
        if (k > i && v != 0) return false;
      }
    return true;
  }

  bool operator==(const DecodingIndicatorMatrix&) const = default;

  [[nodiscard]] std::vector<std::vector<int>> dense() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(k_), std::vector<int>(static_cast<std::size_t>(k_)));
    for (int k = 0; k < k_; ++k)
      for (int i = 0; i < k_; ++i) out[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = (*this)(k, i);
    return out;
  }

  /// (k, i) pairs whose rate term enters the min of the achievable rate:
  /// all k <= i with entry 1, diagonal included.
  [[nodiscard]] std::vector<std::pair<int, int>> active_pairs() const {
    std::vector<std::pair<int, int>> pairs;
    for (int k = 0; k < k_; ++k)
      for (int i = k; i < k_; ++i)
        if ((*this)(k, i)) pairs.emplace_back(k, i);
    return pairs;
  }

 private:
  [[nodiscard]] std::size_t idx(int k, int i) const { return static_cast<std::size_t>(k * k_ + i); }

  int k_ = 0;
  std::vector<std::uint8_t> bits_;

  friend struct DecodingIndicatorTestAccess;
};

/// Decoding order z: entry k holds the original index of the user decoded k-th.
struct DecodingOrder {
  std::vector<int> users;

  DecodingOrder() = default;
  explicit DecodingOrder(std::vector<int> z) : users(std::move(z)) {
    if (!is_permutation(users)) throw std::invalid_argument("DecodingOrder: not a permutation");
  }

  static DecodingOrder natural(int K) {
    std::vector<int> z(static_cast<std::size_t>(K));
    std::iota(z.begin(), z.end(), 0);
    return DecodingOrder(std::move(z));
  }

  [[nodiscard]] int size() const { return static_cast<int>(users.size()); }

  static bool is_permutation(const std::vector<int>& z) {
    std::vector<char> seen(z.size(), 0);
    for (int v : z) {
      if (v < 0 || v >= static_cast<int>(z.size()) || seen[static_cast<std::size_t>(v)]) return false;
      seen[static_cast<std::size_t>(v)] = 1;
    }
    return true;
  }
};

/// Received-power table: entry (k, i) = |h_i^H w_k|^2, the power of the
/// k-th beam at the i-th user.
inline Eigen::MatrixXd received_power_table(const std::vector<CVector>& h,
                                            const std::vector<CVector>& w) {
  const auto K = static_cast<Eigen::Index>(w.size());
  const auto U = static_cast<Eigen::Index>(h.size());
  Eigen::MatrixXd t(K, U);
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index i = 0; i < U; ++i)
      t(k, i) = std::norm(h[static_cast<std::size_t>(i)].dot(w[static_cast<std::size_t>(k)]));
  return t;
}

// SINR at user i when decoding the signal of user k (k <= i). Interference
// from users j <= k with pi(j, i) = 1 has been cancelled. Assumes the caller
// checked the (k, i) preconditions.
inline double pair_sinr(const Eigen::MatrixXd& power, const DecodingIndicatorMatrix& pi,
                        const std::vector<double>& noise, int k, int i) {
  const int K = pi.size();
  double denom = noise[static_cast<std::size_t>(i)];
  for (int j = 0; j < K; ++j) {
    const bool cancelled = j <= k && pi(j, i);
    if (!cancelled) denom += power(j, i);
  }
  const double num = power(k, i);
  if (num <= 0.0) return 0.0;
  return num / denom;
}

inline double sinr_own(const Eigen::MatrixXd& power, const DecodingIndicatorMatrix& pi,
                       const std::vector<double>& noise, int k) {
  return pair_sinr(power, pi, noise, k, k);
}

inline double sinr_cross(const Eigen::MatrixXd& power, const DecodingIndicatorMatrix& pi,
                         const std::vector<double>& noise, int k, int i) {
  if (k >= i) throw std::invalid_argument("sinr_cross: requires k < i");
  if (!pi(k, i)) throw std::invalid_argument("sinr_cross: user i does not decode user k");
  return pair_sinr(power, pi, noise, k, i);
}

inline double achievable_rate(const Eigen::MatrixXd& power, const DecodingIndicatorMatrix& pi,
                              const std::vector<double>& noise, int k) {
  double r = std::numeric_limits<double>::infinity();
  for (int i = k; i < pi.size(); ++i)
    if (pi(k, i)) r = std::min(r, std::log2(1.0 + pair_sinr(power, pi, noise, k, i)));
  return r;
}

inline std::vector<double> achievable_rates(const Eigen::MatrixXd& power,
                                            const DecodingIndicatorMatrix& pi,
                                            const std::vector<double>& noise) {
  std::vector<double> r(static_cast<std::size_t>(pi.size()));
  for (int k = 0; k < pi.size(); ++k) r[static_cast<std::size_t>(k)] = achievable_rate(power, pi, noise, k);
  return r;
}

inline double sum_rate(const Eigen::MatrixXd& power, const DecodingIndicatorMatrix& pi,
                       const std::vector<double>& noise) {
  double s = 0.0;
  for (int k = 0; k < pi.size(); ++k) s += achievable_rate(power, pi, noise, k);
  return s;
}

// Convenience overloads on raw channels and beams.

inline double sinr_own(const std::vector<CVector>& h, const std::vector<CVector>& w,
                       const DecodingIndicatorMatrix& pi, const std::vector<double>& noise, int k) {
  return sinr_own(received_power_table(h, w), pi, noise, k);
}

inline double sinr_cross(const std::vector<CVector>& h, const std::vector<CVector>& w,
                         const DecodingIndicatorMatrix& pi, const std::vector<double>& noise, int k,
                         int i) {
  return sinr_cross(received_power_table(h, w), pi, noise, k, i);
}

inline double achievable_rate(const std::vector<CVector>& h, const std::vector<CVector>& w,
                              const DecodingIndicatorMatrix& pi, const std::vector<double>& noise,
                              int k) {
  return achievable_rate(received_power_table(h, w), pi, noise, k);
}

inline double sum_rate(const std::vector<CVector>& h, const std::vector<CVector>& w,
                       const DecodingIndicatorMatrix& pi, const std::vector<double>& noise) {
  return sum_rate(received_power_table(h, w), pi, noise);
}

/// Number of users whose rate falls short of the QoS target by more than tol.
inline int qos_violations(const std::vector<double>& rates, double min_rate, double tol = 1e-6) {
  return static_cast<int>(std::count_if(rates.begin(), rates.end(),
                                        [&](double r) { return r < min_rate - tol; }));
}

inline double total_power(const std::vector<CVector>& w) {
  double p = 0.0;
  for (const auto& v : w) p += v.squaredNorm();
  return p;
}

}  // namespace manoma

#endif  // MANOMA_RATES_HPP
