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

#ifndef MANOMA_CHANNEL_HPP
#define MANOMA_CHANNEL_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace manoma {

using cplx = std::complex<double>;
using Point = Eigen::Vector2d;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Thrown when a configuration violates one of its invariants. The message
/// lists every offending field, one per line.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

// System parameters. Every quantity is linear (watts, linear gains, meters);
// logarithmic units are converted at the configuration-file boundary.
struct SystemConfig {
  int num_antennas = 4;
  int num_users = 6;
  int num_paths = 5;
  double wavelength = 0.1;
  double region_side = 0.3;   // 3 wavelengths
  double min_spacing = 0.05;  // half a wavelength
  double max_power = 0.01;    // 10 dBm
  double noise_power = 1e-11; // -80 dBm
  double min_rate = 0.25;
  double pathloss_ref = 1e-3; // -30 dB at 1 m
  double pathloss_exp = 2.8;
  double distance_min = 50.0;
  double distance_max = 100.0;
  double eps_stage_one = 1e-2;
  double eps_stage_two = 1e-2;
  int max_iter_stage_one = 100;
  int max_iter_stage_two = 50;

  // Upper bound on how many points with pairwise spacing D fit in the region.
  [[nodiscard]] long packing_bound() const {
    const long per_side = static_cast<long>(std::ceil(region_side / min_spacing + 1.0));
    return per_side * per_side;
  }

  [[nodiscard]] std::vector<std::string> validation_errors() const {
    std::vector<std::string> errs;
    auto need = [&errs](bool ok, const char* field, const std::string& msg) {
      if (!ok) errs.push_back(std::string(field) + ": " + msg);
    };
    need(num_antennas >= 1, "num_antennas", "must be >= 1");
    need(num_users >= 1, "num_users", "must be >= 1");
    need(num_paths >= 1, "num_paths", "must be >= 1");
    need(std::isfinite(wavelength) && wavelength > 0, "wavelength", "must be > 0");
    need(std::isfinite(region_side) && region_side > 0, "region_side", "must be > 0");
    need(std::isfinite(min_spacing) && min_spacing > 0, "min_spacing", "must be > 0");
    if (region_side > 0 && min_spacing > 0 && num_antennas > packing_bound()) {
      std::ostringstream os;
      os << "packing bound violated: num_antennas=" << num_antennas
         << " exceeds ceil(region_side/min_spacing+1)^2=" << packing_bound();
      errs.push_back("num_antennas: " + os.str());
    }
    need(max_power > 0, "max_power", "must be > 0");
    need(noise_power > 0, "noise_power", "must be > 0");
    need(min_rate >= 0, "min_rate", "must be >= 0");
    need(pathloss_ref > 0, "pathloss_ref", "must be > 0");
    need(std::isfinite(pathloss_exp), "pathloss_exp", "must be finite");
    need(distance_min > 0 && distance_max >= distance_min, "distance_range",
         "need 0 < distance_min <= distance_max");
    need(eps_stage_one > 0, "eps_stage_one", "must be > 0");
    need(eps_stage_two > 0, "eps_stage_two", "must be > 0");
    need(max_iter_stage_one >= 1, "max_iter_stage_one", "must be >= 1");
    need(max_iter_stage_two >= 1, "max_iter_stage_two", "must be >= 1");
    return errs;
  }

  void validate() const {
    const auto errs = validation_errors();
    if (errs.empty()) return;
    std::string msg = "invalid system configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
  }
};

/// Propagation environment of a single user: L paths with elevation/azimuth
/// angles of departure and complex path responses.
struct UserChannel {
  Eigen::VectorXd elevation;  // theta, radians
  Eigen::VectorXd azimuth;    // phi, radians
  CVector path_response;      // f_k
  double distance = 0.0;

  [[nodiscard]] int num_paths() const { return static_cast<int>(path_response.size()); }
};

struct ChannelRealization {
  std::vector<UserChannel> users;

  [[nodiscard]] int num_users() const { return static_cast<int>(users.size()); }

  // Users permuted so that entry k is the user decoded k-th.
  [[nodiscard]] ChannelRealization reordered(const std::vector<int>& order) const {
    ChannelRealization out;
    out.users.reserve(order.size());
    for (int idx : order) out.users.push_back(users.at(static_cast<std::size_t>(idx)));
    return out;
  }
};

struct AntennaPositionVector {
  std::vector<Point> positions;

  AntennaPositionVector() = default;
  explicit AntennaPositionVector(std::vector<Point> p) : positions(std::move(p)) {}

  [[nodiscard]] int size() const { return static_cast<int>(positions.size()); }
  [[nodiscard]] const Point& operator[](int m) const { return positions[static_cast<std::size_t>(m)]; }
  [[nodiscard]] Point& operator[](int m) { return positions[static_cast<std::size_t>(m)]; }

  [[nodiscard]] double min_pairwise_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < positions.size(); ++a)
      for (std::size_t b = a + 1; b < positions.size(); ++b)
        best = std::min(best, (positions[a] - positions[b]).norm());
    return best;
  }

  [[nodiscard]] bool in_region(double side, double tol = 0.0) const {
    const double half = side / 2.0 + tol;
    for (const auto& p : positions)
      if (!(std::abs(p.x()) <= half && std::abs(p.y()) <= half)) return false;
    return true;
  }

  // Region C_t = [-A/2, A/2]^2 and pairwise spacing >= D, each within tol.
  [[nodiscard]] bool feasible(double side, double spacing, double tol = 1e-9) const {
    if (!in_region(side, tol)) return false;
    return positions.size() < 2 || min_pairwise_distance() >= spacing - tol;
  }
};

/// Propagation path difference of point u relative to the reference point o.
inline double path_difference(const Point& u, double elevation, double azimuth) {
  return u.x() * std::sin(elevation) * std::cos(azimuth) + u.y() * std::cos(elevation);
}

/// Transmit field-response vector g_k(u).
inline CVector frv(const Point& u, const UserChannel& user, double wavelength) {
  const int L = user.num_paths();
  CVector g(L);
  const double wn = kTwoPi / wavelength;
  for (int l = 0; l < L; ++l)
    g[l] = std::polar(1.0, wn * path_difference(u, user.elevation[l], user.azimuth[l]));
  return g;
}

/// h_k(u~) = G_k^H f_k, i.e. h[m] = g_k(u_m)^H f_k.
inline CVector channel_vector(const AntennaPositionVector& apv, const UserChannel& user,
                              double wavelength) {
  CVector h(apv.size());
  for (int m = 0; m < apv.size(); ++m) h[m] = frv(apv[m], user, wavelength).dot(user.path_response);
  return h;
}

inline double channel_gain(const AntennaPositionVector& apv, const UserChannel& user,
                           double wavelength) {
  return channel_vector(apv, user, wavelength).squaredNorm();
}

inline std::vector<CVector> channel_table(const AntennaPositionVector& apv,
                                          const ChannelRealization& real, double wavelength) {
  std::vector<CVector> h;
  h.reserve(real.users.size());
  for (const auto& u : real.users) h.push_back(channel_vector(apv, u, wavelength));
  return h;
}

// ---------------------------------------------------------------------------
// Random number streams.
//
// One master seed drives everything. Independent streams (per trial, per
// purpose) are derived by mixing the stream index into the seed with the
// splitmix64 finalizer, so trial t of a sweep sees the same numbers no matter
// which worker runs it or in what order.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 0x632BE59BD9B4E019ULL));
}

using Rng = std::mt19937_64;

/// Draws one geometric channel realization. Angles are i.i.d. U[0, pi],
/// distances U[d_lo, d_hi], path responses CN(0, rho d^-alpha / L).
inline ChannelRealization sample_realization(const SystemConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> angle(0.0, std::numbers::pi);
  std::uniform_real_distribution<double> dist(cfg.distance_min, cfg.distance_max);
  std::normal_distribution<double> normal(0.0, 1.0);

  ChannelRealization real;
  real.users.resize(static_cast<std::size_t>(cfg.num_users));
  const int L = cfg.num_paths;
  for (auto& user : real.users) {
    user.distance = cfg.distance_min == cfg.distance_max ? cfg.distance_min : dist(rng);
    user.elevation.resize(L);
    user.azimuth.resize(L);
    user.path_response.resize(L);
    for (int l = 0; l < L; ++l) user.elevation[l] = angle(rng);
    for (int l = 0; l < L; ++l) user.azimuth[l] = angle(rng);
    const double var = cfg.pathloss_ref * std::pow(user.distance, -cfg.pathloss_exp) / L;
    const double sd = std::sqrt(var / 2.0);
    for (int l = 0; l < L; ++l) {
      const double re = normal(rng);
      const double im = normal(rng);
      user.path_response[l] = cplx(sd * re, sd * im);
    }
  }
  return real;
}

}  // namespace manoma

#endif  // MANOMA_CHANNEL_HPP
