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

// Genetic search over the decoding indicator matrix at fixed beams and
// positions.

#ifndef MANOMA_GA_HPP
#define MANOMA_GA_HPP

#include "manoma/channel.hpp"
#include "manoma/rates.hpp"

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace manoma {

/// Strict upper triangle of Pi, row-major: pi(0,1), ..., pi(0,K-1), pi(1,2), ...
using Gene = std::vector<std::uint8_t>;

inline int gene_length(int K) { return K * (K - 1) / 2; }

struct GaConfig {
  int population = 100;
  double penalty = 100.0;
  double crossover_prob = 0.5;
  double mutation_prob = 0.1;
  int generations = 200;

  [[nodiscard]] std::vector<std::string> validation_errors() const {
    std::vector<std::string> errs;
    if (population < 2 || population % 2 != 0) errs.emplace_back("population: must be a positive even integer");
    if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) errs.emplace_back("crossover_prob: must lie in [0, 1]");
    if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) errs.emplace_back("mutation_prob: must lie in [0, 1]");
    if (generations < 1) errs.emplace_back("generations: must be >= 1");
    return errs;
  }

  void validate() const {
    const auto errs = validation_errors();
    if (errs.empty()) return;
    std::string msg = "invalid GA configuration:";
    for (const auto& e : errs) msg += "\n  " + e;
    throw ConfigError(msg);
  }
};

inline DecodingIndicatorMatrix gene_to_matrix(const Gene& g, int K) {
  if (static_cast<int>(g.size()) != gene_length(K))
    throw std::invalid_argument("gene_to_matrix: gene length does not match K(K-1)/2");
  DecodingIndicatorMatrix pi(K);
  std::size_t t = 0;
  for (int k = 0; k < K; ++k)
    for (int i = k + 1; i < K; ++i) {
      if (g[t] > 1) throw std::invalid_argument("gene_to_matrix: alleles must be 0 or 1");
      pi.set(k, i, g[t++] != 0);
    }
  return pi;
}

inline Gene matrix_to_gene(const DecodingIndicatorMatrix& pi) {
  Gene g;
  g.reserve(static_cast<std::size_t>(gene_length(pi.size())));
  for (int k = 0; k < pi.size(); ++k)
    for (int i = k + 1; i < pi.size(); ++i) g.push_back(pi(k, i) ? 1 : 0);
  return g;
}

/// Everything the fitness needs: received powers in decoding order, noise,
/// QoS target and penalty weight.
struct FitnessContext {
  Eigen::MatrixXd power;  // (k, i) = |h_i^H w_k|^2
  std::vector<double> noise;
  double min_rate = 0.0;
  double penalty = 100.0;

  [[nodiscard]] int num_users() const { return static_cast<int>(noise.size()); }
};

inline double fitness(const Gene& g, const FitnessContext& ctx) {
  const auto pi = gene_to_matrix(g, ctx.num_users());
  const auto r = achievable_rates(ctx.power, pi, ctx.noise);
  double s = 0.0;
  for (double v : r) s += v;
  return s - ctx.penalty * qos_violations(r, ctx.min_rate);
}

/// Roulette-wheel selection of `count` indices with replacement. Fitness values
/// are shifted by 1 - min(F) when any is nonpositive.
inline std::vector<int> select_parents(const std::vector<double>& fit, Rng& rng, int count) {
  if (fit.empty()) throw std::invalid_argument("select_parents: empty population");
  const double mn = *std::min_element(fit.begin(), fit.end());
  std::vector<double> wts(fit);
  if (mn <= 0.0)
    for (double& v : wts) v += 1.0 - mn;
  std::discrete_distribution<int> pick(wts.begin(), wts.end());
  std::vector<int> out(static_cast<std::size_t>(count));
  for (auto& o : out) o = pick(rng);
  return out;
}

/// Uniform crossover: each locus is swapped between the two parents when its
/// draw c ~ U[0,1) satisfies c < p_c.
inline std::pair<Gene, Gene> crossover(const Gene& a, const Gene& b, double p_c, Rng& rng) {
  if (a.size() != b.size()) throw std::invalid_argument("crossover: gene lengths differ");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Gene x = a;
  Gene y = b;
  for (std::size_t t = 0; t < a.size(); ++t)
    if (u(rng) < p_c) std::swap(x[t], y[t]);
  return {x, y};
}

/// The offspring replaces its parent only when strictly fitter.
inline const Gene& elitist_accept(const Gene& offspring, double f_offspring, const Gene& parent,
                                  double f_parent) {
  return f_offspring > f_parent ? offspring : parent;
}

/// Picks one locus uniformly and flips it with probability p_m.
inline Gene mutate(Gene g, double p_m, Rng& rng) {
  if (g.empty()) return g;
  std::uniform_int_distribution<std::size_t> locus(0, g.size() - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t t = locus(rng);
  if (u(rng) < p_m) g[t] ^= 1;
  return g;
}

struct GaResult {
  DecodingIndicatorMatrix best;
  double best_fitness = 0.0;
  std::vector<double> trace;  // global best after each generation
};

inline GaResult run_ga(const FitnessContext& ctx, const GaConfig& cfg, Rng& rng) {
  cfg.validate();
  const int K = ctx.num_users();
  const int len = gene_length(K);
  // Memoized fitness: gene lengths stay small enough to key by bit pattern.
  std::unordered_map<std::uint64_t, double> cache;
  auto key = [](const Gene& g) {
    std::uint64_t k = 0;
    for (auto b : g) k = (k << 1) | b;
    return k;
  };
  auto fit = [&](const Gene& g) {
    if (g.size() > 63) return fitness(g, ctx);
    const auto k = key(g);
    if (auto it = cache.find(k); it != cache.end()) return it->second;
    const double v = fitness(g, ctx);
    cache.emplace(k, v);
    return v;
  };

  std::bernoulli_distribution bit(0.5);
  std::vector<Gene> pop(static_cast<std::size_t>(cfg.population), Gene(static_cast<std::size_t>(len)));
  for (auto& g : pop)
    for (auto& a : g) a = bit(rng) ? 1 : 0;
  std::vector<double> f(pop.size());
  for (std::size_t j = 0; j < pop.size(); ++j) f[j] = fit(pop[j]);
  std::size_t arg = static_cast<std::size_t>(std::max_element(f.begin(), f.end()) - f.begin());
  Gene best = pop[arg];
  double best_f = f[arg];

  GaResult res;
  for (int v = 0; v < cfg.generations; ++v) {
    const auto sel = select_parents(f, rng, cfg.population);
    std::vector<Gene> next;
    next.reserve(pop.size());
    for (std::size_t j = 0; j + 1 < sel.size(); j += 2) {
      const Gene& pa = pop[static_cast<std::size_t>(sel[j])];
      const Gene& pb = pop[static_cast<std::size_t>(sel[j + 1])];
      const double fa = f[static_cast<std::size_t>(sel[j])];
      const double fb = f[static_cast<std::size_t>(sel[j + 1])];
      auto [ca, cb] = crossover(pa, pb, cfg.crossover_prob, rng);
      next.push_back(elitist_accept(ca, fit(ca), pa, fa));
      next.push_back(elitist_accept(cb, fit(cb), pb, fb));
    }
    for (auto& g : next) g = mutate(std::move(g), cfg.mutation_prob, rng);
    pop = std::move(next);
    for (std::size_t j = 0; j < pop.size(); ++j) {
      f[j] = fit(pop[j]);
      if (f[j] > best_f) {
        best_f = f[j];
        best = pop[j];
      }
    }
    res.trace.push_back(best_f);
  }
  res.best = gene_to_matrix(best, K);
  res.best_fitness = best_f;
  return res;
}

/// Best indicator by enumerating all 2^(K(K-1)/2) genes (at most 12 bits).
inline GaResult exhaustive_indicator(const FitnessContext& ctx, int max_bits = 12) {
  const int K = ctx.num_users();
  const int len = gene_length(K);
  if (len > max_bits)
    throw std::invalid_argument("exhaustive_indicator: K(K-1)/2 = " + std::to_string(len) +
                                " exceeds the enumeration cap of " + std::to_string(max_bits) + " bits");
  GaResult res;
  Gene g(static_cast<std::size_t>(len));
  double best_f = -std::numeric_limits<double>::infinity();
  Gene best = g;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << len); ++code) {
    for (int t = 0; t < len; ++t) g[static_cast<std::size_t>(t)] = (code >> (len - 1 - t)) & 1U;
    const double v = fitness(g, ctx);
    if (v > best_f) {
      best_f = v;
      best = g;
    }
  }
  res.best = gene_to_matrix(best, K);
  res.best_fitness = best_f;
  res.trace.push_back(best_f);
  return res;
}

}  // namespace manoma

#endif  // MANOMA_GA_HPP
