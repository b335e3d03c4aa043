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

// Simulation harness: INI configuration, per-run JSON reports, Monte-Carlo
// sweeps and scheme comparisons over a worker pool, CSV emission.
//
// Needs CLI11 and nlohmann/json on the include path.

#ifndef MANOMA_HARNESS_HPP
#define MANOMA_HARNESS_HPP

#include "manoma/benchmarks.hpp"
#include "manoma/channel.hpp"
#include "manoma/ga.hpp"
#include "manoma/orchestrator.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace manoma {

struct AppConfig {
  SystemConfig system;
  GaConfig ga;

  void validate() const {
    system.validate();
    ga.validate();
  }
};

namespace detail {

struct Quantity {
  double value = 0.0;
  std::string unit;  // lower-cased, empty when absent
};

inline Quantity parse_quantity(const std::string& key, const std::string& text) {
  std::string t = text;
  t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char ch) { return std::isspace(ch) != 0; }), t.end());
  std::size_t used = 0;
  Quantity q;
  try {
    q.value = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + text + "'");
  }
  q.unit = t.substr(used);
  std::transform(q.unit.begin(), q.unit.end(), q.unit.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (!std::isfinite(q.value)) throw ConfigError(key + ": value must be finite");
  return q;
}

inline void reject_unit(const std::string& key, const Quantity& q) {
  if (!q.unit.empty()) throw ConfigError(key + ": unexpected unit '" + q.unit + "'");
}

inline int parse_int(const std::string& key, const std::string& text) {
  const auto q = parse_quantity(key, text);
  reject_unit(key, q);
  if (q.value != std::floor(q.value) || std::abs(q.value) > 1e9) throw ConfigError(key + ": expected an integer");
  return static_cast<int>(q.value);
}

inline double parse_plain(const std::string& key, const std::string& text) {
  const auto q = parse_quantity(key, text);
  reject_unit(key, q);
  return q.value;
}

// Watts; accepts W, mW and dBm.
inline double parse_power(const std::string& key, const std::string& text) {
  const auto q = parse_quantity(key, text);
  if (q.unit.empty() || q.unit == "w") return q.value;
  if (q.unit == "mw") return q.value * 1e-3;
  if (q.unit == "dbm") return dbm_to_watt(q.value);
  throw ConfigError(key + ": unknown power unit '" + q.unit + "' (use W, mW or dBm)");
}

// Linear gain; accepts dB.
inline double parse_gain(const std::string& key, const std::string& text) {
  const auto q = parse_quantity(key, text);
  if (q.unit.empty()) return q.value;
  if (q.unit == "db") return db_to_linear(q.value);
  throw ConfigError(key + ": unknown gain unit '" + q.unit + "' (use dB or a linear value)");
}

}  // namespace detail

/// Reads an INI document with sections [system], [channel], [algorithm] and
/// [ga]. Keys not given keep their defaults. Lengths accept `m` or `lambda`,
/// powers `W`, `mW` or `dBm`, the path-loss reference `dB`.
inline AppConfig parse_config(std::istream& in) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  AppConfig app;
  auto& s = app.system;
  auto& g = app.ga;
  std::optional<std::string> region_text;
  std::optional<std::string> spacing_text;
  using Setter = std::function<void(const std::string&, const std::string&)>;
  const std::map<std::string, Setter> setters = {
      {"system.num_antennas", [&](auto& k, auto& v) { s.num_antennas = detail::parse_int(k, v); }},
      {"system.num_users", [&](auto& k, auto& v) { s.num_users = detail::parse_int(k, v); }},
      {"system.num_paths", [&](auto& k, auto& v) { s.num_paths = detail::parse_int(k, v); }},
      {"system.wavelength",
       [&](auto& k, auto& v) {
         const auto q = detail::parse_quantity(k, v);
         if (!q.unit.empty() && q.unit != "m") throw ConfigError(k + ": wavelength must be given in m");
         s.wavelength = q.value;
       }},
      {"system.region_side", [&](auto&, auto& v) { region_text = v; }},
      {"system.min_spacing", [&](auto&, auto& v) { spacing_text = v; }},
      {"system.max_power", [&](auto& k, auto& v) { s.max_power = detail::parse_power(k, v); }},
      {"system.noise_power", [&](auto& k, auto& v) { s.noise_power = detail::parse_power(k, v); }},
      {"system.min_rate", [&](auto& k, auto& v) { s.min_rate = detail::parse_plain(k, v); }},
      {"channel.pathloss_ref", [&](auto& k, auto& v) { s.pathloss_ref = detail::parse_gain(k, v); }},
      {"channel.pathloss_exp", [&](auto& k, auto& v) { s.pathloss_exp = detail::parse_plain(k, v); }},
      {"channel.distance_min",
       [&](auto& k, auto& v) {
         const auto q = detail::parse_quantity(k, v);
         if (!q.unit.empty() && q.unit != "m") throw ConfigError(k + ": distances must be given in m");
         s.distance_min = q.value;
       }},
      {"channel.distance_max",
       [&](auto& k, auto& v) {
         const auto q = detail::parse_quantity(k, v);
         if (!q.unit.empty() && q.unit != "m") throw ConfigError(k + ": distances must be given in m");
         s.distance_max = q.value;
       }},
      {"algorithm.eps_stage_one", [&](auto& k, auto& v) { s.eps_stage_one = detail::parse_plain(k, v); }},
      {"algorithm.eps_stage_two", [&](auto& k, auto& v) { s.eps_stage_two = detail::parse_plain(k, v); }},
      {"algorithm.max_iter_stage_one", [&](auto& k, auto& v) { s.max_iter_stage_one = detail::parse_int(k, v); }},
      {"algorithm.max_iter_stage_two", [&](auto& k, auto& v) { s.max_iter_stage_two = detail::parse_int(k, v); }},
      {"ga.population", [&](auto& k, auto& v) { g.population = detail::parse_int(k, v); }},
      {"ga.penalty", [&](auto& k, auto& v) { g.penalty = detail::parse_plain(k, v); }},
      {"ga.crossover_prob", [&](auto& k, auto& v) { g.crossover_prob = detail::parse_plain(k, v); }},
      {"ga.mutation_prob", [&](auto& k, auto& v) { g.mutation_prob = detail::parse_plain(k, v); }},
      {"ga.generations", [&](auto& k, auto& v) { g.generations = detail::parse_int(k, v); }},
  };

  for (const auto& item : items) {
    if (item.name == "--" || item.name == "++") continue;  // section markers
    const std::string key = item.fullname();
    const auto it = setters.find(key);
    if (it == setters.end()) {
      if (item.parents.empty() || item.parents.front() == "default")
        throw ConfigError(key + ": key outside of a section");
      throw ConfigError(key + ": unknown configuration key");
    }
    std::string text;
    for (const auto& part : item.inputs) text += (text.empty() ? "" : " ") + part;
    it->second(key, text);
  }

  // Lengths in wavelengths need the final wavelength.
  auto length = [&](const std::string& key, const std::string& text) {
    const auto q = detail::parse_quantity(key, text);
    if (q.unit.empty() || q.unit == "m") return q.value;
    if (q.unit == "lambda") return q.value * s.wavelength;
    throw ConfigError(key + ": unknown length unit '" + q.unit + "' (use m or lambda)");
  };
  if (region_text) s.region_side = length("system.region_side", *region_text);
  if (spacing_text) s.min_spacing = length("system.min_spacing", *spacing_text);
  return app;
}

inline AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  return parse_config(in);
}

/// Per-trial seeds: the channel realization and the optimizer streams are
/// split from the master seed by trial index.
struct TrialSeeds {
  std::uint64_t realization;
  std::uint64_t run;
};

inline TrialSeeds trial_seeds(std::uint64_t master, int trial) {
  const auto base = derive_seed(master, static_cast<std::uint64_t>(trial));
  return {derive_seed(base, 1), derive_seed(base, 2)};
}

/// Runs fn(0..n-1) on up to `threads` workers (0 = hardware concurrency).
/// The first exception by index is rethrown after all workers stop.
template <class Fn>
void parallel_for(int n, int threads, Fn&& fn) {
  if (n <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  int workers = threads > 0 ? threads : static_cast<int>(hw == 0 ? 1 : hw);
  workers = std::min(workers, n);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int t = next++; t < n; t = next++) {
      try {
        fn(t);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

// ---------------------------------------------------------------------------
// Reports.

inline nlohmann::ordered_json config_to_json(const AppConfig& app) {
  const auto& s = app.system;
  nlohmann::ordered_json j;
  j["system"] = {{"num_antennas", s.num_antennas}, {"num_users", s.num_users},     {"num_paths", s.num_paths},
                 {"wavelength_m", s.wavelength},    {"region_side_m", s.region_side}, {"min_spacing_m", s.min_spacing},
                 {"max_power_w", s.max_power},      {"noise_power_w", s.noise_power}, {"min_rate", s.min_rate}};
  j["channel"] = {{"pathloss_ref", s.pathloss_ref},
                  {"pathloss_exp", s.pathloss_exp},
                  {"distance_min_m", s.distance_min},
                  {"distance_max_m", s.distance_max}};
  j["algorithm"] = {{"eps_stage_one", s.eps_stage_one},
                    {"eps_stage_two", s.eps_stage_two},
                    {"max_iter_stage_one", s.max_iter_stage_one},
                    {"max_iter_stage_two", s.max_iter_stage_two}};
  j["ga"] = {{"population", app.ga.population},
             {"penalty", app.ga.penalty},
             {"crossover_prob", app.ga.crossover_prob},
             {"mutation_prob", app.ga.mutation_prob},
             {"generations", app.ga.generations}};
  return j;
}

/// JSON payload of one run. `wall_clock_seconds` is the last field and the
/// only one that varies between identical invocations.
inline nlohmann::ordered_json report_to_json(const RunReport& rep, const AppConfig& app, std::uint64_t seed,
                                             const std::string& scheme) {
  nlohmann::ordered_json j;
  j["scheme"] = scheme;
  j["seed"] = seed;
  j["config"] = config_to_json(app);
  j["excluded"] = rep.excluded;
  j["excluded_reason"] = rep.excluded_reason;
  j["decoding_order"] = rep.order.users;
  j["sum_rate"] = rep.sum_rate;
  j["initial_sum_rate"] = rep.initial_sum_rate;
  j["rates"] = rep.rates;
  j["qos_met"] = rep.qos_met;
  j["stage_one_sweeps"] = rep.stage_one_sweeps;
  j["stage_two_iterations"] = rep.stage_two_iterations;
  j["gain_trace"] = rep.gain_trace;
  j["sum_rate_trace"] = rep.sum_rate_trace;
  auto& pos = j["positions_m"] = nlohmann::ordered_json::array();
  for (const auto& p : rep.apv.positions) pos.push_back({p.x(), p.y()});
  auto& beams = j["beams"] = nlohmann::ordered_json::array();
  for (const auto& w : rep.beams) {
    auto b = nlohmann::ordered_json::array();
    for (Eigen::Index m = 0; m < w.size(); ++m) b.push_back({w[m].real(), w[m].imag()});
    beams.push_back(b);
  }
  j["indicator"] = rep.pi.size() > 0 ? nlohmann::ordered_json(rep.pi.dense()) : nlohmann::ordered_json::array();
  const auto& st = rep.stats;
  double worst_rank = 0.0;
  for (double r : st.rank_one_ratios) worst_rank = std::max(worst_rank, r);
  j["solver"] = {{"sdp_solves", st.sdp_solves},
                 {"sdp_optimal", st.sdp_optimal},
                 {"socp_solves", st.socp_solves},
                 {"socp_optimal", st.socp_optimal},
                 {"conic_iterations", st.conic_iterations},
                 {"randomizations", st.randomizations},
                 {"beam_rejects", st.beam_rejects},
                 {"position_reverts", st.position_reverts},
                 {"position_backtracks", st.position_backtracks},
                 {"indicator_accepts", st.indicator_accepts},
                 {"anchor_clamps", st.anchor_clamps},
                 {"worst_rank_one_ratio", worst_rank}};
  j["wall_clock_seconds"] = rep.wall_clock_seconds;
  return j;
}

// ---------------------------------------------------------------------------
// Sweeps.

enum class SweepAxis { M, K, P };

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::M: return "M";
    case SweepAxis::K: return "K";
    case SweepAxis::P: return "P";
  }
  return "?";
}

inline std::optional<SweepAxis> parse_axis(const std::string& s) {
  if (s == "M") return SweepAxis::M;
  if (s == "K") return SweepAxis::K;
  if (s == "P") return SweepAxis::P;
  return std::nullopt;
}

/// Configuration at one sweep point. P values are in dBm.
inline AppConfig apply_axis(AppConfig app, SweepAxis axis, double value) {
  auto integral = [&](const char* name) {
    if (value != std::floor(value) || value < 1 || value > 1e6)
      throw ConfigError(std::string(name) + ": sweep value must be a positive integer");
    return static_cast<int>(value);
  };
  switch (axis) {
    case SweepAxis::M: app.system.num_antennas = integral("num_antennas"); break;
    case SweepAxis::K: app.system.num_users = integral("num_users"); break;
    case SweepAxis::P: app.system.max_power = dbm_to_watt(value); break;
  }
  app.validate();
  return app;
}

struct TrialOutcome {
  double sum_rate = 0.0;
  bool qos_met = false;
  bool excluded = false;
};

struct SweepTrialRow {
  double value = 0.0;
  Scheme scheme = Scheme::NomaMa;
  int trial = 0;
  TrialOutcome outcome;
};

struct SweepRow {
  double value = 0.0;
  Scheme scheme = Scheme::NomaMa;
  double mean_sum_rate = 0.0;
  double std_error = 0.0;
  int trials = 0;   // trials entering the mean
  int dropped = 0;  // excluded trials
};

struct SweepResult {
  SweepAxis axis = SweepAxis::M;
  std::vector<SweepRow> rows;
  std::vector<SweepTrialRow> trials;
};

/// Mean and standard error of the non-excluded outcomes.
inline SweepRow summarize(const std::vector<TrialOutcome>& outs) {
  SweepRow row;
  std::vector<double> v;
  for (const auto& o : outs) {
    if (o.excluded)
      ++row.dropped;
    else
      v.push_back(o.sum_rate);
  }
  row.trials = static_cast<int>(v.size());
  if (v.empty()) {
    row.mean_sum_rate = std::numeric_limits<double>::quiet_NaN();
    return row;
  }
  double s = 0.0;
  for (double x : v) s += x;
  row.mean_sum_rate = s / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - row.mean_sum_rate) * (x - row.mean_sum_rate);
    row.std_error = std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
  }
  return row;
}

/// Every (value, scheme) pair over the same seeded realizations.
inline SweepResult run_sweep(const AppConfig& base, SweepAxis axis, const std::vector<double>& values,
                             const std::vector<Scheme>& schemes, int trials, std::uint64_t seed, int threads = 0,
                             const RunOptions& opt = {}) {
  if (trials < 1) throw ConfigError("trials: must be >= 1");
  std::vector<AppConfig> apps;
  for (double v : values) {
    apps.push_back(apply_axis(base, axis, v));
    for (Scheme s : schemes)
      if (is_fpa(s)) (void)fpa_positions(apps.back().system);
  }
  const int S = static_cast<int>(schemes.size());
  const int V = static_cast<int>(values.size());
  const int jobs = V * S * trials;
  std::vector<TrialOutcome> outs(static_cast<std::size_t>(jobs));
  parallel_for(jobs, threads, [&](int job) {
    const int t = job % trials;
    const int s = (job / trials) % S;
    const int v = job / (trials * S);
    const auto& app = apps[static_cast<std::size_t>(v)];
    const auto seeds = trial_seeds(seed, t);
    const auto real = sample_realization(app.system, seeds.realization);
    const auto rep = run_scheme(schemes[static_cast<std::size_t>(s)], real, app.system, app.ga, seeds.run, opt);
    outs[static_cast<std::size_t>(job)] = {rep.sum_rate, rep.qos_met, rep.excluded};
  });

  SweepResult res;
  res.axis = axis;
  for (int v = 0; v < V; ++v)
    for (int s = 0; s < S; ++s) {
      std::vector<TrialOutcome> block;
      for (int t = 0; t < trials; ++t) {
        const auto& o = outs[static_cast<std::size_t>((v * S + s) * trials + t)];
        block.push_back(o);
        res.trials.push_back({values[static_cast<std::size_t>(v)], schemes[static_cast<std::size_t>(s)], t, o});
      }
      auto row = summarize(block);
      row.value = values[static_cast<std::size_t>(v)];
      row.scheme = schemes[static_cast<std::size_t>(s)];
      res.rows.push_back(row);
    }
  return res;
}

// ---------------------------------------------------------------------------
// Three-way comparisons (decoding orders, decoding indicators).

struct ComparisonRow {
  int trial = 0;
  std::array<TrialOutcome, 3> columns;

  [[nodiscard]] bool dropped() const {
    return columns[0].excluded || columns[1].excluded || columns[2].excluded;
  }
};

struct ComparisonResult {
  std::array<std::string, 3> names;
  std::vector<ComparisonRow> rows;
  std::array<double, 3> means{};  // over trials where no column was excluded
  int dropped = 0;
};

inline void finalize_means(ComparisonResult& res) {
  std::array<double, 3> sum{};
  int n = 0;
  for (const auto& r : res.rows) {
    if (r.dropped()) {
      ++res.dropped;
      continue;
    }
    for (std::size_t c = 0; c < 3; ++c) sum[c] += r.columns[c].sum_rate;
    ++n;
  }
  for (std::size_t c = 0; c < 3; ++c)
    res.means[c] = n > 0 ? sum[c] / n : std::numeric_limits<double>::quiet_NaN();
}

inline TrialOutcome outcome(const RunReport& rep) { return {rep.sum_rate, rep.qos_met, rep.excluded}; }

/// Proposed order vs the best of all K! orders vs a uniformly random order.
inline ComparisonResult compare_orders(const AppConfig& app, int trials, std::uint64_t seed, int threads = 0,
                                       const RunOptions& opt = {}) {
  app.validate();
  if (app.system.num_users > kMaxExhaustiveOrderUsers)
    throw ConfigError("num_users: exhaustive order search is capped at " +
                      std::to_string(kMaxExhaustiveOrderUsers) + " users");
  if (trials < 1) throw ConfigError("trials: must be >= 1");
  ComparisonResult res;
  res.names = {"proposed", "exhaustive", "random"};
  res.rows.resize(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](int t) {
    const auto seeds = trial_seeds(seed, t);
    const auto real = sample_realization(app.system, seeds.realization);
    auto& row = res.rows[static_cast<std::size_t>(t)];
    row.trial = t;
    row.columns[0] = outcome(run_two_stage(real, app.system, app.ga, seeds.run, opt));
    row.columns[1] = outcome(exhaustive_order(real, app.system, app.ga, seeds.run, opt).best);
    row.columns[2] = outcome(random_order_run(real, app.system, app.ga, seeds.run, opt));
  });
  finalize_means(res);
  return res;
}

/// GA indicator vs exhaustive indicator search vs the fixed all-ones indicator.
inline ComparisonResult compare_indicators(const AppConfig& app, int trials, std::uint64_t seed, int threads = 0,
                                           const RunOptions& opt = {}) {
  app.validate();
  const int bits = gene_length(app.system.num_users);
  if (bits > 12)
    throw ConfigError("num_users: exhaustive indicator search is capped at 12 indicator bits (K <= 5)");
  if (trials < 1) throw ConfigError("trials: must be >= 1");
  ComparisonResult res;
  res.names = {"proposed", "exhaustive", "fixed"};
  res.rows.resize(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](int t) {
    const auto seeds = trial_seeds(seed, t);
    const auto real = sample_realization(app.system, seeds.realization);
    auto& row = res.rows[static_cast<std::size_t>(t)];
    row.trial = t;
    row.columns[0] = outcome(run_two_stage(real, app.system, app.ga, seeds.run, opt));
    row.columns[1] = outcome(exhaustive_indicator_run(real, app.system, app.ga, seeds.run, opt));
    row.columns[2] = outcome(fixed_indicator_run(real, app.system, app.ga, seeds.run, opt));
  });
  finalize_means(res);
  return res;
}

// ---------------------------------------------------------------------------
// CSV.

inline constexpr const char* kSweepHeader = "axis,value,scheme,mean_sum_rate,std_error,trials,dropped";
inline constexpr const char* kSweepTrialsHeader = "axis,value,scheme,trial,sum_rate,qos_met,excluded";

namespace detail {
inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}
}  // namespace detail

inline void write_sweep_csv(std::ostream& os, const SweepResult& res) {
  os << kSweepHeader << '\n';
  for (const auto& r : res.rows)
    os << to_string(res.axis) << ',' << detail::fmt(r.value) << ',' << to_string(r.scheme) << ','
       << detail::fmt(r.mean_sum_rate) << ',' << detail::fmt(r.std_error) << ',' << r.trials << ',' << r.dropped
       << '\n';
}

inline void write_sweep_trials_csv(std::ostream& os, const SweepResult& res) {
  os << kSweepTrialsHeader << '\n';
  for (const auto& r : res.trials)
    os << to_string(res.axis) << ',' << detail::fmt(r.value) << ',' << to_string(r.scheme) << ',' << r.trial << ','
       << detail::fmt(r.outcome.sum_rate) << ',' << (r.outcome.qos_met ? 1 : 0) << ','
       << (r.outcome.excluded ? 1 : 0) << '\n';
}

/// Header `trial,<a>,<b>,<c>`, one row per trial (excluded runs as nan) and a
/// final `mean` row over the trials with no excluded column.
inline void write_comparison_csv(std::ostream& os, const ComparisonResult& res) {
  os << "trial," << res.names[0] << ',' << res.names[1] << ',' << res.names[2] << '\n';
  for (const auto& r : res.rows) {
    os << r.trial;
    for (const auto& c : r.columns)
      os << ',' << detail::fmt(c.excluded ? std::numeric_limits<double>::quiet_NaN() : c.sum_rate);
    os << '\n';
  }
  os << "mean," << detail::fmt(res.means[0]) << ',' << detail::fmt(res.means[1]) << ','
     << detail::fmt(res.means[2]) << '\n';
}

/// Splits "a,b,c" into trimmed, non-empty fields.
inline std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace manoma

#endif  // MANOMA_HARNESS_HPP
