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

#include "manoma/harness.hpp"
#include "manoma/verify.hpp"

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace manoma {

struct DecodingIndicatorTestAccess {
  static void set_raw(DecodingIndicatorMatrix& p, int k, int i, std::uint8_t v) { p.bits_[p.idx(k, i)] = v; }
};

namespace {

namespace fs = std::filesystem;

AppConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string config_error(const std::string& text) {
  try {
    parse(text).validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) rows.push_back(split_list(line));
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("manoma_harness_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

AppConfig tiny(int M, int K) {
  AppConfig app;
  app.system.num_antennas = M;
  app.system.num_users = K;
  app.system.max_iter_stage_two = 3;
  app.ga.generations = 20;
  app.ga.population = 20;
  return app;
}

// ---------------------------------------------------------------------------
// Configuration.

TEST(Config, DefaultFileMatchesDefaults) {
  const auto app = load_config(std::string(MANOMA_CONFIG_DIR) + "/default.ini");
  const SystemConfig d;
  const auto& s = app.system;
  EXPECT_EQ(s.num_antennas, d.num_antennas);
  EXPECT_EQ(s.num_users, d.num_users);
  EXPECT_EQ(s.num_paths, d.num_paths);
  EXPECT_DOUBLE_EQ(s.wavelength, d.wavelength);
  EXPECT_NEAR(s.region_side, d.region_side, 1e-15);
  EXPECT_NEAR(s.min_spacing, d.min_spacing, 1e-15);
  EXPECT_NEAR(s.max_power, d.max_power, 1e-15);
  EXPECT_NEAR(s.noise_power, d.noise_power, 1e-24);
  EXPECT_DOUBLE_EQ(s.min_rate, d.min_rate);
  EXPECT_NEAR(s.pathloss_ref, d.pathloss_ref, 1e-18);
  EXPECT_DOUBLE_EQ(s.pathloss_exp, d.pathloss_exp);
  EXPECT_DOUBLE_EQ(s.distance_min, d.distance_min);
  EXPECT_DOUBLE_EQ(s.distance_max, d.distance_max);
  EXPECT_DOUBLE_EQ(s.eps_stage_one, d.eps_stage_one);
  EXPECT_EQ(s.max_iter_stage_two, d.max_iter_stage_two);
  EXPECT_EQ(app.ga.population, GaConfig{}.population);
  EXPECT_DOUBLE_EQ(app.ga.penalty, GaConfig{}.penalty);
  EXPECT_EQ(app.ga.generations, GaConfig{}.generations);
  EXPECT_NO_THROW(app.validate());

  const auto small = load_config(std::string(MANOMA_CONFIG_DIR) + "/small.ini");
  EXPECT_EQ(small.system.num_antennas, 2);
  EXPECT_EQ(small.system.num_users, 3);
}

TEST(Config, PowerUnits) {
  EXPECT_NEAR(parse("[system]\nmax_power = 20 mW\n").system.max_power, 0.02, 1e-17);
  EXPECT_NEAR(parse("[system]\nmax_power = 30dBm\n").system.max_power, 1.0, 1e-15);
  EXPECT_NEAR(parse("[system]\nmax_power = 0.5 W\n").system.max_power, 0.5, 1e-17);
  EXPECT_NEAR(parse("[system]\nnoise_power = -90 dBm\n").system.noise_power, 1e-12, 1e-27);
  EXPECT_NEAR(parse("[channel]\npathloss_ref = -20 dB\n").system.pathloss_ref, 1e-2, 1e-17);
  EXPECT_NE(config_error("[system]\nmax_power = 10 dBW\n").find("max_power"), std::string::npos);
}

TEST(Config, LengthsInWavelengthsFollowTheWavelength) {
  const auto app = parse("[system]\nregion_side = 4 lambda\nmin_spacing = 0.5lambda\nwavelength = 0.05 m\n");
  EXPECT_NEAR(app.system.region_side, 0.2, 1e-15);
  EXPECT_NEAR(app.system.min_spacing, 0.025, 1e-15);
  EXPECT_NEAR(parse("[system]\nregion_side = 0.4 m\n").system.region_side, 0.4, 1e-15);
}

TEST(Config, FieldLevelErrors) {
  EXPECT_NE(config_error("[system]\nnum_antenas = 4\n").find("system.num_antenas"), std::string::npos);
  EXPECT_NE(config_error("[sytem]\nnum_antennas = 4\n").find("sytem.num_antennas"), std::string::npos);
  EXPECT_NE(config_error("[system]\nnum_users = 2.5\n").find("num_users"), std::string::npos);
  EXPECT_NE(config_error("[system]\nnum_users = many\n").find("num_users"), std::string::npos);
  EXPECT_NE(config_error("[system]\nnum_paths = 3 m\n").find("num_paths"), std::string::npos);
  EXPECT_NE(config_error("[ga]\npopulation = 7\n").find("population"), std::string::npos);
  EXPECT_NE(config_error("[ga]\nmutation_prob = 1.5\n").find("mutation_prob"), std::string::npos);
  const auto packing = config_error("[system]\nnum_antennas = 100\n");
  EXPECT_NE(packing.find("num_antennas"), std::string::npos);
  EXPECT_NE(packing.find("packing bound"), std::string::npos);
  EXPECT_THROW(load_config("/nonexistent/manoma.ini"), ConfigError);
}

// ---------------------------------------------------------------------------
// Seeds, parallelism, statistics.

TEST(Seeds, DistinctAndStable) {
  const auto a = trial_seeds(42, 0);
  const auto b = trial_seeds(42, 1);
  EXPECT_NE(a.realization, a.run);
  EXPECT_NE(a.realization, b.realization);
  EXPECT_EQ(trial_seeds(42, 1).run, b.run);
  EXPECT_NE(trial_seeds(43, 0).realization, a.realization);
}

TEST(ParallelFor, EveryIndexOnceAndErrorsPropagate) {
  std::vector<std::atomic<int>> hits(257);
  parallel_for(257, 4, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 3, [](int i) { if (i == 6) throw std::runtime_error("boom"); }), std::runtime_error);
  parallel_for(0, 2, [](int) { FAIL(); });
}

TEST(Summary, MeanAndStandardError) {
  const auto row = summarize({{1.0, true, false}, {2.0, true, false}, {4.0, false, false}, {100.0, false, true}});
  EXPECT_EQ(row.trials, 3);
  EXPECT_EQ(row.dropped, 1);
  EXPECT_DOUBLE_EQ(row.mean_sum_rate, 7.0 / 3.0);
  // sample sd sqrt(7/3), divided by sqrt(3)
  EXPECT_NEAR(row.std_error, std::sqrt(7.0 / 3.0) / std::sqrt(3.0), 1e-15);
  EXPECT_TRUE(std::isnan(summarize({{1.0, true, true}}).mean_sum_rate));
}

TEST(Axis, ParseAndApply) {
  EXPECT_EQ(parse_axis("P"), SweepAxis::P);
  EXPECT_FALSE(parse_axis("L").has_value());
  EXPECT_NEAR(apply_axis(AppConfig{}, SweepAxis::P, 20.0).system.max_power, 0.1, 1e-15);
  EXPECT_EQ(apply_axis(AppConfig{}, SweepAxis::K, 3.0).system.num_users, 3);
  EXPECT_THROW(apply_axis(AppConfig{}, SweepAxis::M, 2.5), ConfigError);
  EXPECT_THROW(apply_axis(AppConfig{}, SweepAxis::M, 100.0), ConfigError);
}

// ---------------------------------------------------------------------------
// Sweeps, comparisons and CSV schemas.

TEST(Sweep, MeansRecomputeFromTrialsAndCsvReadsBack) {
  const std::vector<Scheme> schemes{Scheme::NomaMa, Scheme::SdmaFpa};
  const auto res = run_sweep(tiny(2, 2), SweepAxis::M, {1.0, 2.0}, schemes, 3, 11, 2);
  ASSERT_EQ(res.rows.size(), 4U);
  ASSERT_EQ(res.trials.size(), 12U);
  for (const auto& row : res.rows) {
    double s = 0.0;
    int n = 0;
    for (const auto& t : res.trials)
      if (t.value == row.value && t.scheme == row.scheme && !t.outcome.excluded) {
        s += t.outcome.sum_rate;
        ++n;
      }
    EXPECT_EQ(row.trials + row.dropped, 3);
    ASSERT_EQ(n, row.trials);
    EXPECT_NEAR(row.mean_sum_rate, s / n, 1e-12);
  }

  std::ostringstream a, b;
  write_sweep_csv(a, res);
  write_sweep_trials_csv(b, res);
  const auto rows = read_csv(a.str());
  ASSERT_EQ(rows.size(), 5U);
  EXPECT_EQ(rows[0], split_list(kSweepHeader));
  EXPECT_EQ(rows[0], (std::vector<std::string>{"axis", "value", "scheme", "mean_sum_rate", "std_error", "trials", "dropped"}));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    ASSERT_EQ(rows[r].size(), 7U);
    EXPECT_EQ(rows[r][0], "M");
    EXPECT_TRUE(parse_scheme(rows[r][2]).has_value());
    EXPECT_NEAR(std::stod(rows[r][3]), res.rows[r - 1].mean_sum_rate, 1e-9 * res.rows[r - 1].mean_sum_rate);
    EXPECT_EQ(std::stoi(rows[r][5]), res.rows[r - 1].trials);
  }
  const auto trows = read_csv(b.str());
  ASSERT_EQ(trows.size(), 13U);
  EXPECT_EQ(trows[0], (std::vector<std::string>{"axis", "value", "scheme", "trial", "sum_rate", "qos_met", "excluded"}));
  for (std::size_t r = 1; r < trows.size(); ++r) EXPECT_EQ(trows[r].size(), 7U);

  // Same seed, same numbers, independent of the thread count.
  const auto again = run_sweep(tiny(2, 2), SweepAxis::M, {1.0, 2.0}, schemes, 3, 11, 1);
  std::ostringstream c;
  write_sweep_csv(c, again);
  EXPECT_EQ(c.str(), a.str());
}

TEST(Sweep, RejectsBadRequests) {
  EXPECT_THROW(run_sweep(tiny(2, 2), SweepAxis::M, {2.0}, {Scheme::NomaMa}, 0, 1), ConfigError);
  EXPECT_THROW(run_sweep(tiny(2, 2), SweepAxis::M, {11.0}, {Scheme::NomaFpa}, 1, 1), ConfigError);
}

TEST(Compare, SingleUserColumnsAgreeAndCsvReadsBack) {
  const auto orders = compare_orders(tiny(2, 1), 2, 5, 2);
  const auto inds = compare_indicators(tiny(2, 1), 2, 5, 2);
  for (const auto* res : {&orders, &inds})
    for (const auto& row : res->rows) {
      EXPECT_EQ(row.columns[0].sum_rate, row.columns[1].sum_rate);
      EXPECT_NEAR(row.columns[0].sum_rate, row.columns[2].sum_rate, 1e-5);
    }
  std::ostringstream os;
  write_comparison_csv(os, orders);
  const auto rows = read_csv(os.str());
  ASSERT_EQ(rows.size(), 4U);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"trial", "proposed", "exhaustive", "random"}));
  EXPECT_EQ(rows[1][0], "0");
  EXPECT_EQ(rows[3][0], "mean");
  EXPECT_NEAR(std::stod(rows[3][1]), orders.means[0], 1e-9 * orders.means[0]);
  std::ostringstream is;
  write_comparison_csv(is, inds);
  EXPECT_EQ(read_csv(is.str())[0], (std::vector<std::string>{"trial", "proposed", "exhaustive", "fixed"}));
}

TEST(Compare, CapsEnforced) {
  EXPECT_THROW(compare_orders(tiny(2, 6), 1, 1), ConfigError);
  EXPECT_THROW(compare_indicators(tiny(2, 6), 1, 1), ConfigError);
}

// ---------------------------------------------------------------------------
// Reports.

nlohmann::ordered_json report(const AppConfig& app, std::uint64_t seed) {
  const auto s = trial_seeds(seed, 0);
  const auto rep = run_scheme(Scheme::NomaMa, sample_realization(app.system, s.realization), app.system, app.ga, s.run);
  return report_to_json(rep, app, seed, "NOMA-MA");
}

TEST(Report, DeterministicApartFromWallClock) {
  auto a = report(tiny(3, 3), 42);
  auto b = report(tiny(3, 3), 42);
  ASSERT_TRUE(a.contains("wall_clock_seconds"));
  a.erase("wall_clock_seconds");
  b.erase("wall_clock_seconds");
  EXPECT_EQ(a.dump(), b.dump());
  EXPECT_EQ(a["seed"], 42);
  EXPECT_EQ(a["positions_m"].size(), 3U);
  EXPECT_EQ(a["indicator"].size(), 3U);
}

TEST(Report, SingleUserClosedForm) {
  const auto app = tiny(2, 1);
  const auto j = report(app, 9);
  const auto real = sample_realization(app.system, trial_seeds(9, 0).realization);
  std::vector<Point> pos;
  for (const auto& p : j["positions_m"]) pos.emplace_back(p[0].get<double>(), p[1].get<double>());
  const double gain = channel_gain(AntennaPositionVector(pos), real.users[0], app.system.wavelength);
  const double want = std::log2(1.0 + app.system.max_power * gain / app.system.noise_power);
  EXPECT_NEAR(j["sum_rate"].get<double>(), want, 0.01 * want);
}

// ---------------------------------------------------------------------------
// Verification suites and mutation tests.

TEST(Verify, CleanBuildPasses) {
  const auto r = run_verification(VerifyOptions{});
  EXPECT_TRUE(all_passed(r));
  for (const auto& c : r) EXPECT_TRUE(c.passed) << c.module << "/" << c.operation << ": " << c.detail;
  std::ostringstream os;
  print_verification(os, r);
  EXPECT_NE(os.str().find(std::to_string(r.size()) + "/" + std::to_string(r.size()) + " checks passed"),
            std::string::npos);
}

TEST(Verify, SignFlippedGradientIsCaught) {
  VerifyOptions opt;
  opt.instances = 10;
  opt.hooks.phi_grad = [](const PhiContext& ctx, const Point& u) -> Point { return -phi_grad(ctx, u); };
  const auto r = verify_calculus(opt);
  bool caught = false;
  for (const auto& c : r) caught = caught || !c.passed;
  EXPECT_TRUE(caught);
  EXPECT_FALSE(all_passed(r));
}

TEST(Verify, LowerTriangleBitIsCaught) {
  VerifyOptions opt;
  opt.instances = 5;
  opt.hooks.corrupt_indicator = [](DecodingIndicatorMatrix& pi) {
    if (pi.size() > 1) DecodingIndicatorTestAccess::set_raw(pi, 1, 0, 1);
  };
  const auto r = verify_indicator_structure(opt);
  EXPECT_FALSE(r[0].passed);
  EXPECT_EQ(r[0].module, "rates");
  EXPECT_NE(r[0].detail.find("failed"), std::string::npos);
}

// ---------------------------------------------------------------------------
// Command line.

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MANOMA_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch("cli");
  const std::string small = std::string(MANOMA_CONFIG_DIR) + "/small.ini";
  EXPECT_EQ(cli("--help"), 0);
  EXPECT_EQ(cli(""), 1);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("run --config /nonexistent.ini"), 1);
  EXPECT_EQ(cli("sweep --config " + small + " --values 2"), 1);
  EXPECT_EQ(cli("sweep --config " + small + " --axis Q --values 2"), 1);
  EXPECT_EQ(cli("run --config " + small + " --schemes OMA"), 1);
  EXPECT_EQ(cli("run --config " + small + " --debug-dump-conic"), 1);

  std::ofstream(dir / "bad.ini") << "[system]\nnum_antennas = 100\n";
  EXPECT_EQ(cli("run --config " + (dir / "bad.ini").string()), 1);
  std::ofstream(dir / "typo.ini") << "[system]\nnum_antenas = 2\n";
  EXPECT_EQ(cli("run --config " + (dir / "typo.ini").string()), 1);
}

TEST(Cli, WritesOutputs) {
  const auto dir = scratch("out");
  const std::string small = std::string(MANOMA_CONFIG_DIR) + "/small.ini";
  ASSERT_EQ(cli("run --config " + small + " --seed 3 --out " + (dir / "run").string() + " --debug-dump-conic"), 0);
  const auto j = nlohmann::json::parse(slurp(dir / "run" / "report.json"));
  EXPECT_EQ(j["scheme"], "NOMA-MA");
  EXPECT_EQ(j["seed"], 3);
  EXPECT_FALSE(fs::is_empty(dir / "run" / "conic"));

  ASSERT_EQ(cli("run --config " + small + " --seed 3 --out " + (dir / "run2").string()), 0);
  auto j2 = nlohmann::json::parse(slurp(dir / "run2" / "report.json"));
  auto j1 = j;
  j1.erase("wall_clock_seconds");
  j2.erase("wall_clock_seconds");
  EXPECT_EQ(j1.dump(), j2.dump());

  ASSERT_EQ(cli("sweep --config " + small + " --axis P --values 5,10 --schemes NOMA-FPA,SDMA-FPA --trials 2 --out " +
                (dir / "sweep").string()),
            0);
  const auto rows = read_csv(slurp(dir / "sweep" / "sweep.csv"));
  ASSERT_EQ(rows.size(), 5U);
  EXPECT_EQ(rows[0], split_list(kSweepHeader));
  EXPECT_EQ(read_csv(slurp(dir / "sweep" / "sweep_trials.csv")).size(), 9U);

  std::ofstream(dir / "one.ini") << "[system]\nnum_antennas = 2\nnum_users = 1\n";
  ASSERT_EQ(cli("compare-orders --config " + (dir / "one.ini").string() + " --trials 1 --out " + dir.string()), 0);
  ASSERT_EQ(cli("compare-indicators --config " + (dir / "one.ini").string() + " --trials 1 --out " + dir.string()), 0);
  EXPECT_EQ(read_csv(slurp(dir / "compare_orders.csv")).size(), 3U);
  EXPECT_EQ(read_csv(slurp(dir / "compare_indicators.csv"))[0],
            (std::vector<std::string>{"trial", "proposed", "exhaustive", "fixed"}));
  fs::remove_all(dir);
}

TEST(Cli, VerifyExitsCleanly) { EXPECT_EQ(cli("verify --seed 7"), 0); }

}  // namespace
}  // namespace manoma
