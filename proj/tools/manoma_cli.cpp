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

// manoma command line: single runs, sweeps, verification and comparisons.
//
// Exit codes: 0 success, 1 validation error, 2 verification failure,
// 3 runtime failure.

#include "manoma/harness.hpp"
#include "manoma/verify.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitVerification = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::string config;
  std::uint64_t seed = 42;
  int trials = 100;
  std::string out;
  int threads = 0;
  bool dump_conic = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_trials) {
  cmd->add_option("--config", c.config, "INI configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "master seed");
  if (with_trials) {
    cmd->add_option("--trials", c.trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", c.threads, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  }
  cmd->add_option("--out", c.out, "output directory (stdout when omitted)");
  cmd->add_flag("--debug-dump-conic", c.dump_conic, "write every conic problem under <out>/conic");
}

manoma::AppConfig load(const Common& c) {
  manoma::AppConfig app = c.config.empty() ? manoma::AppConfig{} : manoma::load_config(c.config);
  app.validate();
  return app;
}

manoma::RunOptions run_options(const Common& c) {
  manoma::RunOptions opt;
  if (c.dump_conic) {
    if (c.out.empty()) throw manoma::ConfigError("--debug-dump-conic: requires --out");
    opt.dump_dir = (std::filesystem::path(c.out) / "conic").string();
  }
  return opt;
}

std::vector<manoma::Scheme> parse_schemes(const std::string& text) {
  if (text.empty() || text == "all") return {std::begin(manoma::kAllSchemes), std::end(manoma::kAllSchemes)};
  std::vector<manoma::Scheme> out;
  for (const auto& name : manoma::split_list(text)) {
    const auto s = manoma::parse_scheme(name);
    if (!s) throw manoma::ConfigError("schemes: unknown scheme '" + name + "' (NOMA-MA, NOMA-FPA, SDMA-MA, SDMA-FPA)");
    out.push_back(*s);
  }
  if (out.empty()) throw manoma::ConfigError("schemes: empty list");
  return out;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  for (const auto& v : manoma::split_list(text)) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size() || !std::isfinite(x)) throw manoma::ConfigError("values: not a number: '" + v + "'");
    out.push_back(x);
  }
  if (out.empty()) throw manoma::ConfigError("values: empty list");
  return out;
}

// Writes via `emit` to <out>/<name>, or to stdout without --out.
template <class Emit>
void write_output(const Common& c, const std::string& name, Emit&& emit) {
  if (c.out.empty()) {
    emit(std::cout);
    return;
  }
  std::filesystem::create_directories(c.out);
  const auto path = std::filesystem::path(c.out) / name;
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  emit(os);
  std::cerr << "wrote " << path.string() << '\n';
}

int cmd_run(const Common& c, const std::string& scheme_text) {
  const auto app = load(c);
  const auto schemes = parse_schemes(scheme_text.empty() ? "NOMA-MA" : scheme_text);
  if (schemes.size() != 1) throw manoma::ConfigError("schemes: run takes exactly one scheme");
  const auto scheme = schemes.front();
  if (manoma::is_fpa(scheme)) (void)manoma::fpa_positions(app.system);
  const auto seeds = manoma::trial_seeds(c.seed, 0);
  const auto real = manoma::sample_realization(app.system, seeds.realization);
  const auto rep = manoma::run_scheme(scheme, real, app.system, app.ga, seeds.run, run_options(c));
  const auto json = manoma::report_to_json(rep, app, c.seed, manoma::to_string(scheme));
  write_output(c, "report.json", [&](std::ostream& os) { os << json.dump(2) << '\n'; });
  if (!c.out.empty())
    std::cout << manoma::to_string(scheme) << " sum rate " << rep.sum_rate << " bps/Hz (start "
              << rep.initial_sum_rate << "), qos " << (rep.qos_met ? "met" : "unmet")
              << (rep.excluded ? ", excluded: " + rep.excluded_reason : "") << '\n';
  return kExitOk;
}

int cmd_sweep(const Common& c, const std::string& axis_text, const std::string& values_text,
              const std::string& scheme_text) {
  const auto app = load(c);
  const auto axis = manoma::parse_axis(axis_text);
  if (!axis) throw manoma::ConfigError("axis: expected M, K or P");
  const auto res = manoma::run_sweep(app, *axis, parse_values(values_text), parse_schemes(scheme_text), c.trials,
                                     c.seed, c.threads, run_options(c));
  write_output(c, "sweep.csv", [&](std::ostream& os) { manoma::write_sweep_csv(os, res); });
  if (!c.out.empty())
    write_output(c, "sweep_trials.csv", [&](std::ostream& os) { manoma::write_sweep_trials_csv(os, res); });
  return kExitOk;
}

int cmd_verify(const Common& c) {
  manoma::VerifyOptions opt;
  opt.seed = c.seed;
  const auto results = manoma::run_verification(opt);
  manoma::print_verification(std::cout, results);
  return manoma::all_passed(results) ? kExitOk : kExitVerification;
}

int cmd_compare(const Common& c, bool orders) {
  const auto app = load(c);
  const auto res = orders ? manoma::compare_orders(app, c.trials, c.seed, c.threads, run_options(c))
                          : manoma::compare_indicators(app, c.trials, c.seed, c.threads, run_options(c));
  write_output(c, orders ? "compare_orders.csv" : "compare_indicators.csv",
               [&](std::ostream& os) { manoma::write_comparison_csv(os, res); });
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Movable-antenna NOMA sum-rate optimizer"};
  app.require_subcommand(1);

  Common run_c, sweep_c, verify_c, orders_c, ind_c;
  std::string run_schemes, sweep_schemes, axis, values;

  auto* run = app.add_subcommand("run", "optimize one channel realization and write a JSON report");
  add_common(run, run_c, false);
  run->add_option("--schemes", run_schemes, "scheme to run (default NOMA-MA)");

  auto* sweep = app.add_subcommand("sweep", "average sum rate per scheme along one axis");
  add_common(sweep, sweep_c, true);
  sweep->add_option("--axis", axis, "M, K or P (P in dBm)")->required();
  sweep->add_option("--values", values, "comma-separated axis values")->required();
  sweep->add_option("--schemes", sweep_schemes, "comma-separated schemes (default all)");

  auto* verify = app.add_subcommand("verify", "run the oracle and invariant suites");
  verify->add_option("--seed", verify_c.seed, "suite seed");

  auto* orders = app.add_subcommand("compare-orders", "proposed vs exhaustive vs random decoding order");
  add_common(orders, orders_c, true);
  auto* ind = app.add_subcommand("compare-indicators", "proposed vs exhaustive vs fixed decoding indicator");
  add_common(ind, ind_c, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run) return cmd_run(run_c, run_schemes);
    if (*sweep) return cmd_sweep(sweep_c, axis, values, sweep_schemes);
    if (*verify) return cmd_verify(verify_c);
    if (*orders) return cmd_compare(orders_c, true);
    if (*ind) return cmd_compare(ind_c, false);
  } catch (const manoma::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
