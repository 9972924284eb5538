// Copyright 2026 The noma-pair Authors
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

// Command-line front end: generate, solve, sweep, summarize, enumerate.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "noma/baselines.hpp"
#include "noma/harness.hpp"

namespace fs = std::filesystem;
using namespace noma;

namespace {

struct Options {
  std::string config;
  std::uint64_t seed = 1;
  bool seed_set = false;
  std::string strategy = "proposed";
  double pmax_dbm = 38.0;
  std::string out;
  int k = 8;
  int n = 4;
  int count = 1;
  std::string scenario;
  bool unit = false;
  std::string backend = "barrier";
  std::string results = "results/results.csv";
  std::string summary_csv;
  bool list = false;
  bool quiet = false;
};

ScenarioConfig scenario_config(const Options& o) {
  ScenarioConfig sc = o.config.empty() || o.config == "default"
                          ? ScenarioConfig{}
                          : load_config(o.config).scenario;
  sc.k = o.k;
  sc.n = o.n;
  sc.seed = o.seed;
  sc.p_max_dbm = o.pmax_dbm;
  return sc;
}

int cmd_generate(const Options& o) {
  const fs::path out = o.out.empty() ? fs::path("scenarios") : fs::path(o.out);
  fs::create_directories(out);
  for (int i = 0; i < o.count; ++i) {
    Options one = o;
    one.seed = o.seed + static_cast<std::uint64_t>(i);
    const Scenario s = generate_scenario(scenario_config(one));
    const fs::path file = out / ("scenario_seed" + std::to_string(one.seed) + ".json");
    save_scenario(s, file);
    std::cout << file.string() << '\n';
  }
  return 0;
}

int cmd_solve(const Options& o) {
  Scenario s;
  if (o.unit) {
    if (o.k != 1 || o.n != 1) throw std::invalid_argument("--unit needs --k 1 --n 1");
    s = make_scenario(Vec::Constant(1, 10.0), CMat::Ones(1, 1), Vec::Ones(1), 1.0);
  } else if (!o.scenario.empty()) {
    s = load_scenario(o.scenario);
  } else {
    s = generate_scenario(scenario_config(o));
  }
  SolverSettings settings =
      o.config.empty() || o.config == "default" ? SolverSettings{} : load_config(o.config).solver;
  settings.backend = o.backend;
  const Strategy strategy = parse_strategy(o.strategy);
  const ResultRecord r = run_strategy(s, strategy, settings, o.seed);
  std::cout << std::setprecision(10);
  std::cout << "strategy " << r.strategy << "\n";
  std::cout << "users " << s.k << " antennas " << s.n << " pmax_w " << s.p_max_w << "\n";
  std::cout << "pairs " << (r.pairing.pairs().empty() ? "-" : format_pairs(r.pairing)) << "\n";
  for (Index k = 0; k < s.k; ++k) {
    std::cout << "user " << k + 1 << " rate_nats " << r.rates.per_user_rate_nats(k)
              << " rate_bits " << r.rates.per_user_rate_bits(k) << "\n";
  }
  std::cout << "min_rate_nats " << r.rates.min_rate_nats << "\n";
  std::cout << "min_rate_bits " << r.rates.min_rate_bits() << "\n";
  std::cout << "iters_phase1 " << r.iters_phase1 << " iters_phase2 " << r.iters_phase2
            << " capped " << (r.capped ? 1 : 0) << " wall_ms " << std::fixed
            << std::setprecision(1) << r.wall_ms << "\n";
  return 0;
}

int cmd_sweep(const Options& o) {
  ExperimentConfig cfg =
      o.config.empty() || o.config == "default" ? ExperimentConfig{} : load_config(o.config);
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (o.seed_set) cfg.base_seed = o.seed;
  const ExperimentStats st = run_experiment(cfg, o.quiet ? nullptr : &std::cerr);
  std::cout << "cells " << st.cells << " run " << st.run << " skipped " << st.skipped
            << " failed " << st.failed << " results " << (fs::path(cfg.output_dir) / "results.csv").string()
            << "\n";
  return 0;
}

int cmd_summarize(const Options& o) {
  const auto rows = summarize(read_results(o.results));
  write_summary_text(std::cout, rows);
  if (!o.summary_csv.empty()) {
    std::ofstream out(o.summary_csv);
    if (!out) throw std::runtime_error("cannot write " + o.summary_csv);
    write_summary_csv(out, rows);
  }
  return 0;
}

int cmd_enumerate(const Options& o) {
  if (o.k < 1) throw std::invalid_argument("--k must be >= 1");
  if (o.list) {
    for (const auto& a : enumerate_pairings(o.k)) {
      const std::string p = format_pairs(a);
      std::cout << (p.empty() ? "-" : p) << '\n';
    }
  } else {
    std::cout << involution_number(o.k) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Max-min rate NOMA beamforming with dynamic user pairing"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("generate", "Draw channel realizations and save them as JSON");
  auto* solve = app.add_subcommand("solve", "Solve one instance with one strategy");
  auto* sweep = app.add_subcommand("sweep", "Run a Monte Carlo experiment");
  auto* summ = app.add_subcommand("summarize", "Mean and standard error per strategy and power");
  auto* en = app.add_subcommand("enumerate", "Count (or list) valid user pairings");

  for (auto* sub : {gen, solve}) {
    sub->add_option("--k", o.k, "Number of users")->check(CLI::PositiveNumber);
    sub->add_option("--n", o.n, "Number of BS antennas")->check(CLI::PositiveNumber);
    sub->add_option("--pmax-dbm", o.pmax_dbm, "BS power budget in dBm");
    sub->add_option("--config", o.config, "Experiment config (JSON) for scenario parameters");
  }
  for (auto* sub : {gen, solve, sweep}) {
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& v) { o.seed = v; o.seed_set = true; },
        "Random seed (base seed for sweeps)");
  }
  gen->add_option("--count", o.count, "Number of consecutive seeds")->check(CLI::PositiveNumber);
  gen->add_option("--out", o.out, "Output directory");
  solve->add_option("--strategy", o.strategy, "Strategy name");
  solve->add_option("--scenario", o.scenario, "Scenario JSON file");
  solve->add_flag("--unit", o.unit, "Unit instance: h = 1, noise = 1, P = 1");
  solve->add_option("--backend", o.backend, "Cone solver backend")
      ->check(CLI::IsMember({"barrier", "primal_dual"}));
  sweep->add_option("--config", o.config, "Experiment config file, or 'default'");
  sweep->add_option("--out", o.out, "Output directory (overrides the config)");
  sweep->add_flag("--quiet", o.quiet, "No per-cell progress on stderr");
  summ->add_option("--results", o.results, "results.csv path");
  summ->add_option("--csv", o.summary_csv, "Also write the summary as CSV here");
  en->add_option("--k", o.k, "Number of users")->required();
  en->add_flag("--list", o.list, "List every pairing instead of counting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_generate(o);
    if (*solve) return cmd_solve(o);
    if (*sweep) return cmd_sweep(o);
    if (*summ) return cmd_summarize(o);
    if (*en) return cmd_enumerate(o);
  } catch (const ConfigError& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return 2;
  } catch (const ScenarioParseError& e) {
    std::cerr << "error: scenario: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: usage: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: runtime: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
