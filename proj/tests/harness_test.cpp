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

#include "noma/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "json.hpp"

namespace noma {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("noma_harness_" + name + "_" +
                                                    std::to_string(std::random_device{}()));
  fs::remove_all(dir);
  return dir;
}

ExperimentConfig small_config(const fs::path& dir) {
  ExperimentConfig cfg;
  cfg.scenario.k = 3;
  cfg.scenario.n = 2;
  cfg.strategies = {Strategy::kScheme1, Strategy::kBeamformingOnly};
  cfg.p_max_sweep_dbm = {30.0, 38.0};
  cfg.n_realizations = 3;
  cfg.output_dir = dir.string();
  return cfg;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Results, HeaderIsFixed) {
  EXPECT_EQ(std::string(results_header()),
            "instance_id,seed,strategy,pmax_dbm,min_rate_nats,min_rate_bits,iters_phase1,"
            "iters_phase2,wall_ms,capped,pairs");
}

TEST(Results, RowRoundTrip) {
  ResultRow row;
  row.instance_id = instance_id(7, 38.0);
  row.seed = 8;
  row.strategy = "proposed";
  row.pmax_dbm = 38.0;
  row.min_rate_nats = 0.693147180559945;
  row.min_rate_bits = 1.0;
  row.iters_phase1 = 12;
  row.iters_phase2 = 3;
  row.wall_ms = 1234.5;
  row.pairs = "1-5;2-6";
  EXPECT_EQ(row.instance_id, "r0007_p38");
  const ResultRow back = parse_row(format_row(row));
  EXPECT_EQ(format_row(back), format_row(row));
  EXPECT_NEAR(back.min_rate_nats, row.min_rate_nats, 1e-12);

  row.pairs = "ERROR:solver failed";
  row.min_rate_nats = std::nan("");
  const ResultRow failed = parse_row(format_row(row));
  EXPECT_TRUE(failed.failed());
  EXPECT_TRUE(std::isnan(failed.min_rate_nats));
  EXPECT_THROW(parse_row("r0001_p38,1,proposed"), ConfigError);
}

TEST(Config, DefaultsAndRoundTrip) {
  const ExperimentConfig d = config_from_text("{}");
  EXPECT_EQ(d.scenario.k, 8);
  EXPECT_EQ(d.n_realizations, 50);
  EXPECT_EQ(d.p_max_sweep_dbm, (std::vector<double>{26, 30, 34, 38, 42}));
  EXPECT_EQ(std::count(d.strategies.begin(), d.strategies.end(), Strategy::kExhaustive), 0);
  EXPECT_EQ(d.strategies.size(), 6u);

  ExperimentConfig cfg = small_config("out");
  cfg.solver.backend = "primal_dual";
  const ExperimentConfig back = config_from_text(config_to_text(cfg));
  EXPECT_EQ(config_to_text(back), config_to_text(cfg));
  EXPECT_EQ(back.solver.backend, "primal_dual");
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  EXPECT_THROW(config_from_text(R"({"realizations": 5})"), ConfigError);
  EXPECT_THROW(config_from_text(R"({"solver": {"tol": 1}})"), ConfigError);
  EXPECT_THROW(config_from_text(R"({"strategies": ["best"]})"), ConfigError);
  EXPECT_THROW(config_from_text(R"({"n_realizations": 0})"), ConfigError);
  EXPECT_THROW(config_from_text("{"), ConfigError);
}

TEST(Experiment, WritesEveryCellDeterministically) {
  const fs::path a = fresh_dir("a");
  const fs::path b = fresh_dir("b");
  const ExperimentStats st = run_experiment(small_config(a));
  EXPECT_EQ(st.cells, 12);
  EXPECT_EQ(st.run, 12);
  EXPECT_EQ(st.failed, 0);
  run_experiment(small_config(b));
  const auto ra = read_results(a / "results.csv");
  const auto rb = read_results(b / "results.csv");
  ASSERT_EQ(ra.size(), 12u);
  ASSERT_EQ(rb.size(), 12u);
  for (std::size_t i = 0; i < ra.size(); ++i) {
    ResultRow x = ra[i], y = rb[i];
    x.wall_ms = y.wall_ms = 0.0;
    EXPECT_EQ(format_row(x), format_row(y));
  }
  // Realization r uses seed base_seed + r under every strategy.
  EXPECT_EQ(ra.front().instance_id, "r0000_p30");
  EXPECT_EQ(ra.front().seed, 1u);
  EXPECT_TRUE(fs::exists(a / "trace_r0000_p30_scheme1.csv"));
  EXPECT_EQ(read_file(a / "trace_r0000_p30_scheme1.csv").rfind(SolveTrace::csv_header(), 0), 0u);

  const auto manifest = nlohmann::json::parse(read_file(a / "manifest.json"));
  EXPECT_EQ(manifest.at("scenarios").size(), 6u);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Experiment, ResumeSkipsFinishedCells) {
  const fs::path dir = fresh_dir("resume");
  ExperimentConfig cfg = small_config(dir);
  cfg.n_realizations = 1;
  run_experiment(cfg);
  const std::string first = read_file(dir / "results.csv");
  const ExperimentStats again = run_experiment(cfg);
  EXPECT_EQ(again.skipped, 4);
  EXPECT_EQ(again.run, 0);
  EXPECT_EQ(read_file(dir / "results.csv"), first);

  cfg.n_realizations = 2;
  const ExperimentStats more = run_experiment(cfg);
  EXPECT_EQ(more.skipped, 4);
  EXPECT_EQ(more.run, 4);

  cfg.base_seed = 99;
  EXPECT_THROW(run_experiment(cfg), ConfigError);
  fs::remove_all(dir);
}

TEST(Summary, MeanAndStandardError) {
  auto row = [](std::string strategy, double p, double bits) {
    ResultRow r;
    r.strategy = std::move(strategy);
    r.pmax_dbm = p;
    r.min_rate_bits = bits;
    return r;
  };
  ResultRow bad = row("greedy", 38, 0.0);
  bad.pairs = "ERROR:x";
  const auto sum = summarize({row("greedy", 38, 1.0), row("greedy", 38, 3.0), bad,
                              row("greedy", 30, 2.0), row("beamforming_only", 38, 0.5)});
  ASSERT_EQ(sum.size(), 3u);
  EXPECT_EQ(sum[0].strategy, "beamforming_only");
  EXPECT_EQ(sum[0].stderr_bits, 0.0);
  EXPECT_EQ(sum[1].pmax_dbm, 30.0);
  EXPECT_EQ(sum[2].count, 2);
  EXPECT_DOUBLE_EQ(sum[2].mean_bits, 2.0);
  EXPECT_DOUBLE_EQ(sum[2].stderr_bits, 1.0);

  std::ostringstream csv;
  write_summary_csv(csv, sum);
  EXPECT_EQ(csv.str().rfind("strategy,pmax_dbm,mean_bits,stderr_bits,count\n", 0), 0u);
  std::ostringstream text;
  write_summary_text(text, {});
  EXPECT_NE(text.str().find("empty summary"), std::string::npos);
}

}  // namespace
}  // namespace noma
