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

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "noma/baselines.hpp"
#include "noma/chanmodel.hpp"
#include "noma/sca.hpp"

namespace noma {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  ScenarioConfig scenario;
  /// Default: every strategy except exhaustive search.
  std::vector<Strategy> strategies;
  std::vector<double> p_max_sweep_dbm{26.0, 30.0, 34.0, 38.0, 42.0};
  int n_realizations = 50;
  /// Realization r uses seed base_seed + r for every strategy and power.
  std::uint64_t base_seed = 1;
  std::string output_dir = "results";
  SolverSettings solver;
  bool write_traces = true;

  ExperimentConfig();
  void validate() const;
};

/// JSON with the ExperimentConfig field names; omitted fields keep their
/// defaults. Unknown keys are rejected.
ExperimentConfig config_from_text(const std::string& text);
std::string config_to_text(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

inline constexpr int kResultsFormatVersion = 1;

struct ResultRow {
  std::string instance_id;
  std::uint64_t seed = 0;
  std::string strategy;
  double pmax_dbm = 0.0;
  double min_rate_nats = 0.0;
  double min_rate_bits = 0.0;
  int iters_phase1 = 0;
  int iters_phase2 = 0;
  double wall_ms = 0.0;
  bool capped = false;
  /// 1-based "near-far;..." list, or "ERROR:<message>" for a failed cell.
  std::string pairs;

  bool failed() const { return pairs.rfind("ERROR:", 0) == 0; }
};

const char* results_header();
std::string format_row(const ResultRow& row);
/// Throws ConfigError on malformed lines.
ResultRow parse_row(const std::string& line);
std::vector<ResultRow> read_results(const std::filesystem::path& path);

/// "r0007_p38" style identifier of one (realization, power) instance.
std::string instance_id(int realization, double pmax_dbm);

struct ExperimentStats {
  int cells = 0;
  int run = 0;
  int skipped = 0;
  int failed = 0;
};

/// Runs every (realization, power, strategy) cell not already present in
/// output_dir/results.csv, then rewrites the file in canonical order.
/// Failed cells are recorded, never fatal. Progress lines go to `log`.
ExperimentStats run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

struct SummaryRow {
  std::string strategy;
  double pmax_dbm = 0.0;
  double mean_bits = 0.0;
  double stderr_bits = 0.0;
  int count = 0;
};

/// Mean and standard error of min_rate_bits per (strategy, pmax), skipping
/// failed rows. Sorted by strategy then power.
std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_summary_text(std::ostream& out, const std::vector<SummaryRow>& rows);

}  // namespace noma
