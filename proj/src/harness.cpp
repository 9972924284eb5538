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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "json.hpp"

namespace noma {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void reject_unknown(const json& obj, std::initializer_list<const char*> keys,
                    const std::string& where) {
  for (const auto& [k, v] : obj.items()) {
    if (std::find_if(keys.begin(), keys.end(), [&](const char* x) { return k == x; }) ==
        keys.end()) {
      throw ConfigError(where + ": unknown key '" + k + "'");
    }
  }
}

template <typename T>
void read_field(const json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

json scenario_json(const ScenarioConfig& c) {
  return {{"k", c.k},
          {"n", c.n},
          {"cell_radius_m", c.cell_radius_m},
          {"min_distance_m", c.min_distance_m},
          {"bandwidth_hz", c.bandwidth_hz},
          {"noise_psd_dbm_hz", c.noise_psd_dbm_hz},
          {"pathloss_a", c.pathloss_a},
          {"pathloss_b", c.pathloss_b}};
}

json solver_json(const SolverSettings& s) {
  return {{"convergence_tol", s.convergence_tol},
          {"max_outer_iters", s.max_outer_iters},
          {"eps_act", s.eps_act},
          {"eps_v", s.eps_v},
          {"backend", s.backend},
          {"feastol", s.cone.feastol},
          {"gap_tol", s.cone.gap_tol},
          {"warm_start_solver", s.warm_start_solver},
          {"phase2_warm_start", s.phase2_warm_start}};
}

std::string hex64(std::uint64_t v) {
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << v;
  return out.str();
}

std::string sanitize(std::string msg) {
  for (char& c : msg) {
    if (c == ',' || c == '\n' || c == '\r') c = ' ';
  }
  return msg;
}

std::string fmt_double(double v, int digits) {
  if (std::isnan(v)) return "nan";
  std::ostringstream out;
  out << std::setprecision(digits) << v;
  return out.str();
}

std::uint64_t pairing_seed(std::uint64_t realization_seed) {
  return realization_seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL;
}

}  // namespace

ExperimentConfig::ExperimentConfig() {
  for (Strategy s : all_strategies()) {
    if (s != Strategy::kExhaustive) strategies.push_back(s);
  }
}

void ExperimentConfig::validate() const {
  try {
    scenario.validate();
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (n_realizations < 1) throw ConfigError("n_realizations must be >= 1");
  if (strategies.empty()) throw ConfigError("strategies must not be empty");
  if (p_max_sweep_dbm.empty()) throw ConfigError("p_max_sweep_dbm must not be empty");
  for (double p : p_max_sweep_dbm) {
    if (!std::isfinite(p)) throw ConfigError("p_max_sweep_dbm values must be finite");
  }
  if (std::set<double>(p_max_sweep_dbm.begin(), p_max_sweep_dbm.end()).size() !=
      p_max_sweep_dbm.size()) {
    throw ConfigError("p_max_sweep_dbm has duplicate values");
  }
  if (std::set<Strategy>(strategies.begin(), strategies.end()).size() != strategies.size()) {
    throw ConfigError("strategies has duplicate entries");
  }
  for (Strategy s : strategies) {
    if (s == Strategy::kExhaustive && scenario.k > kMaxEnumerationUsers) {
      throw ConfigError("exhaustive strategy needs k <= " +
                        std::to_string(kMaxEnumerationUsers) + " (k = " +
                        std::to_string(scenario.k) + " has " +
                        std::to_string(involution_number(scenario.k)) + " pairings)");
    }
  }
}

ExperimentConfig config_from_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(doc,
                 {"scenario", "strategies", "p_max_sweep_dbm", "n_realizations", "base_seed",
                  "output_dir", "solver", "write_traces"},
                 "config");
  ExperimentConfig cfg;
  if (doc.contains("scenario")) {
    const json& sc = doc.at("scenario");
    reject_unknown(sc,
                   {"k", "n", "cell_radius_m", "min_distance_m", "bandwidth_hz",
                    "noise_psd_dbm_hz", "pathloss_a", "pathloss_b"},
                   "config.scenario");
    read_field(sc, "k", cfg.scenario.k, "config.scenario");
    read_field(sc, "n", cfg.scenario.n, "config.scenario");
    read_field(sc, "cell_radius_m", cfg.scenario.cell_radius_m, "config.scenario");
    read_field(sc, "min_distance_m", cfg.scenario.min_distance_m, "config.scenario");
    read_field(sc, "bandwidth_hz", cfg.scenario.bandwidth_hz, "config.scenario");
    read_field(sc, "noise_psd_dbm_hz", cfg.scenario.noise_psd_dbm_hz, "config.scenario");
    read_field(sc, "pathloss_a", cfg.scenario.pathloss_a, "config.scenario");
    read_field(sc, "pathloss_b", cfg.scenario.pathloss_b, "config.scenario");
  }
  if (doc.contains("strategies")) {
    std::vector<std::string> names;
    read_field(doc, "strategies", names, "config");
    cfg.strategies.clear();
    try {
      for (const auto& n : names) cfg.strategies.push_back(parse_strategy(n));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config.strategies: ") + e.what());
    }
  }
  read_field(doc, "p_max_sweep_dbm", cfg.p_max_sweep_dbm, "config");
  read_field(doc, "n_realizations", cfg.n_realizations, "config");
  read_field(doc, "base_seed", cfg.base_seed, "config");
  read_field(doc, "output_dir", cfg.output_dir, "config");
  read_field(doc, "write_traces", cfg.write_traces, "config");
  if (doc.contains("solver")) {
    const json& so = doc.at("solver");
    reject_unknown(so,
                   {"convergence_tol", "max_outer_iters", "eps_act", "eps_v", "backend",
                    "feastol", "gap_tol", "warm_start_solver", "phase2_warm_start"},
                   "config.solver");
    read_field(so, "convergence_tol", cfg.solver.convergence_tol, "config.solver");
    read_field(so, "max_outer_iters", cfg.solver.max_outer_iters, "config.solver");
    read_field(so, "eps_act", cfg.solver.eps_act, "config.solver");
    read_field(so, "eps_v", cfg.solver.eps_v, "config.solver");
    read_field(so, "backend", cfg.solver.backend, "config.solver");
    read_field(so, "feastol", cfg.solver.cone.feastol, "config.solver");
    read_field(so, "gap_tol", cfg.solver.cone.gap_tol, "config.solver");
    read_field(so, "warm_start_solver", cfg.solver.warm_start_solver, "config.solver");
    read_field(so, "phase2_warm_start", cfg.solver.phase2_warm_start, "config.solver");
  }
  cfg.validate();
  return cfg;
}

std::string config_to_text(const ExperimentConfig& cfg) {
  json strategies = json::array();
  for (Strategy s : cfg.strategies) strategies.push_back(std::string(to_string(s)));
  json doc = {{"scenario", scenario_json(cfg.scenario)},
              {"strategies", strategies},
              {"p_max_sweep_dbm", cfg.p_max_sweep_dbm},
              {"n_realizations", cfg.n_realizations},
              {"base_seed", cfg.base_seed},
              {"output_dir", cfg.output_dir},
              {"solver", solver_json(cfg.solver)},
              {"write_traces", cfg.write_traces}};
  return doc.dump(2) + "\n";
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return config_from_text(buf.str());
}

const char* results_header() {
  return "instance_id,seed,strategy,pmax_dbm,min_rate_nats,min_rate_bits,iters_phase1,"
         "iters_phase2,wall_ms,capped,pairs";
}

std::string format_row(const ResultRow& r) {
  std::ostringstream out;
  out << r.instance_id << ',' << r.seed << ',' << r.strategy << ',' << fmt_double(r.pmax_dbm, 10)
      << ',' << fmt_double(r.min_rate_nats, 12) << ',' << fmt_double(r.min_rate_bits, 12) << ','
      << r.iters_phase1 << ',' << r.iters_phase2 << ',' << std::fixed << std::setprecision(1)
      << r.wall_ms << ',' << (r.capped ? 1 : 0) << ',' << r.pairs;
  return out.str();
}

ResultRow parse_row(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream in(line);
  std::string item;
  while (std::getline(in, item, ',')) f.push_back(item);
  if (!line.empty() && line.back() == ',') f.emplace_back();
  if (f.size() != 11) {
    throw ConfigError("results row has " + std::to_string(f.size()) + " fields, expected 11: " +
                      line);
  }
  auto num = [&](const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || s.empty()) throw ConfigError("bad number '" + s + "' in: " + line);
    return v;
  };
  ResultRow r;
  r.instance_id = f[0];
  r.seed = static_cast<std::uint64_t>(num(f[1]));
  r.strategy = f[2];
  r.pmax_dbm = num(f[3]);
  r.min_rate_nats = num(f[4]);
  r.min_rate_bits = num(f[5]);
  r.iters_phase1 = static_cast<int>(num(f[6]));
  r.iters_phase2 = static_cast<int>(num(f[7]));
  r.wall_ms = num(f[8]);
  r.capped = f[9] == "1";
  r.pairs = f[10];
  return r;
}

std::vector<ResultRow> read_results(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open results file " + path.string());
  std::string line;
  if (!std::getline(in, line)) return {};
  if (line != results_header()) {
    throw ConfigError("results file " + path.string() + " has an unexpected header");
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (!line.empty()) rows.push_back(parse_row(line));
  }
  return rows;
}

std::string instance_id(int realization, double pmax_dbm) {
  std::ostringstream out;
  out << 'r' << std::setw(4) << std::setfill('0') << realization << "_p"
      << fmt_double(pmax_dbm, 10);
  return out.str();
}

ExperimentStats run_experiment(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  const fs::path dir(cfg.output_dir);
  fs::create_directories(dir);
  const fs::path results_path = dir / "results.csv";
  const fs::path manifest_path = dir / "manifest.json";

  // Resume only against the same scenario model and solver settings.
  json manifest = {{"format_version", kResultsFormatVersion},
                   {"scenario", scenario_json(cfg.scenario)},
                   {"solver", solver_json(cfg.solver)},
                   {"base_seed", cfg.base_seed},
                   {"scenarios", json::object()}};
  if (fs::exists(manifest_path)) {
    std::ifstream in(manifest_path);
    json old;
    try {
      old = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("manifest.json: " + std::string(e.what()));
    }
    for (const char* key : {"format_version", "scenario", "solver", "base_seed"}) {
      if (old.value(key, json()) != manifest[key]) {
        throw ConfigError(std::string("output directory holds results from a different ") +
                          "configuration (" + key + " differs); use a new output_dir");
      }
    }
    manifest["scenarios"] = old.value("scenarios", json::object());
  }

  std::map<std::tuple<std::string, std::string>, ResultRow> done;
  if (fs::exists(results_path)) {
    for (auto& r : read_results(results_path)) {
      if (!r.failed()) done[{r.instance_id, r.strategy}] = r;
    }
  }

  struct Cell {
    int realization;
    int power;
    int strategy;
  };
  std::vector<Cell> todo;
  ExperimentStats stats;
  for (int r = 0; r < cfg.n_realizations; ++r) {
    for (int p = 0; p < static_cast<int>(cfg.p_max_sweep_dbm.size()); ++p) {
      for (int s = 0; s < static_cast<int>(cfg.strategies.size()); ++s) {
        ++stats.cells;
        const std::string id = instance_id(r, cfg.p_max_sweep_dbm[p]);
        if (done.count({id, std::string(to_string(cfg.strategies[s]))})) {
          ++stats.skipped;
        } else {
          todo.push_back({r, p, s});
        }
      }
    }
  }

  std::mutex mu;
  {
    const bool fresh = !fs::exists(results_path) || fs::file_size(results_path) == 0;
    std::ofstream out(results_path, std::ios::app);
    if (fresh) out << results_header() << '\n';
  }
  const int workers = std::max(1, std::min<int>(worker_count(), static_cast<int>(todo.size())));
  std::size_t next = 0;
  int finished = 0;

  auto work = [&] {
    for (;;) {
      Cell cell;
      {
        std::lock_guard lock(mu);
        if (next >= todo.size()) return;
        cell = todo[next++];
      }
      const double pmax = cfg.p_max_sweep_dbm[cell.power];
      const Strategy strategy = cfg.strategies[cell.strategy];
      ScenarioConfig sc = cfg.scenario;
      sc.seed = cfg.base_seed + static_cast<std::uint64_t>(cell.realization);
      sc.p_max_dbm = pmax;
      ResultRow row;
      row.instance_id = instance_id(cell.realization, pmax);
      row.seed = sc.seed;
      row.strategy = std::string(to_string(strategy));
      row.pmax_dbm = pmax;
      SolveTrace trace;
      std::string hash;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const Scenario s = generate_scenario(sc);
        hash = hex64(s.fingerprint());
        ResultRecord rec =
            strategy == Strategy::kExhaustive
                ? exhaustive_search(s, cfg.solver, workers > 1 ? 1 : 0).best
                : run_strategy(s, strategy, cfg.solver, pairing_seed(sc.seed));
        row.min_rate_nats = rec.rates.min_rate_nats;
        row.min_rate_bits = rec.rates.min_rate_bits();
        row.iters_phase1 = rec.iters_phase1;
        row.iters_phase2 = rec.iters_phase2;
        row.capped = rec.capped;
        row.pairs = format_pairs(rec.pairing);
        trace = std::move(rec.trace);
      } catch (const std::exception& e) {
        row.min_rate_nats = row.min_rate_bits = std::numeric_limits<double>::quiet_NaN();
        row.pairs = "ERROR:" + sanitize(e.what());
      }
      row.wall_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

      std::lock_guard lock(mu);
      if (!hash.empty()) {
        json& known = manifest["scenarios"];
        if (known.contains(row.instance_id) && known[row.instance_id] != hash) {
          row.min_rate_nats = row.min_rate_bits = std::numeric_limits<double>::quiet_NaN();
          row.pairs = "ERROR:scenario hash mismatch for " + row.instance_id;
        }
        known[row.instance_id] = hash;
      }
      {
        std::ofstream out(results_path, std::ios::app);
        out << format_row(row) << '\n';
      }
      if (cfg.write_traces && !trace.records.empty()) {
        std::ofstream out(dir / ("trace_" + row.instance_id + "_" + row.strategy + ".csv"));
        out << SolveTrace::csv_header() << '\n';
        trace.write_csv(out, row.instance_id, row.strategy);
      }
      ++stats.run;
      if (row.failed()) ++stats.failed;
      done[{row.instance_id, row.strategy}] = row;
      ++finished;
      if (log) {
        *log << '[' << finished << '/' << todo.size() << "] " << row.instance_id << ' '
             << row.strategy << ' ' << (row.failed() ? row.pairs : fmt_double(row.min_rate_bits, 5) + " bps/Hz")
             << ' ' << std::fixed << std::setprecision(0) << row.wall_ms << " ms\n"
             << std::defaultfloat;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  // Canonical order: realization, power, strategy as configured; rows of
  // cells no longer in the config keep their relative order at the end.
  std::map<std::string, int> power_rank, strategy_rank;
  for (int p = 0; p < static_cast<int>(cfg.p_max_sweep_dbm.size()); ++p) {
    power_rank[fmt_double(cfg.p_max_sweep_dbm[p], 10)] = p;
  }
  for (int s = 0; s < static_cast<int>(cfg.strategies.size()); ++s) {
    strategy_rank[std::string(to_string(cfg.strategies[s]))] = s;
  }
  std::vector<ResultRow> rows;
  for (auto& [key, row] : done) rows.push_back(row);
  auto rank = [&](const ResultRow& r) {
    const auto pr = power_rank.find(fmt_double(r.pmax_dbm, 10));
    const auto sr = strategy_rank.find(r.strategy);
    return std::make_tuple(r.seed, pr == power_rank.end() ? 1 << 20 : pr->second,
                           sr == strategy_rank.end() ? 1 << 20 : sr->second, r.instance_id,
                           r.strategy);
  };
  std::sort(rows.begin(), rows.end(),
            [&](const ResultRow& a, const ResultRow& b) { return rank(a) < rank(b); });
  {
    const fs::path tmp = dir / "results.csv.tmp";
    std::ofstream out(tmp);
    out << results_header() << '\n';
    for (const auto& r : rows) out << format_row(r) << '\n';
    out.close();
    fs::rename(tmp, results_path);
  }
  {
    std::ofstream out(manifest_path);
    out << manifest.dump(2) << '\n';
  }
  return stats;
}

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::map<std::pair<std::string, double>, std::vector<double>> groups;
  for (const auto& r : rows) {
    if (r.failed() || std::isnan(r.min_rate_bits)) continue;
    groups[{r.strategy, r.pmax_dbm}].push_back(r.min_rate_bits);
  }
  std::vector<SummaryRow> out;
  for (const auto& [key, v] : groups) {
    SummaryRow s;
    s.strategy = key.first;
    s.pmax_dbm = key.second;
    s.count = static_cast<int>(v.size());
    double sum = 0.0;
    for (double x : v) sum += x;
    s.mean_bits = sum / s.count;
    if (s.count > 1) {
      double ss = 0.0;
      for (double x : v) ss += (x - s.mean_bits) * (x - s.mean_bits);
      s.stderr_bits = std::sqrt(ss / (s.count - 1) / s.count);
    }
    out.push_back(s);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "strategy,pmax_dbm,mean_bits,stderr_bits,count\n";
  for (const auto& r : rows) {
    out << r.strategy << ',' << fmt_double(r.pmax_dbm, 10) << ',' << fmt_double(r.mean_bits, 12)
        << ',' << fmt_double(r.stderr_bits, 12) << ',' << r.count << '\n';
  }
}

void write_summary_text(std::ostream& out, const std::vector<SummaryRow>& rows) {
  if (rows.empty()) {
    out << "empty summary: no successful result rows\n";
    return;
  }
  out << std::left << std::setw(18) << "strategy" << std::right << std::setw(10) << "pmax_dbm"
      << std::setw(12) << "mean_bps" << std::setw(12) << "stderr" << std::setw(8) << "count"
      << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(18) << r.strategy << std::right << std::setw(10)
        << fmt_double(r.pmax_dbm, 6) << std::setw(12) << std::fixed << std::setprecision(4)
        << r.mean_bits << std::setw(12) << r.stderr_bits << std::defaultfloat << std::setw(8)
        << r.count << '\n';
  }
}

}  // namespace noma
