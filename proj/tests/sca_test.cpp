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

#include "noma/sca.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "noma/baselines.hpp"
#include "test_support.hpp"

namespace noma {
namespace {

using testing::random_scenario;

Scenario generated(int k, int n, std::uint64_t seed, double p_dbm = 38.0) {
  ScenarioConfig cfg;
  cfg.k = k;
  cfg.n = n;
  cfg.seed = seed;
  cfg.p_max_dbm = p_dbm;
  return generate_scenario(cfg);
}

void expect_monotone(const SolveTrace& trace) {
  for (std::size_t i = 1; i < trace.records.size(); ++i) {
    const auto& prev = trace.records[i - 1];
    const auto& cur = trace.records[i];
    if (prev.phase != cur.phase) continue;
    EXPECT_GE(cur.eta_nats, prev.eta_nats - 1e-6) << "phase " << cur.phase << " iter " << cur.iter;
  }
}

// Reported rates must match an independent evaluation of the returned
// beamformers and pairing. Checked first since every later test leans on it.
TEST(Algorithm1, AOracleConsistency) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const Scenario s = generated(4, 2, seed);
    const ResultRecord r = algorithm1(s, {});
    const RateReport check = rate_report(s, r.w, r.pairing);
    EXPECT_NEAR(r.rates.min_rate_nats, check.min_rate_nats, 1e-4);
    EXPECT_LE(r.w.total_power(), s.p_max_w * (1.0 + 1e-6));
  }
}

TEST(InitialPoint, FeasibleAndDeterministic) {
  std::mt19937_64 rng(1);
  for (int k = 1; k <= 8; ++k) {
    const Scenario s = normalized(random_scenario(k, 3, rng));
    const Iterate it = initial_point(s, {});
    EXPECT_LE(it.w.total_power(), s.p_max_w * (1.0 + 1e-12));
    EXPECT_TRUE(validate_pairing(it.a, 1e-9).empty() || k > 2);
    EXPECT_GT(it.eta, 0.0);
    const Iterate again = initial_point(s, {});
    EXPECT_EQ(again.w.w, it.w.w);
    EXPECT_EQ(again.a, it.a);
  }
}

TEST(InitialPoint, TwoUsersStartHalfPaired) {
  std::mt19937_64 rng(2);
  const Scenario s = normalized(random_scenario(2, 2, rng));
  const Iterate it = initial_point(s, {});
  EXPECT_DOUBLE_EQ(it.a(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(it.a(1, 0), 0.0);
}

TEST(ScaLoop, SingleUserClosedForm) {
  const Scenario s = make_scenario(Vec::Constant(1, 50.0),
                                   CMat::Constant(2, 1, Complex(0.3, -0.4)), Vec::Constant(1, 0.01),
                                   2.0);
  const ResultRecord r = algorithm1(s, {});
  const double expected = std::log1p(2.0 * 0.5 / 0.01);
  EXPECT_NEAR(r.rates.min_rate_nats, expected, 1e-4);
  EXPECT_FALSE(r.capped);
}

TEST(ScaLoop, SymmetricOrthogonalUsers) {
  CMat h = CMat::Zero(2, 2);
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  const Scenario s = make_scenario((Vec(2) << 20.0, 20.0).finished(), h, Vec::Constant(2, 0.1), 1.0);
  const ResultRecord r = algorithm1(s, {});
  EXPECT_NEAR(r.rates.min_rate_nats, std::log1p(1.0 / (2 * 0.1)), 1e-3);
}

TEST(ScaLoop, TracesAreMonotone) {
  for (std::uint64_t seed : {4, 5}) {
    const Scenario s = generated(6, 4, seed);
    const ResultRecord r = algorithm1(s, {});
    expect_monotone(r.trace);
    EXPECT_FALSE(r.capped);
    EXPECT_EQ(r.trace.records.front().status, "initial");
  }
}

TEST(ScaLoop, FixedPairingMustBeValid) {
  const Scenario s = generated(4, 2, 1);
  Mat a = Mat::Zero(4, 4);
  a(0, 1) = 1.0;
  a(0, 2) = 1.0;
  EXPECT_THROW(solve_fixed_pairing(s, {}, PairingMatrix(a, PairingMode::kBinary), "bad"),
               std::invalid_argument);
}

TEST(RoundPairing, ThresholdExamples) {
  for (double v : {0.49, 0.5, 0.51}) {
    Mat a = Mat::Zero(2, 2);
    a(0, 1) = v;
    const PairingMatrix r = round_pairing(PairingMatrix(a, PairingMode::kRelaxed));
    EXPECT_TRUE(r.is_binary());
    EXPECT_EQ(r(0, 1), v >= 0.5 ? 1.0 : 0.0) << v;
  }
}

TEST(RoundPairing, ResolvesRowConflictByValue) {
  Mat a = Mat::Zero(3, 3);
  a(0, 1) = 0.6;
  a(0, 2) = 0.55;
  const PairingMatrix r = round_pairing(PairingMatrix(a, PairingMode::kRelaxed));
  EXPECT_EQ(format_pairs(r), "1-2");
}

TEST(RoundPairing, ValidAndIdempotent) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 2 + trial % 9;
    Mat a = Mat::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = i + 1; j < k; ++j) a(i, j) = u(rng);
    }
    const PairingMatrix r = round_pairing(PairingMatrix(a, PairingMode::kRelaxed));
    EXPECT_TRUE(is_valid_pairing(r));
    EXPECT_EQ(round_pairing(r.as_relaxed()), r);
  }
}

TEST(Complexity, ClosedForm) {
  const ComplexityEstimate e = complexity_estimate(8, 4);
  EXPECT_EQ(e.constraints, 409);
  EXPECT_EQ(e.variables, 97);
  EXPECT_NEAR(e.order, std::pow(409.0, 2.5) * (97.0 * 97.0 + 409.0), 1e-6 * e.order);
}

TEST(Algorithm1, DeterministicAndValid) {
  const Scenario s = generated(5, 2, 7);
  const ResultRecord a = algorithm1(s, {});
  const ResultRecord b = algorithm1(s, {});
  EXPECT_EQ(a.strategy, "proposed");
  EXPECT_TRUE(is_valid_pairing(a.pairing));
  EXPECT_TRUE(a.pairing.is_binary());
  EXPECT_EQ(a.pairing, b.pairing);
  EXPECT_EQ(a.w.w, b.w.w);
  EXPECT_EQ(a.rates.min_rate_nats, b.rates.min_rate_nats);
}

// With a single antenna two users cannot be separated spatially, so
// superposition with cancellation should win most of the time.
TEST(Algorithm1, SingleAntennaPairsTwoUsers) {
  int paired = 0;
  for (std::uint64_t seed = 0; seed < 9; ++seed) {
    const ResultRecord r = algorithm1(generated(2, 1, seed), {});
    paired += r.pairing(0, 1) == 1.0;
  }
  EXPECT_GE(paired, 5);
}

TEST(Algorithm1, NeverBeatsExhaustiveSearch) {
  for (std::uint64_t seed : {11, 12}) {
    const Scenario s = generated(4, 2, seed);
    const ResultRecord a = algorithm1(s, {});
    const ExhaustiveResult ex = exhaustive_search(s, {}, 1);
    EXPECT_LE(a.rates.min_rate_nats, ex.best.rates.min_rate_nats + 1e-4) << "seed " << seed;
  }
}

TEST(SolveTrace, CsvFormat) {
  SolveTrace t;
  t.records.push_back({1, 0, std::log(2.0), 1.5, "initial"});
  std::ostringstream out;
  t.write_csv(out, "r0001_p38", "proposed");
  EXPECT_EQ(std::string(SolveTrace::csv_header()),
            "instance_id,strategy,phase,iter,eta_nats,eta_bits,wall_ms,status");
  const std::string line = out.str();
  EXPECT_EQ(line.rfind("r0001_p38,proposed,1,0,", 0), 0u) << line;
  EXPECT_NE(line.find(",initial\n"), std::string::npos);
}

TEST(SolverSettings, RejectsBadValues) {
  SolverSettings s;
  s.convergence_tol = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = {};
  s.backend = "simplex";
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace noma
