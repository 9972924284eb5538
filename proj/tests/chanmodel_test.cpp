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

#include "noma/chanmodel.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

namespace noma {
namespace {

TEST(PathLoss, KilometreConvention) {
  const ScenarioConfig cfg;
  EXPECT_NEAR(path_loss_db(10.0, cfg), 70.4, 1e-12 * 70.4);
  EXPECT_DOUBLE_EQ(path_loss_db(1000.0, cfg), 145.4);
  const double expected = 145.4 + 37.5 * std::log10(0.2);
  EXPECT_NEAR(path_loss_db(200.0, cfg), expected, 1e-12 * expected);
  EXPECT_NEAR(path_loss_db(200.0, cfg), 119.19, 5e-3);
}

TEST(PathLoss, RejectsDistanceBelowMinimum) {
  const ScenarioConfig cfg;
  try {
    path_loss_db(5.0, cfg);
    FAIL() << "expected domain_error";
  } catch (const std::domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("min_distance_m"), std::string::npos);
  }
}

TEST(PathLoss, MonotoneInDistance) {
  const ScenarioConfig cfg;
  double prev = path_loss_db(cfg.min_distance_m, cfg);
  for (double d = 11.0; d <= 5000.0; d *= 1.07) {
    const double pl = path_loss_db(d, cfg);
    EXPECT_GT(pl, prev);
    prev = pl;
  }
}

TEST(NoisePower, MatchesHandConversion) {
  ScenarioConfig cfg;
  // -174 dBm/Hz = 10^-20.4 W/Hz, times 20 MHz.
  const double expected = 2e7 * std::pow(10.0, -20.4);
  EXPECT_NEAR(noise_power_w(cfg), expected, 1e-12 * expected);
  EXPECT_NEAR(noise_power_w(cfg), 7.962e-14, 1e-16);

  cfg.noise_psd_dbm_hz = -30.0;
  cfg.bandwidth_hz = 1.0;
  EXPECT_NEAR(noise_power_w(cfg), 1e-6, 1e-18);

  cfg.noise_psd_dbm_hz = -174.0;
  const double one_hz = std::pow(10.0, -20.4);
  EXPECT_NEAR(noise_power_w(cfg), one_hz, 1e-12 * one_hz);
  EXPECT_NEAR(noise_power_w(cfg), 3.981e-21, 1e-24);
}

TEST(ScenarioConfig, RejectsBadBounds) {
  ScenarioConfig cfg;
  cfg.k = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.min_distance_m = 300.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.n = 0;
  EXPECT_THROW(generate_scenario(cfg), std::invalid_argument);
}

TEST(GenerateScenario, DeterministicPerSeed) {
  ScenarioConfig cfg;
  cfg.seed = 42;
  const Scenario a = generate_scenario(cfg);
  const Scenario b = generate_scenario(cfg);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(a.fingerprint(), b.fingerprint());
  cfg.seed = 43;
  EXPECT_FALSE(a == generate_scenario(cfg));
}

TEST(GenerateScenario, SortedAndWithinAnnulus) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ScenarioConfig cfg;
    cfg.seed = seed;
    const Scenario s = generate_scenario(cfg);
    ASSERT_EQ(s.k, 8);
    for (Index i = 0; i < s.k; ++i) {
      EXPECT_GE(s.distances_m(i), cfg.min_distance_m);
      EXPECT_LE(s.distances_m(i), cfg.cell_radius_m);
      if (i > 0) EXPECT_LE(s.distances_m(i - 1), s.distances_m(i));
    }
    EXPECT_TRUE(sort_by_distance(s) == s);
    EXPECT_GT(s.noise_w.minCoeff(), 0.0);
    EXPECT_NEAR(s.p_max_w, dbm_to_watts(38.0), 1e-12);
  }
}

TEST(GenerateScenario, PowerBudgetIndependentOfFading) {
  ScenarioConfig cfg;
  cfg.seed = 9;
  const Scenario lo = generate_scenario(cfg);
  cfg.p_max_dbm = 26.0;
  const Scenario hi = generate_scenario(cfg);
  EXPECT_EQ(lo.channels, hi.channels);
  EXPECT_EQ(lo.distances_m, hi.distances_m);
}

// Unit-variance fading: ||g||^2 / N averages to 1 and the per-user channel
// power follows the path loss. N is raised so that 1% is a >3 sigma band.
TEST(GenerateScenario, FadingHasUnitVariance) {
  ScenarioConfig cfg;
  cfg.k = 1000;
  cfg.n = 100;
  cfg.seed = 7;
  const Scenario s = generate_scenario(cfg);
  double total = 0.0;
  for (Index u = 0; u < s.k; ++u) {
    const double gain = std::pow(10.0, -path_loss_db(s.distances_m(u), cfg) / 10.0);
    total += s.h(u).squaredNorm() / gain / cfg.n;
  }
  EXPECT_NEAR(total / s.k, 1.0, 0.01);
}

TEST(Normalized, PreservesSnrRatios) {
  ScenarioConfig cfg;
  cfg.seed = 3;
  const Scenario s = generate_scenario(cfg);
  const Scenario t = normalized(s);
  EXPECT_TRUE((t.noise_w.array() == 1.0).all());
  EXPECT_EQ(t.p_max_w, 1.0);
  for (Index u = 0; u < s.k; ++u) {
    const double snr = s.p_max_w * s.h(u).squaredNorm() / s.noise_w(u);
    EXPECT_NEAR(t.h(u).squaredNorm(), snr, 1e-9 * snr);
  }
}

class ScenarioFileTest : public ::testing::Test {
 protected:
  std::filesystem::path dir_ = std::filesystem::temp_directory_path() / "noma_chanmodel_test";
  void SetUp() override { std::filesystem::create_directories(dir_); }
  void TearDown() override { std::filesystem::remove_all(dir_); }
};

TEST_F(ScenarioFileTest, RoundTripIsBitExact) {
  ScenarioConfig cfg;
  cfg.seed = 11;
  cfg.k = 5;
  cfg.n = 3;
  const Scenario s = generate_scenario(cfg);
  save_scenario(s, dir_ / "s.json");
  const Scenario back = load_scenario(dir_ / "s.json");
  EXPECT_TRUE(back == s);
  EXPECT_EQ(back.fingerprint(), s.fingerprint());
}

TEST(ScenarioText, CarriesFormatVersion) {
  const Scenario s = make_scenario(Vec::Constant(1, 10.0), CMat::Ones(1, 1),
                                   Vec::Ones(1), 1.0);
  EXPECT_NE(scenario_to_text(s).find("\"format_version\": 1"), std::string::npos);
}

TEST(ScenarioText, RejectsRowCountMismatch) {
  const std::string text = R"({"format_version":1,"k":2,"n":1,
    "distances_m":[10,20],"noise_w":[1,1],"p_max_w":1,
    "channels":[[[1,0]]]})";
  try {
    scenario_from_text(text);
    FAIL() << "expected ScenarioParseError";
  } catch (const ScenarioParseError& e) {
    EXPECT_NE(std::string(e.what()).find("channels"), std::string::npos);
  }
}

TEST(ScenarioText, RejectsUnsortedDistances) {
  const std::string text = R"({"format_version":1,"k":2,"n":1,
    "distances_m":[30,20],"noise_w":[1,1],"p_max_w":1,
    "channels":[[[1,0]],[[0,1]]]})";
  try {
    scenario_from_text(text);
    FAIL() << "expected ScenarioParseError";
  } catch (const ScenarioParseError& e) {
    EXPECT_NE(std::string(e.what()).find("distance ordering"), std::string::npos);
  }
}

TEST(ScenarioText, ReportsSyntaxErrorPosition) {
  try {
    scenario_from_text("{\"format_version\": 1,\n \"k\": }");
    FAIL() << "expected ScenarioParseError";
  } catch (const ScenarioParseError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(ScenarioText, RejectsNonNumericField) {
  const std::string text = R"({"format_version":1,"k":1,"n":1,
    "distances_m":["x"],"noise_w":[1],"p_max_w":1,"channels":[[[1,0]]]})";
  EXPECT_THROW(scenario_from_text(text), ScenarioParseError);
}

}  // namespace
}  // namespace noma
