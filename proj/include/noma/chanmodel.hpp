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
#include <stdexcept>
#include <string>

#include "noma/types.hpp"

namespace noma {

/// Parameters of one drop of users in a single cell. Defaults follow the
/// small-cell setup used throughout the benchmarks: 20 MHz, -174 dBm/Hz,
/// path loss 145.4 + 37.5 log10(d[km]) dB, 200 m radius, 10 m exclusion.
struct ScenarioConfig {
  int k = 8;
  int n = 4;
  double cell_radius_m = 200.0;
  double min_distance_m = 10.0;
  double bandwidth_hz = 20e6;
  double noise_psd_dbm_hz = -174.0;
  double pathloss_a = 145.4;
  double pathloss_b = 37.5;
  double p_max_dbm = 38.0;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on the first violated bound.
  void validate() const;
};

/// One channel realization. Users are indexed by ascending distance to the
/// base station; column k of `channels` is the length-N channel vector h_k.
struct Scenario {
  int k = 0;
  int n = 0;
  Vec distances_m;
  CMat channels;  // N x K
  Vec noise_w;
  double p_max_w = 0.0;

  auto h(Index user) const { return channels.col(user); }

  /// Checks dimensions, distance ordering and positivity of noise and
  /// power. Throws std::invalid_argument describing the first violation.
  void validate() const;

  /// FNV-1a hash over the raw bytes of every field. Used to check that
  /// compared strategies consumed the same realization.
  std::uint64_t fingerprint() const;

  friend bool operator==(const Scenario& a, const Scenario& b);
};

class ScenarioParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kScenarioFormatVersion = 1;

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);

/// Path loss in dB with the distance taken in kilometres.
double path_loss_db(double d_m, const ScenarioConfig& config);

double noise_power_w(const ScenarioConfig& config);

/// Draws user distances uniformly over the annulus area, sorts them, and
/// attaches i.i.d. CN(0, 1) small-scale fading scaled by the path loss.
/// Every random draw comes from a generator seeded with `config.seed`.
Scenario generate_scenario(const ScenarioConfig& config);

/// Reorders users by ascending distance (stable).
Scenario sort_by_distance(Scenario s);

/// Builds a scenario from explicit data and validates it.
Scenario make_scenario(Vec distances_m, CMat channels, Vec noise_w,
                       double p_max_w);

/// Returns a copy with unit noise and unit power budget. Channel k is scaled
/// by sqrt(P) / sigma_k so every SINR is unchanged when beamformers are
/// scaled by 1 / sqrt(P).
Scenario normalized(const Scenario& s);

std::string scenario_to_text(const Scenario& s);
Scenario scenario_from_text(const std::string& text);

void save_scenario(const Scenario& s, const std::filesystem::path& path);
Scenario load_scenario(const std::filesystem::path& path);

}  // namespace noma
