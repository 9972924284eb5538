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
#include <string>
#include <string_view>
#include <vector>

#include "noma/sca.hpp"

namespace noma {

enum class Strategy {
  kProposed,
  kRandomPairing,
  kScheme1,
  kScheme2,
  kGreedy,
  kExhaustive,
  kBeamformingOnly,
};

std::string_view to_string(Strategy s);
/// Throws std::invalid_argument naming the accepted values.
Strategy parse_strategy(std::string_view name);
const std::vector<Strategy>& all_strategies();

/// (2k-1, 2k) for k = 1..floor(K/2), 1-based.
PairingMatrix scheme1_pairing(int k);
/// (k, K-k+1).
PairingMatrix scheme2_pairing(int k);
/// (k, K - floor(K/2) + k).
PairingMatrix greedy_pairing(int k);
/// Uniform over all partial matchings for K <= 10; a shuffled maximal
/// matching above that.
PairingMatrix random_pairing(int k, std::uint64_t seed);
PairingMatrix beamforming_only(int k);

/// Worker count from NOMA_PAIR_THREADS, else the hardware concurrency.
int worker_count();

struct CandidateResult {
  PairingMatrix pairing;
  double min_rate_nats = 0.0;
  int iterations = 0;
  bool capped = false;
  /// Empty on success.
  std::string error;
};

struct ExhaustiveResult {
  ResultRecord best;
  std::vector<CandidateResult> candidates;
};

/// Fixed-pairing power control for every partial matching; the best
/// min-rate wins, ties to the lexicographically smallest pair list.
/// `threads` <= 0 uses worker_count().
ExhaustiveResult exhaustive_search(const Scenario& s, const SolverSettings& settings,
                                   int threads = 0);

/// Runs one strategy. `seed` only affects random pairing.
ResultRecord run_strategy(const Scenario& s, Strategy strategy, const SolverSettings& settings,
                          std::uint64_t seed);

}  // namespace noma
