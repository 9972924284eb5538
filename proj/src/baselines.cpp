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

#include "noma/baselines.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

namespace noma {

namespace {

struct Name {
  Strategy id;
  std::string_view name;
};

constexpr Name kNames[] = {
    {Strategy::kProposed, "proposed"},
    {Strategy::kRandomPairing, "random_pairing"},
    {Strategy::kScheme1, "scheme1"},
    {Strategy::kScheme2, "scheme2"},
    {Strategy::kGreedy, "greedy"},
    {Strategy::kExhaustive, "exhaustive"},
    {Strategy::kBeamformingOnly, "beamforming_only"},
};

PairingMatrix from_rule(int k, int count, auto far_of) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < count; ++i) pairs.emplace_back(far_of(i));
  return PairingMatrix::from_pairs(k, pairs);
}

void require_two(int k, const char* who) {
  if (k < 2) throw std::invalid_argument(std::string(who) + ": K must be >= 2");
}

}  // namespace

std::string_view to_string(Strategy s) {
  for (const auto& n : kNames) {
    if (n.id == s) return n.name;
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (const auto& n : kNames) {
    if (n.name == name) return n.id;
  }
  std::string known;
  for (const auto& n : kNames) known += (known.empty() ? "" : ", ") + std::string(n.name);
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "' (expected one of " +
                              known + ")");
}

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> all = [] {
    std::vector<Strategy> v;
    for (const auto& n : kNames) v.push_back(n.id);
    return v;
  }();
  return all;
}

PairingMatrix scheme1_pairing(int k) {
  require_two(k, "scheme1_pairing");
  return from_rule(k, k / 2, [](int i) { return std::pair{2 * i, 2 * i + 1}; });
}

PairingMatrix scheme2_pairing(int k) {
  require_two(k, "scheme2_pairing");
  return from_rule(k, k / 2, [k](int i) { return std::pair{i, k - 1 - i}; });
}

PairingMatrix greedy_pairing(int k) {
  require_two(k, "greedy_pairing");
  return from_rule(k, k / 2, [k](int i) { return std::pair{i, k - k / 2 + i}; });
}

PairingMatrix random_pairing(int k, std::uint64_t seed) {
  if (k < 1) throw std::invalid_argument("random_pairing: K must be >= 1");
  std::mt19937_64 rng(seed);
  if (k <= kMaxEnumerationUsers) {
    const auto all = enumerate_pairings(k);
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    return all[pick(rng)];
  }
  std::vector<int> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i + 1 < k; i += 2) {
    pairs.emplace_back(std::min(order[i], order[i + 1]), std::max(order[i], order[i + 1]));
  }
  return PairingMatrix::from_pairs(k, pairs);
}

PairingMatrix beamforming_only(int k) { return PairingMatrix::zeros(k); }

int worker_count() {
  if (const char* env = std::getenv("NOMA_PAIR_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExhaustiveResult exhaustive_search(const Scenario& s, const SolverSettings& settings,
                                   int threads) {
  if (s.k > kMaxEnumerationUsers) {
    throw std::length_error("exhaustive_search: K = " + std::to_string(s.k) + " needs " +
                            std::to_string(involution_number(s.k)) +
                            " candidate solves; limit is K <= " +
                            std::to_string(kMaxEnumerationUsers));
  }
  const auto start = std::chrono::steady_clock::now();
  const auto pairings = enumerate_pairings(s.k);
  std::vector<CandidateResult> results(pairings.size());
  std::vector<ResultRecord> records(pairings.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < pairings.size(); i = next++) {
      CandidateResult& c = results[i];
      c.pairing = pairings[i];
      try {
        records[i] = solve_fixed_pairing(s, settings, pairings[i], "exhaustive");
        c.min_rate_nats = records[i].rates.min_rate_nats;
        c.iterations = records[i].iters_phase2;
        c.capped = records[i].capped;
      } catch (const std::exception& e) {
        c.error = e.what();
      }
    }
  };
  const int n = std::min<int>(threads > 0 ? threads : worker_count(),
                              static_cast<int>(pairings.size()));
  if (n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  int best = -1;
  for (int i = 0; i < static_cast<int>(results.size()); ++i) {
    if (!results[i].error.empty()) continue;
    if (best < 0 || results[i].min_rate_nats > results[best].min_rate_nats ||
        (results[i].min_rate_nats == results[best].min_rate_nats &&
         results[i].pairing.pairs() < results[best].pairing.pairs())) {
      best = i;
    }
  }
  if (best < 0) throw std::runtime_error("exhaustive_search: every candidate solve failed");
  ExhaustiveResult out;
  out.best = std::move(records[best]);
  out.best.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  out.candidates = std::move(results);
  return out;
}

ResultRecord run_strategy(const Scenario& s, Strategy strategy, const SolverSettings& settings,
                          std::uint64_t seed) {
  const std::string name(to_string(strategy));
  switch (strategy) {
    case Strategy::kProposed:
      return algorithm1(s, settings);
    case Strategy::kExhaustive:
      return exhaustive_search(s, settings).best;
    case Strategy::kRandomPairing:
      return solve_fixed_pairing(s, settings, random_pairing(s.k, seed), name);
    case Strategy::kScheme1:
      return solve_fixed_pairing(s, settings, scheme1_pairing(s.k), name);
    case Strategy::kScheme2:
      return solve_fixed_pairing(s, settings, scheme2_pairing(s.k), name);
    case Strategy::kGreedy:
      return solve_fixed_pairing(s, settings, greedy_pairing(s.k), name);
    case Strategy::kBeamformingOnly:
      return solve_fixed_pairing(s, settings, beamforming_only(s.k), name);
  }
  throw std::invalid_argument("run_strategy: unknown strategy");
}

}  // namespace noma
