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
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "noma/conic.hpp"
#include "noma/core.hpp"
#include "noma/surrogate.hpp"

namespace noma {

struct SolverSettings {
  /// Stop when |eta^(i+1) - eta^(i)| falls below this (nats).
  double convergence_tol = 1e-3;
  int max_outer_iters = 200;
  double eps_act = kEpsAct;
  double eps_v = kEpsV;
  /// "barrier" or "primal_dual".
  std::string backend = "barrier";
  ConeSolverOptions cone;
  /// Start each subproblem solve from the previous iterate when possible.
  bool warm_start_solver = true;
  /// Phase 2 starts from the phase-1 beamformers; otherwise from the
  /// initial point, which makes it the same solve every fixed-pairing
  /// strategy runs.
  bool phase2_warm_start = false;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TraceRecord {
  int phase = 1;
  int iter = 0;
  double eta_nats = 0.0;
  double wall_ms = 0.0;
  std::string status;
};

struct SolveTrace {
  std::vector<TraceRecord> records;

  /// CSV rows `instance_id,strategy,phase,iter,eta_nats,eta_bits,wall_ms,status`
  /// (no header).
  void write_csv(std::ostream& out, const std::string& instance_id,
                 const std::string& strategy) const;
  static const char* csv_header();
};

/// Raised when a subproblem cannot be solved.
class ScaError : public std::runtime_error {
 public:
  ScaError(const std::string& what, Iterate at, double residual)
      : std::runtime_error(what), iterate(std::move(at)), max_violation(residual) {}
  Iterate iterate;
  double max_violation;
};

/// Matched-filter beamformers at 90% power split equally, alpha at 1/2 on
/// the greedy pattern and a small value on every other candidate pair.
Iterate initial_point(const Scenario& s, const SolverSettings& settings);

struct LoopResult {
  Iterate it;
  SolveTrace trace;
  int iterations = 0;
  bool capped = false;
};

/// Outer loop on `s` (use a normalized scenario for good conditioning).
/// With `fixed` the pairing is held constant; `start` defaults to the
/// initial point.
LoopResult sca_loop(const Scenario& s, const SolverSettings& settings,
                    const PairingMatrix* fixed = nullptr, const Iterate* start = nullptr,
                    int phase = 1);

/// Rounds to the nearest binary matrix, then keeps the largest entries of
/// any conflicting set (ties to the lexicographically smallest pair).
PairingMatrix round_pairing(const PairingMatrix& a);

struct ResultRecord {
  std::string strategy;
  PairingMatrix pairing;
  /// Beamformers in physical units.
  BeamformerSet w;
  RateReport rates;
  int iters_phase1 = 0;
  int iters_phase2 = 0;
  bool capped = false;
  double wall_ms = 0.0;
  SolveTrace trace;
};

/// Relaxed phase, rounding, then the fixed-pairing phase.
ResultRecord algorithm1(const Scenario& s, const SolverSettings& settings);

/// Power control for a given binary pairing, from the initial point.
ResultRecord solve_fixed_pairing(const Scenario& s, const SolverSettings& settings,
                                 const PairingMatrix& pairing, std::string strategy);

struct ComplexityEstimate {
  long constraints = 0;
  long variables = 0;
  /// x^2.5 (y^2 + x).
  double order = 0.0;
};

ComplexityEstimate complexity_estimate(int k, int n);

}  // namespace noma
