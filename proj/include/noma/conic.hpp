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

#include <iosfwd>
#include <optional>
#include <string>

#include "noma/cone.hpp"
#include "noma/surrogate.hpp"

namespace noma {

/// Maps (w, alpha, mu, eta) onto the real decision vector of a subproblem.
/// w is stored as interleaved (re, im) pairs, column by column. alpha and
/// mu entries that are constant in this subproblem have index -1; mu
/// variables are scaled, mu_{k,l} = mu_scale(k, l) * x[mu_var(k, l)].
struct SubproblemLayout {
  int k = 0;
  int n = 0;
  int vars = 0;
  int eta = -1;
  Eigen::MatrixXi alpha_var;
  Eigen::MatrixXi mu_var;
  Mat mu_scale;

  int w_re(Index row, Index user) const { return static_cast<int>(2 * (user * n + row)); }
  int w_im(Index row, Index user) const { return w_re(row, user) + 1; }
  int alpha_count() const;
  int mu_count() const;

  Vec pack(const Iterate& it) const;
  /// Inverse of pack. Constant alpha entries are taken from `base`; mu
  /// entries without a variable are left as in `base`.
  Iterate unpack(const Vec& x, const Iterate& base) const;
};

struct ProgramCounts {
  /// Complex-counted sizes from the closed-form complexity accounting.
  long nominal_constraints = 0;
  long nominal_variables = 0;
  /// Sizes of the real conic program actually built.
  int real_variables = 0;
  int linear_rows = 0;
  int cones = 0;
  int rows = 0;
};

struct Subproblem {
  ConeProgram program;
  SubproblemLayout layout;
  ProgramCounts counts;
};

/// Closed-form sizes: x = 6K^2 + 3K + 1 constraints, y = NK + K^2 + 1
/// variables.
long nominal_constraint_count(int k);
long nominal_variable_count(int k, int n);

/// Assembles the convex subproblem (maximize eta) around the expansion point
/// described by `c`. The expansion iterate is feasible by construction.
Subproblem build_subproblem(const Scenario& s, const SurrogateCoeffs& c, const Iterate& it,
                            double eps_v = kEpsV);

struct SolveOutcome {
  SolveStatus status = SolveStatus::kNumericalFailure;
  Iterate point;
  double eta = 0.0;
  int iterations = 0;
  double gap = 0.0;
  double max_violation = 0.0;
  bool warm_started = false;
  std::string message;
};

/// Strictly feasible start derived from `it`, or nothing when none is found
/// by lowering eta.
std::optional<Vec> interior_start(const Subproblem& sp, const Iterate& it);

SolveOutcome solve_subproblem(const Subproblem& sp, const Iterate& base,
                              const ConeSolver& solver, const ConeSolverOptions& opts,
                              bool warm_start = true);

/// Text dump: layout header followed by the cone program triplets.
void write_subproblem(std::ostream& out, const Subproblem& sp);

}  // namespace noma
