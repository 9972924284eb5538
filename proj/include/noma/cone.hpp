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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCore>

#include "noma/types.hpp"

namespace noma {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Product cone R_+^linear x Q^{soc[0]} x Q^{soc[1]} x ..., rows in that
/// order. Q^d = {(t, u) in R x R^{d-1} : ||u|| <= t}.
struct ConeDims {
  int linear = 0;
  std::vector<int> soc;

  int rows() const;
  /// Barrier parameter: one per linear row, two per second-order cone.
  int barrier_degree() const { return linear + 2 * static_cast<int>(soc.size()); }
  /// Number of cones counted as in primal-dual complementarity.
  int complementarity_degree() const { return linear + static_cast<int>(soc.size()); }
};

/// minimize c^T x  subject to  h - G x in K.
struct ConeProgram {
  SpMat G;
  Vec h;
  Vec c;
  ConeDims cones;

  int vars() const { return static_cast<int>(G.cols()); }
  int rows() const { return static_cast<int>(G.rows()); }
  /// Throws std::invalid_argument on dimension mismatches.
  void validate() const;
  Vec slack(const Vec& x) const { return h - G * x; }
};

/// Writes variables, cones and coefficient triplets in a plain text format
/// that other solvers can ingest for cross-checking.
void write_cone_program(std::ostream& out, const ConeProgram& p);

// Cone arithmetic on a full slack vector laid out per ConeDims.
namespace cone {

/// Smallest "eigenvalue" over all cones: s_i for linear rows and
/// s_0 - ||s_1|| for second-order cones. Positive iff s is interior.
double min_margin(const ConeDims& dims, const Vec& s);

/// Largest step a >= 0 keeping u + a du in the cone (may be +inf).
double max_step(const ConeDims& dims, const Vec& u, const Vec& du);

/// Identity element e (ones on linear rows, (1, 0, ..., 0) per cone).
Vec identity(const ConeDims& dims);

/// Jordan product u o v and its inverse: returns x with lambda o x = r.
Vec product(const ConeDims& dims, const Vec& u, const Vec& v);
Vec divide(const ConeDims& dims, const Vec& lambda, const Vec& r);

}  // namespace cone

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kNumericalFailure };

std::string_view to_string(SolveStatus s);

struct ConeSolverOptions {
  double feastol = 1e-7;
  /// Absolute duality-gap target.
  double gap_tol = 1e-8;
  int max_iterations = 400;
};

struct ConeSolution {
  SolveStatus status = SolveStatus::kNumericalFailure;
  Vec x;
  Vec z;  // dual multipliers, when the backend produces them
  double objective = 0.0;
  double gap = 0.0;
  /// max(0, -min_margin(h - G x)) recomputed from x.
  double max_violation = 0.0;
  int iterations = 0;
  std::string message;
};

class ConeSolver {
 public:
  virtual ~ConeSolver() = default;
  virtual std::string_view name() const = 0;
  /// `warm_start`, when given and strictly feasible, skips phase I for
  /// backends that use it. Backends are deterministic.
  virtual ConeSolution solve(const ConeProgram& p, const ConeSolverOptions& opts,
                             const Vec* warm_start = nullptr) const = 0;
};

/// Primal log-barrier path following with Newton centering and a phase-I
/// search for a strictly feasible point.
class BarrierSolver final : public ConeSolver {
 public:
  std::string_view name() const override { return "barrier"; }
  ConeSolution solve(const ConeProgram& p, const ConeSolverOptions& opts,
                     const Vec* warm_start = nullptr) const override;
};

/// Homogeneous self-dual embedding with Nesterov-Todd scaling and a
/// Mehrotra predictor-corrector. Detects infeasibility from certificates.
class PrimalDualSolver final : public ConeSolver {
 public:
  std::string_view name() const override { return "primal_dual"; }
  ConeSolution solve(const ConeProgram& p, const ConeSolverOptions& opts,
                     const Vec* warm_start = nullptr) const override;
};

/// "barrier" or "primal_dual"; throws std::invalid_argument otherwise.
std::unique_ptr<ConeSolver> make_cone_solver(std::string_view name);

/// Incremental row builder for ConeProgram. Linear rows and cones may be
/// added in any order; build() places linear rows first.
class ConeProgramBuilder {
 public:
  /// Sparse affine form sum_j coef_j x_{var_j} + constant.
  struct Affine {
    std::vector<std::pair<int, double>> terms;
    double constant = 0.0;

    Affine() = default;
    explicit Affine(double c) : constant(c) {}
    Affine& add(int var, double coef) {
      if (coef != 0.0) terms.emplace_back(var, coef);
      return *this;
    }
    Affine& operator+=(const Affine& o);
    Affine scaled(double f) const;
  };

  explicit ConeProgramBuilder(int vars) : vars_(vars), c_(Vec::Zero(vars)) {}

  int vars() const { return vars_; }
  void set_objective(int var, double coef) { c_(var) = coef; }

  /// a(x) >= 0
  void add_nonnegative(const Affine& a);
  /// ||u(x)|| <= t(x)
  void add_soc(const Affine& t, std::span<const Affine> u);
  /// ||u(x)||^2 <= r(x), lowered through a rotated cone:
  /// ||(u, (r - 1)/2)|| <= (r + 1)/2.
  void add_quadratic(std::span<const Affine> u, const Affine& r);

  int linear_rows() const { return static_cast<int>(linear_.size()); }
  int cone_count() const { return static_cast<int>(socs_.size()); }

  ConeProgram build() const;

 private:
  int vars_;
  Vec c_;
  std::vector<Affine> linear_;
  std::vector<std::vector<Affine>> socs_;
};

}  // namespace noma
