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

#include "noma/cone.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

namespace noma {
namespace {

using Affine = ConeProgramBuilder::Affine;

class BackendTest : public ::testing::TestWithParam<std::string> {
 protected:
  std::unique_ptr<ConeSolver> solver_ = make_cone_solver(GetParam());
  ConeSolverOptions opts_;
};

// max eta s.t. eta <= 3
TEST_P(BackendTest, OneVariableLp) {
  ConeProgramBuilder b(1);
  b.set_objective(0, -1.0);
  b.add_nonnegative(Affine(3.0).add(0, -1.0));
  const ConeSolution sol = solver_->solve(b.build(), opts_);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal) << sol.message;
  EXPECT_NEAR(sol.x(0), 3.0, 1e-6);
  EXPECT_NEAR(sol.objective, -3.0, 1e-6);
}

// eta <= 1 and eta >= 2
TEST_P(BackendTest, DetectsInfeasibility) {
  ConeProgramBuilder b(1);
  b.set_objective(0, -1.0);
  b.add_nonnegative(Affine(1.0).add(0, -1.0));
  b.add_nonnegative(Affine(-2.0).add(0, 1.0));
  EXPECT_EQ(solver_->solve(b.build(), opts_).status, SolveStatus::kInfeasible);
}

// min c'x s.t. ||x|| <= 1 has value -||c|| at -c/||c||.
TEST_P(BackendTest, BallMinimum) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 2 + trial;
    Vec c = Vec::NullaryExpr(n, [&] { return g(rng); });
    ConeProgramBuilder b(n);
    std::vector<Affine> u(n);
    for (int i = 0; i < n; ++i) {
      b.set_objective(i, c(i));
      u[i].add(i, 1.0);
    }
    b.add_soc(Affine(1.0), u);
    const ConeSolution sol = solver_->solve(b.build(), opts_);
    ASSERT_EQ(sol.status, SolveStatus::kOptimal) << sol.message;
    EXPECT_NEAR(sol.objective, -c.norm(), 1e-6);
    EXPECT_LT((sol.x + c / c.norm()).norm(), 1e-3);
  }
}

// min r s.t. (x - 2)^2 <= r, through the rotated cone lowering.
TEST_P(BackendTest, QuadraticLowering) {
  ConeProgramBuilder b(2);
  b.set_objective(1, 1.0);
  const Affine u = Affine(-2.0).add(0, 1.0);
  b.add_quadratic(std::span(&u, 1), Affine().add(1, 1.0));
  const ConeSolution sol = solver_->solve(b.build(), opts_);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal) << sol.message;
  EXPECT_NEAR(sol.x(1), 0.0, 1e-6);
  EXPECT_NEAR(sol.x(0), 2.0, 2e-3);
}

TEST_P(BackendTest, UnboundedIsNotReportedOptimal) {
  ConeProgramBuilder b(1);
  b.set_objective(0, -1.0);
  b.add_nonnegative(Affine().add(0, 1.0));
  EXPECT_NE(solver_->solve(b.build(), opts_).status, SolveStatus::kOptimal);
}

INSTANTIATE_TEST_SUITE_P(Backends, BackendTest,
                         ::testing::Values("barrier", "primal_dual"));

// Random bounded LP + SOC programs: both backends agree.
TEST(Backends, AgreeOnRandomPrograms) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  const auto barrier = make_cone_solver("barrier");
  const auto pd = make_cone_solver("primal_dual");
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 4;
    ConeProgramBuilder b(n);
    for (int i = 0; i < n; ++i) {
      b.set_objective(i, g(rng));
      b.add_nonnegative(Affine(2.0).add(i, -1.0));
      b.add_nonnegative(Affine(2.0).add(i, 1.0));
    }
    for (int c = 0; c < 3; ++c) {
      std::vector<Affine> u(2);
      for (auto& a : u) {
        a.constant = 0.3 * g(rng);
        for (int i = 0; i < n; ++i) a.add(i, g(rng));
      }
      Affine t(3.0 + std::abs(g(rng)));
      for (int i = 0; i < n; ++i) t.add(i, 0.2 * g(rng));
      b.add_soc(t, u);
    }
    const ConeProgram p = b.build();
    const ConeSolution a = barrier->solve(p, {});
    const ConeSolution c = pd->solve(p, {});
    ASSERT_EQ(a.status, SolveStatus::kOptimal) << a.message;
    ASSERT_EQ(c.status, SolveStatus::kOptimal) << c.message;
    EXPECT_NEAR(a.objective, c.objective, 1e-6 * (1.0 + std::abs(a.objective)));
    EXPECT_LE(a.max_violation, 1e-7);
    EXPECT_LE(c.max_violation, 1e-6);
  }
}

TEST(Backends, WarmStartFromInteriorPoint) {
  ConeProgramBuilder b(1);
  b.set_objective(0, -1.0);
  b.add_nonnegative(Affine(3.0).add(0, -1.0));
  b.add_nonnegative(Affine(1.0).add(0, 1.0));
  const Vec x0 = Vec::Zero(1);
  const ConeSolution sol = BarrierSolver().solve(b.build(), {}, &x0);
  ASSERT_EQ(sol.status, SolveStatus::kOptimal);
  EXPECT_NEAR(sol.x(0), 3.0, 1e-6);
}

TEST(Backends, UnknownNameThrows) {
  EXPECT_THROW(make_cone_solver("simplex"), std::invalid_argument);
}

ConeDims mixed_dims() {
  ConeDims d;
  d.linear = 2;
  d.soc = {3, 4};
  return d;
}

TEST(ConeAlgebra, DegreesAndIdentity) {
  const ConeDims d = mixed_dims();
  EXPECT_EQ(d.rows(), 9);
  EXPECT_EQ(d.barrier_degree(), 6);
  EXPECT_EQ(d.complementarity_degree(), 4);
  const Vec e = cone::identity(d);
  EXPECT_NEAR(cone::min_margin(d, e), 1.0, 1e-15);
  const Vec x = Vec::LinSpaced(9, 0.5, 2.0);
  EXPECT_LT((cone::product(d, e, x) - x).norm(), 1e-15);
}

TEST(ConeAlgebra, DivideInvertsProduct) {
  const ConeDims d = mixed_dims();
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 20; ++trial) {
    Vec lambda = Vec::NullaryExpr(9, [&] { return 0.3 * g(rng); }) + 2.0 * cone::identity(d);
    ASSERT_GT(cone::min_margin(d, lambda), 0.0);
    const Vec x = Vec::NullaryExpr(9, [&] { return g(rng); });
    const Vec r = cone::product(d, lambda, x);
    EXPECT_LT((cone::divide(d, lambda, r) - x).norm(), 1e-10);
  }
}

TEST(ConeAlgebra, MaxStepLandsOnBoundary) {
  const ConeDims d = mixed_dims();
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    const Vec u = cone::identity(d) + 0.1 * Vec::NullaryExpr(9, [&] { return g(rng); });
    const Vec du = Vec::NullaryExpr(9, [&] { return g(rng); });
    const double a = cone::max_step(d, u, du);
    if (!std::isfinite(a)) {
      EXPECT_GT(cone::min_margin(d, u + 1e6 * du), -1e-6);
      continue;
    }
    EXPECT_NEAR(cone::min_margin(d, u + a * du), 0.0, 1e-9);
    EXPECT_GT(cone::min_margin(d, u + 0.99 * a * du), 0.0);
  }
}

TEST(ConeProgramBuilder, LinearRowsComeFirst) {
  ConeProgramBuilder b(2);
  const Affine u[] = {Affine().add(0, 1.0)};
  b.add_soc(Affine(1.0), u);
  b.add_nonnegative(Affine(5.0).add(1, 2.0));
  const ConeProgram p = b.build();
  EXPECT_EQ(p.cones.linear, 1);
  ASSERT_EQ(p.cones.soc.size(), 1u);
  EXPECT_EQ(p.cones.soc[0], 2);
  EXPECT_DOUBLE_EQ(p.h(0), 5.0);
  EXPECT_DOUBLE_EQ(p.G.coeff(0, 1), -2.0);
  EXPECT_NO_THROW(p.validate());
  std::ostringstream out;
  write_cone_program(out, p);
  EXPECT_FALSE(out.str().empty());
}

}  // namespace
}  // namespace noma
