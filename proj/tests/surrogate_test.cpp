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

#include "noma/surrogate.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace noma {
namespace {

using testing::random_beams;
using testing::random_relaxed;
using testing::random_scenario;

TEST(Vhat, WorkedExamples) {
  EXPECT_DOUBLE_EQ(vhat(1.0, 1.0, 1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(vhat(2.0, 3.0, 1.0, 1.0), 6.5);
  EXPECT_DOUBLE_EQ(vhat(0.5, 2.0, 0.5, 2.0), 1.0);
}

TEST(Vhat, ClampsSmallExpansionValues) {
  int clamped = 0;
  const double v = vhat(0.3, 0.4, 1e-9, 0.4, kEpsV, &clamped);
  EXPECT_EQ(clamped, 1);
  EXPECT_DOUBLE_EQ(v, vhat(0.3, 0.4, kEpsV, 0.4));
  EXPECT_GE(v, 0.3 * 0.4);
  vhat(0.3, 0.4, 0.5, 0.4, kEpsV, &clamped);
  EXPECT_EQ(clamped, 1);
}

TEST(Vhat, UpperBoundsTheProduct) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::uniform_real_distribution<double> e(kEpsV, 10.0);
  for (int i = 0; i < 20000; ++i) {
    const double x = u(rng), z = u(rng);
    EXPECT_GE(vhat(x, z, e(rng), e(rng)) - x * z, -1e-12);
  }
}

TEST(BuildCoeffs, ZeroBeamformerDegenerates) {
  std::mt19937_64 rng(2);
  const Scenario s = random_scenario(3, 2, rng);
  BeamformerSet w = random_beams(s, rng);
  w.w.col(1).setZero();
  const Iterate it = make_iterate(s, w, PairingMatrix::zeros(3, PairingMode::kRelaxed));
  const SurrogateCoeffs c = build_coeffs(s, it);
  EXPECT_EQ(c.users[1].f0, 0.0);
  EXPECT_EQ(c.users[1].xi, 0.0);
  EXPECT_EQ(eval_lower_bound_0k(c, s, w.w, it.a, it.mu, 1), 0.0);
}

TEST(BuildCoeffs, PairsBelowThresholdAreInactive) {
  std::mt19937_64 rng(3);
  const Scenario s = random_scenario(4, 2, rng);
  Mat a = Mat::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) a(i, j) = kEpsAct / 2;
  }
  const Iterate it = make_iterate(s, random_beams(s, rng), PairingMatrix(a, PairingMode::kRelaxed));
  const SurrogateCoeffs c = build_coeffs(s, it);
  ASSERT_EQ(c.pairs.size(), 6u);
  for (const auto& p : c.pairs) EXPECT_FALSE(p.active);
}

TEST(BuildCoeffs, RejectsNonFiniteInput) {
  std::mt19937_64 rng(4);
  const Scenario s = random_scenario(2, 2, rng);
  Iterate it = make_iterate(s, random_beams(s, rng), PairingMatrix::zeros(2, PairingMode::kRelaxed));
  it.w.w(0, 0) = Complex(std::nan(""), 0.0);
  EXPECT_THROW(build_coeffs(s, it), std::invalid_argument);
}

TEST(BuildCoeffs, CurvaturesArePositive) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Scenario s = random_scenario(5, 3, rng);
    const Iterate it = make_iterate(s, random_beams(s, rng), random_relaxed(5, rng));
    const SurrogateCoeffs c = build_coeffs(s, it);
    for (const auto& u : c.users) EXPECT_GT(u.xi, 0.0);
    for (const auto& p : c.pairs) {
      if (p.active) EXPECT_GT(p.theta, 0.0);
    }
  }
}

// Both bound families touch the relaxed log-SINR at the expansion point.
TEST(Surrogate, TouchesAtExpansionPoint) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 5;
    const Scenario s = random_scenario(k, 1 + trial % 3, rng);
    const Iterate it = make_iterate(s, random_beams(s, rng), random_relaxed(k, rng));
    for (bool fixed : {false, true}) {
      const SurrogateCoeffs c = build_coeffs(s, it, kEpsAct, kEpsV, fixed);
      for (Index u = 0; u < k; ++u) {
        const double truth = log_sinr_0k(s, it.w.w, it.a, u);
        EXPECT_NEAR(eval_lower_bound_0k(c, s, it.w.w, it.a, it.mu, u), truth,
                    1e-10 * std::max(1.0, truth));
      }
      for (const auto& p : c.pairs) {
        if (!p.active) continue;
        const double truth = log_sinr_lk(s, it.w.w, it.a, p.near, p.far);
        EXPECT_NEAR(eval_lower_bound_lk(c, s, it.w.w, it.a, it.mu, p.near, p.far), truth,
                    1e-10 * std::max(1.0, truth));
      }
    }
  }
}

// Perturbed candidates with tight mu stay below the true value.
TEST(Surrogate, MinorizesTheTrueRate) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const int k = 2 + trial % 4;
    const Scenario s = random_scenario(k, 2, rng);
    const Iterate it = make_iterate(s, random_beams(s, rng), random_relaxed(k, rng));
    const SurrogateCoeffs c = build_coeffs(s, it);
    for (int cand = 0; cand < 25; ++cand) {
      const CMat w = it.w.w + testing::random_cmat(s.n, k, rng, 0.3 * u(rng) * it.w.w.norm());
      Mat a = it.a.entries();
      for (const auto& p : c.pairs) {
        if (c.alpha_is_variable(p.near, p.far)) a(p.near, p.far) = u(rng);
      }
      const PairingMatrix pa(a, PairingMode::kRelaxed);
      const Mat mu = gain_matrix(s, w);
      for (Index v = 0; v < k; ++v) {
        EXPECT_LE(eval_lower_bound_0k(c, s, w, pa, mu, v), log_sinr_0k(s, w, pa, v) + 1e-9);
      }
      for (const auto& p : c.pairs) {
        if (!p.active || pa(p.near, p.far) <= 0.0) continue;
        EXPECT_LE(eval_lower_bound_lk(c, s, w, pa, mu, p.near, p.far),
                  log_sinr_lk(s, w, pa, p.near, p.far) + 1e-9);
      }
    }
  }
}

TEST(TightMu, AddsNoiseRelativeOffset) {
  std::mt19937_64 rng(8);
  const Scenario s = random_scenario(3, 2, rng);
  const BeamformerSet w = random_beams(s, rng);
  const Mat mu = tight_mu(s, w.w);
  const Mat g = gain_matrix(s, w.w);
  for (Index k = 0; k < 3; ++k) {
    for (Index l = 0; l < 3; ++l) EXPECT_NEAR(mu(k, l) - g(k, l), kMuOffset * s.noise_w(k), 1e-15);
  }
}

}  // namespace
}  // namespace noma
