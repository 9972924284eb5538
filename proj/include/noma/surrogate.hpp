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

#include <vector>

#include "noma/chanmodel.hpp"
#include "noma/core.hpp"
#include "noma/types.hpp"

namespace noma {

/// Smallest expansion value accepted by vhat, in units of the user's noise
/// power.
inline constexpr double kEpsV = 1e-6;
/// Pairs whose current alpha is below this get no pair-rate constraint.
inline constexpr double kEpsAct = 1e-2;
/// Offset added to |h_k^H w_l|^2 when refreshing mu, relative to noise.
inline constexpr double kMuOffset = 1e-12;

/// Convex upper bound of x z, tight at (x0, z0):
/// (x0 / 2 z0) z^2 + (z0 / 2 x0) x^2. Expansion values below eps_v are
/// clamped and counted in `clamped` when given.
double vhat(double x, double z, double x0, double z0, double eps_v = kEpsV,
            int* clamped = nullptr);

/// One SCA state. `a` is relaxed; `mu` bounds the cross gains from above.
struct Iterate {
  BeamformerSet w;
  PairingMatrix a;
  Mat mu;
  double eta = 0.0;
};

/// mu_{k,l} = |h_k^H w_l|^2 + kMuOffset * sigma_k^2.
Mat tight_mu(const Scenario& s, const CMat& w);

/// Iterate at (w, a) with tight mu and eta set to the relaxed min-rate.
Iterate make_iterate(const Scenario& s, const BeamformerSet& w, const PairingMatrix& a,
                     double eps_act = kEpsAct);

struct UserCoeffs {
  double f0 = 0.0;
  /// f1(w) = Re(f1_ref^H w_k).
  CVec f1_ref;
  double xi = 0.0;
};

struct PairCoeffs {
  int near = 0;
  int far = 0;
  bool active = false;
  double g0 = 0.0;
  /// g1(w) = Re(g1_ref^H w_far).
  CVec g1_ref;
  double theta = 0.0;
};

struct SurrogateCoeffs {
  std::vector<UserCoeffs> users;
  /// Every strictly upper-triangular (near, far) entry, row-major.
  std::vector<PairCoeffs> pairs;
  /// alpha held constant in the subproblem (always true in fixed mode).
  bool fixed_pairing = false;
  /// Expansion point for the product bounds.
  Mat alpha_ref;
  Mat mu_ref;
  double eps_act = kEpsAct;
  double eps_v = kEpsV;
  int clamped = 0;

  const PairCoeffs& pair(int near, int far) const;
  /// True when alpha_{k,l} is an optimization variable.
  bool alpha_is_variable(Index k, Index l) const;
};

/// Expands the log-SINR lower bounds around `it`. With `fixed_pairing`
/// alpha is treated as data and products with it stay exact.
SurrogateCoeffs build_coeffs(const Scenario& s, const Iterate& it, double eps_act = kEpsAct,
                             double eps_v = kEpsV, bool fixed_pairing = false);

/// Lower bound of ln(1 + gamma_{0,k}) at a candidate (w, a, mu).
double eval_lower_bound_0k(const SurrogateCoeffs& c, const Scenario& s, const CMat& w,
                           const PairingMatrix& a, const Mat& mu, Index k);

/// Lower bound of ln(1 + gamma_{l,k}) (near user ell decoding user k).
double eval_lower_bound_lk(const SurrogateCoeffs& c, const Scenario& s, const CMat& w,
                           const PairingMatrix& a, const Mat& mu, Index ell, Index k);

/// ln(1 + gamma_{0,k}) with relaxed alpha in the interference term.
double log_sinr_0k(const Scenario& s, const CMat& w, const PairingMatrix& a, Index k);

/// ln(1 + |h_l^H w_k|^2 / (alpha_{l,k} Psi_{l,k})).
double log_sinr_lk(const Scenario& s, const CMat& w, const PairingMatrix& a, Index ell,
                   Index k);

}  // namespace noma
