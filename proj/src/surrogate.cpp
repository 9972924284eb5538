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

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace noma {

namespace {

double vhat_raw(double x, double z, double x0, double z0) {
  return x0 / (2.0 * z0) * z * z + z0 / (2.0 * x0) * x * x;
}

double psi_of(const Scenario& s, const CMat& w, Index ell, Index k) {
  double total = s.noise_w(ell);
  for (Index l = 0; l < s.k; ++l) {
    if (l != k) total += std::norm(s.h(ell).dot(w.col(l)));
  }
  return total;
}

double phi_of(const Scenario& s, const CMat& w, const PairingMatrix& a, Index k) {
  double total = s.noise_w(k);
  for (Index l = 0; l < s.k; ++l) {
    if (l != k) total += (1.0 - a(k, l)) * std::norm(s.h(k).dot(w.col(l)));
  }
  return total;
}

}  // namespace

double vhat(double x, double z, double x0, double z0, double eps_v, int* clamped) {
  if (x0 < eps_v || z0 < eps_v) {
    if (clamped) ++*clamped;
    x0 = std::max(x0, eps_v);
    z0 = std::max(z0, eps_v);
  }
  return vhat_raw(x, z, x0, z0);
}

Mat tight_mu(const Scenario& s, const CMat& w) {
  Mat mu = gain_matrix(s, w);
  for (Index k = 0; k < s.k; ++k) mu.row(k).array() += kMuOffset * s.noise_w(k);
  return mu;
}

Iterate make_iterate(const Scenario& s, const BeamformerSet& w, const PairingMatrix& a,
                     double eps_act) {
  Iterate it{w, a.as_relaxed(), tight_mu(s, w.w), 0.0};
  it.eta = relaxed_rate_report(s, w, it.a, eps_act).min_rate_nats;
  return it;
}

const PairCoeffs& SurrogateCoeffs::pair(int near, int far) const {
  const int k = static_cast<int>(users.size());
  // Row-major index into the strict upper triangle.
  const int idx = near * k - near * (near + 1) / 2 + (far - near - 1);
  return pairs.at(idx);
}

bool SurrogateCoeffs::alpha_is_variable(Index k, Index l) const {
  if (fixed_pairing || k >= l) return false;
  return pair(static_cast<int>(k), static_cast<int>(l)).active;
}

SurrogateCoeffs build_coeffs(const Scenario& s, const Iterate& it, double eps_act,
                             double eps_v, bool fixed_pairing) {
  if (!s.channels.allFinite() || !it.w.w.allFinite()) {
    throw std::invalid_argument("build_coeffs: non-finite channel or beamformer entries");
  }
  if (it.w.w.rows() != s.n || it.w.w.cols() != s.k || it.a.size() != s.k ||
      it.mu.rows() != s.k || it.mu.cols() != s.k) {
    throw std::invalid_argument("build_coeffs: iterate dimensions do not match scenario");
  }
  const CMat& w = it.w.w;
  SurrogateCoeffs c;
  c.fixed_pairing = fixed_pairing;
  c.eps_act = eps_act;
  c.eps_v = eps_v;
  c.alpha_ref = it.a.entries();
  c.mu_ref = it.mu;
  for (Index k = 0; k < s.k; ++k) {
    for (Index l = 0; l < s.k; ++l) {
      const double floor = eps_v * s.noise_w(k);
      if (c.mu_ref(k, l) < floor) {
        c.mu_ref(k, l) = floor;
        ++c.clamped;
      }
    }
  }

  c.users.resize(s.k);
  for (Index k = 0; k < s.k; ++k) {
    const Complex x0 = s.h(k).dot(w.col(k));
    const double phi0 = phi_of(s, w, it.a, k);
    const double sig = std::norm(x0);
    const double gamma = sig / phi0;
    UserCoeffs& u = c.users[k];
    u.f0 = std::log1p(gamma) - gamma;
    u.f1_ref = s.h(k) * (x0 / phi0);
    u.xi = 1.0 / phi0 - 1.0 / (phi0 + sig);
  }

  for (int ell = 0; ell < s.k; ++ell) {
    for (int k = ell + 1; k < s.k; ++k) {
      PairCoeffs p;
      p.near = ell;
      p.far = k;
      const double alpha = it.a(ell, k);
      p.active = alpha >= eps_act;
      if (p.active) {
        const double a0 = std::clamp(alpha, eps_act, 1.0);
        const Complex y0 = s.h(ell).dot(w.col(k));
        const double den = a0 * psi_of(s, w, ell, k);
        const double sig = std::norm(y0);
        const double gamma = sig / den;
        p.g0 = std::log1p(gamma) - gamma;
        p.g1_ref = s.h(ell) * (y0 / den);
        p.theta = 1.0 / den - 1.0 / (den + sig);
      }
      c.pairs.push_back(std::move(p));
    }
  }
  // 1 - alpha is an expansion value of the interference products.
  if (!fixed_pairing) {
    for (const auto& p : c.pairs) {
      if (p.active && 1.0 - c.alpha_ref(p.near, p.far) < eps_v) ++c.clamped;
    }
  }
  return c;
}

double eval_lower_bound_0k(const SurrogateCoeffs& c, const Scenario& s, const CMat& w,
                           const PairingMatrix& a, const Mat& mu, Index k) {
  const UserCoeffs& u = c.users[k];
  double f2 = std::norm(s.h(k).dot(w.col(k))) + s.noise_w(k);
  for (Index l = 0; l < s.k; ++l) {
    if (l == k) continue;
    if (c.alpha_is_variable(k, l)) {
      f2 += vhat_raw(1.0 - a(k, l), mu(k, l), std::max(1.0 - c.alpha_ref(k, l), c.eps_v),
                     c.mu_ref(k, l));
    } else {
      f2 += (1.0 - a(k, l)) * std::norm(s.h(k).dot(w.col(l)));
    }
  }
  return u.f0 + 2.0 * u.f1_ref.dot(w.col(k)).real() - u.xi * f2;
}

double eval_lower_bound_lk(const SurrogateCoeffs& c, const Scenario& s, const CMat& w,
                           const PairingMatrix& a, const Mat& mu, Index ell, Index k) {
  const PairCoeffs& p = c.pair(static_cast<int>(ell), static_cast<int>(k));
  const double alpha = a(ell, k);
  double g2 = std::norm(s.h(ell).dot(w.col(k))) + alpha * s.noise_w(ell);
  const bool variable = c.alpha_is_variable(ell, k);
  for (Index l = 0; l < s.k; ++l) {
    if (l == k) continue;
    if (variable) {
      g2 += vhat_raw(alpha, mu(ell, l), c.alpha_ref(ell, k), c.mu_ref(ell, l));
    } else {
      g2 += alpha * std::norm(s.h(ell).dot(w.col(l)));
    }
  }
  return p.g0 + 2.0 * p.g1_ref.dot(w.col(k)).real() - p.theta * g2;
}

double log_sinr_0k(const Scenario& s, const CMat& w, const PairingMatrix& a, Index k) {
  return std::log1p(std::norm(s.h(k).dot(w.col(k))) / phi_of(s, w, a, k));
}

double log_sinr_lk(const Scenario& s, const CMat& w, const PairingMatrix& a, Index ell,
                   Index k) {
  return std::log1p(std::norm(s.h(ell).dot(w.col(k))) / (a(ell, k) * psi_of(s, w, ell, k)));
}

}  // namespace noma
