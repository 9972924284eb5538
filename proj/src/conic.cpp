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

#include "noma/conic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace noma {

namespace {

using Affine = ConeProgramBuilder::Affine;

// Re and Im of v^H w_user as affine forms in the real embedding.
std::pair<Affine, Affine> inner(const SubproblemLayout& lay, const CVec& v, Index user,
                                double scale) {
  Affine re, im;
  for (Index r = 0; r < v.size(); ++r) {
    const double a = v(r).real() * scale;
    const double b = v(r).imag() * scale;
    re.add(lay.w_re(r, user), a).add(lay.w_im(r, user), b);
    im.add(lay.w_im(r, user), a).add(lay.w_re(r, user), -b);
  }
  return {re, im};
}

// alpha_{k,l} as an affine form (variable or constant).
Affine alpha_form(const SubproblemLayout& lay, const Mat& alpha_const, Index k, Index l) {
  const int v = lay.alpha_var(k, l);
  if (v >= 0) return Affine().add(v, 1.0);
  return Affine(alpha_const(k, l));
}

bool has_terms(const Affine& a) { return !a.terms.empty(); }

}  // namespace

int SubproblemLayout::alpha_count() const { return static_cast<int>((alpha_var.array() >= 0).count()); }
int SubproblemLayout::mu_count() const { return static_cast<int>((mu_var.array() >= 0).count()); }

Vec SubproblemLayout::pack(const Iterate& it) const {
  Vec x = Vec::Zero(vars);
  for (Index u = 0; u < k; ++u) {
    for (Index r = 0; r < n; ++r) {
      x(w_re(r, u)) = it.w.w(r, u).real();
      x(w_im(r, u)) = it.w.w(r, u).imag();
    }
  }
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      if (alpha_var(i, j) >= 0) x(alpha_var(i, j)) = it.a(i, j);
      if (mu_var(i, j) >= 0) x(mu_var(i, j)) = it.mu(i, j) / mu_scale(i, j);
    }
  }
  x(eta) = it.eta;
  return x;
}

Iterate SubproblemLayout::unpack(const Vec& x, const Iterate& base) const {
  Iterate it = base;
  for (Index u = 0; u < k; ++u) {
    for (Index r = 0; r < n; ++r) it.w.w(r, u) = Complex(x(w_re(r, u)), x(w_im(r, u)));
  }
  for (Index i = 0; i < k; ++i) {
    for (Index j = 0; j < k; ++j) {
      if (alpha_var(i, j) >= 0) it.a.set(i, j, x(alpha_var(i, j)));
      if (mu_var(i, j) >= 0) it.mu(i, j) = x(mu_var(i, j)) * mu_scale(i, j);
    }
  }
  it.eta = x(eta);
  return it;
}

long nominal_constraint_count(int k) { return 6L * k * k + 3L * k + 1; }
long nominal_variable_count(int k, int n) { return static_cast<long>(n) * k + 1L * k * k + 1; }

Subproblem build_subproblem(const Scenario& s, const SurrogateCoeffs& c, const Iterate& it,
                            double eps_v) {
  const int K = s.k;
  if (static_cast<int>(c.users.size()) != K || it.w.w.rows() != s.n || it.w.w.cols() != K ||
      it.a.size() != K) {
    throw std::invalid_argument("build_subproblem: coefficient and iterate dimensions disagree");
  }
  Subproblem sp;
  SubproblemLayout& lay = sp.layout;
  lay.k = K;
  lay.n = s.n;
  lay.alpha_var = Eigen::MatrixXi::Constant(K, K, -1);
  lay.mu_var = Eigen::MatrixXi::Constant(K, K, -1);
  lay.mu_scale = Mat::Ones(K, K);
  int next = 2 * s.n * K;
  for (int i = 0; i < K; ++i) {
    for (int j = i + 1; j < K; ++j) {
      if (c.alpha_is_variable(i, j)) lay.alpha_var(i, j) = next++;
    }
  }
  // mu is needed wherever it multiplies a variable alpha.
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> need =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(K, K, false);
  for (int i = 0; i < K; ++i) {
    for (int j = i + 1; j < K; ++j) {
      if (lay.alpha_var(i, j) < 0) continue;
      need(i, j) = true;
      for (int l = 0; l < K; ++l) {
        if (l != j) need(i, l) = true;
      }
    }
  }
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      if (!need(i, j)) continue;
      lay.mu_var(i, j) = next++;
      lay.mu_scale(i, j) = c.mu_ref(i, j);
    }
  }
  lay.eta = next++;
  lay.vars = next;

  const Mat& alpha_const = it.a.entries();
  ConeProgramBuilder b(lay.vars);
  b.set_objective(lay.eta, -1.0);

  // Power budget.
  {
    std::vector<Affine> u;
    u.reserve(2 * s.n * K);
    for (int v = 0; v < 2 * s.n * K; ++v) u.push_back(Affine().add(v, 1.0));
    b.add_soc(Affine(std::sqrt(s.p_max_w)), u);
  }

  // Relaxed box and pairing structure.
  for (int i = 0; i < K; ++i) {
    for (int j = i + 1; j < K; ++j) {
      const int v = lay.alpha_var(i, j);
      if (v < 0) continue;
      b.add_nonnegative(Affine().add(v, 1.0));
      b.add_nonnegative(Affine(1.0 - eps_v).add(v, -1.0));
    }
  }
  auto add_at_most_one = [&](const std::vector<std::pair<int, int>>& entries) {
    Affine slack(1.0);
    for (const auto& [i, j] : entries) slack += alpha_form(lay, alpha_const, i, j).scaled(-1.0);
    if (has_terms(slack)) b.add_nonnegative(slack);
  };
  for (int l = 0; l < K; ++l) {
    std::vector<std::pair<int, int>> col, row;
    for (int i = 0; i < l; ++i) col.emplace_back(i, l);
    for (int j = l + 1; j < K; ++j) row.emplace_back(l, j);
    add_at_most_one(col);
    add_at_most_one(row);
  }
  for (int i = 0; i < K; ++i) {
    for (int j = i + 1; j < K; ++j) {
      // Far user j cannot be a near user; near user i cannot be a far user.
      std::vector<std::pair<int, int>> far_near{{i, j}}, near_far{{i, j}};
      for (int q = j + 1; q < K; ++q) far_near.emplace_back(j, q);
      for (int q = 0; q < i; ++q) near_far.emplace_back(q, i);
      add_at_most_one(far_near);
      add_at_most_one(near_far);
    }
  }

  // mu_{k,l} >= |h_k^H w_l|^2, scaled, with a loose upper bound.
  for (int i = 0; i < K; ++i) {
    for (int j = 0; j < K; ++j) {
      const int v = lay.mu_var(i, j);
      if (v < 0) continue;
      const double sc = lay.mu_scale(i, j);
      auto [re, im] = inner(lay, s.h(i), j, 1.0 / std::sqrt(sc));
      const Affine u[] = {re, im};
      b.add_quadratic(u, Affine().add(v, 1.0));
      const double cap = (s.h(i).squaredNorm() * s.p_max_w + s.noise_w(i)) / sc + 1.0;
      b.add_nonnegative(Affine(cap).add(v, -1.0));
    }
  }

  // Own-signal rate bounds.
  for (int k = 0; k < K; ++k) {
    const UserCoeffs& uc = c.users[k];
    Affine r(uc.f0 - uc.xi * s.noise_w(k));
    r += inner(lay, uc.f1_ref, k, 2.0).first;
    r.add(lay.eta, -1.0);
    if (uc.xi <= 0.0) {
      b.add_nonnegative(r);
      continue;
    }
    const double rx = std::sqrt(uc.xi);
    std::vector<Affine> u;
    auto [sre, sim] = inner(lay, s.h(k), k, rx);
    u.push_back(sre);
    u.push_back(sim);
    for (int l = 0; l < K; ++l) {
      if (l == k) continue;
      if (lay.alpha_var(k, l) >= 0) {
        const double x0 = std::max(1.0 - c.alpha_ref(k, l), eps_v);
        const double z0 = c.mu_ref(k, l);
        const double sc = lay.mu_scale(k, l);
        u.push_back(Affine().add(lay.mu_var(k, l), std::sqrt(uc.xi * x0 / (2.0 * z0)) * sc));
        u.push_back(Affine(1.0).add(lay.alpha_var(k, l), -1.0).scaled(
            std::sqrt(uc.xi * z0 / (2.0 * x0))));
      } else {
        const double keep = 1.0 - alpha_const(k, l);
        if (keep <= 0.0) continue;
        auto [re, im] = inner(lay, s.h(k), l, rx * std::sqrt(keep));
        u.push_back(re);
        u.push_back(im);
      }
    }
    b.add_quadratic(u, r);
  }

  // Pair rate bounds at the near user.
  for (const PairCoeffs& p : c.pairs) {
    if (!p.active) continue;
    const int ell = p.near;
    const int k = p.far;
    const int av = lay.alpha_var(ell, k);
    Affine r(p.g0);
    r += inner(lay, p.g1_ref, k, 2.0).first;
    r.add(lay.eta, -1.0);
    r += alpha_form(lay, alpha_const, ell, k).scaled(-p.theta * s.noise_w(ell));
    if (p.theta <= 0.0) {
      b.add_nonnegative(r);
      continue;
    }
    const double rt = std::sqrt(p.theta);
    std::vector<Affine> u;
    auto [sre, sim] = inner(lay, s.h(ell), k, rt);
    u.push_back(sre);
    u.push_back(sim);
    for (int l = 0; l < K; ++l) {
      if (l == k) continue;
      if (av >= 0) {
        const double x0 = c.alpha_ref(ell, k);
        const double z0 = c.mu_ref(ell, l);
        const double sc = lay.mu_scale(ell, l);
        u.push_back(Affine().add(lay.mu_var(ell, l), std::sqrt(p.theta * x0 / (2.0 * z0)) * sc));
        u.push_back(Affine().add(av, std::sqrt(p.theta * z0 / (2.0 * x0))));
      } else {
        const double a = alpha_const(ell, k);
        auto [re, im] = inner(lay, s.h(ell), l, rt * std::sqrt(a));
        u.push_back(re);
        u.push_back(im);
      }
    }
    b.add_quadratic(u, r);
  }

  sp.program = b.build();
  sp.counts.nominal_constraints = nominal_constraint_count(K);
  sp.counts.nominal_variables = nominal_variable_count(K, s.n);
  sp.counts.real_variables = lay.vars;
  sp.counts.linear_rows = sp.program.cones.linear;
  sp.counts.cones = static_cast<int>(sp.program.cones.soc.size());
  sp.counts.rows = sp.program.rows();
  return sp;
}

std::optional<Vec> interior_start(const Subproblem& sp, const Iterate& it) {
  const SubproblemLayout& lay = sp.layout;
  Iterate start = it;
  // Lift mu slightly off the cone boundary.
  for (Index i = 0; i < lay.k; ++i) {
    for (Index j = 0; j < lay.k; ++j) {
      if (lay.mu_var(i, j) >= 0) start.mu(i, j) = it.mu(i, j) * (1.0 + 1e-6) + 1e-9 * lay.mu_scale(i, j);
    }
  }
  Vec x = lay.pack(start);
  const double eta0 = it.eta;
  double drop = 1e-7 * (1.0 + std::abs(eta0));
  for (int attempt = 0; attempt < 30; ++attempt) {
    x(lay.eta) = eta0 - drop;
    if (cone::min_margin(sp.program.cones, sp.program.slack(x)) > 0.0) return x;
    drop *= 4.0;
  }
  return std::nullopt;
}

SolveOutcome solve_subproblem(const Subproblem& sp, const Iterate& base,
                              const ConeSolver& solver, const ConeSolverOptions& opts,
                              bool warm_start) {
  SolveOutcome out;
  std::optional<Vec> x0;
  if (warm_start) x0 = interior_start(sp, base);
  out.warm_started = x0.has_value();
  const ConeSolution sol = solver.solve(sp.program, opts, x0 ? &*x0 : nullptr);
  out.status = sol.status;
  out.iterations = sol.iterations;
  out.gap = sol.gap;
  out.max_violation = sol.max_violation;
  out.message = sol.message;
  if (sol.status != SolveStatus::kOptimal) {
    out.point = base;
    return out;
  }
  out.point = sp.layout.unpack(sol.x, base);
  out.eta = out.point.eta;
  // Clip relaxed alpha round-off back into the box.
  for (Index i = 0; i < sp.layout.k; ++i) {
    for (Index j = 0; j < sp.layout.k; ++j) {
      if (sp.layout.alpha_var(i, j) >= 0) {
        out.point.a.set(i, j, std::clamp(out.point.a(i, j), 0.0, 1.0));
      }
    }
  }
  return out;
}

void write_subproblem(std::ostream& out, const Subproblem& sp) {
  const SubproblemLayout& lay = sp.layout;
  out << "# subproblem k " << lay.k << " n " << lay.n << "\n";
  out << "# layout w 0.." << 2 * lay.k * lay.n - 1 << " alpha " << lay.alpha_count() << " mu "
      << lay.mu_count() << " eta " << lay.eta << "\n";
  out << "# counts nominal_constraints " << sp.counts.nominal_constraints << " nominal_variables "
      << sp.counts.nominal_variables << " real_variables " << sp.counts.real_variables
      << " rows " << sp.counts.rows << "\n";
  for (Index i = 0; i < lay.k; ++i) {
    for (Index j = 0; j < lay.k; ++j) {
      if (lay.alpha_var(i, j) >= 0) {
        out << "# alpha " << i << ' ' << j << " -> " << lay.alpha_var(i, j) << "\n";
      }
      if (lay.mu_var(i, j) >= 0) {
        out << "# mu " << i << ' ' << j << " -> " << lay.mu_var(i, j) << " scale "
            << lay.mu_scale(i, j) << "\n";
      }
    }
  }
  write_cone_program(out, sp.program);
}

}  // namespace noma
