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

#include <cmath>
#include <limits>
#include <vector>

#include "noma/cone.hpp"
#include "normal_assembler.hpp"

namespace noma {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double jnorm_sq(const Eigen::Ref<const Vec>& v) {
  return v(0) * v(0) - v.tail(v.size() - 1).squaredNorm();
}

// Nesterov-Todd scaling of the product cone. W is symmetric; for a
// second-order cone W = eta (2 v v' - J) where v' J v = 1 and v is the
// Jordan square root of the scaling point wbar, so W^2 = eta^2 (2 wbar wbar' - J).
class NtScaling {
 public:
  NtScaling(const ConeDims& dims, const Vec& s, const Vec& z) : dims_(dims) {
    lin_w_ = (s.head(dims.linear).array() / z.head(dims.linear).array()).sqrt();
    Index off = dims.linear;
    for (int d : dims.soc) {
      const auto ss = s.segment(off, d);
      const auto zs = z.segment(off, d);
      const double sn = std::sqrt(std::max(jnorm_sq(ss), 1e-300));
      const double zn = std::sqrt(std::max(jnorm_sq(zs), 1e-300));
      const Vec sb = ss / sn;
      Vec jz = zs / zn;
      jz.tail(d - 1) *= -1.0;
      const double gamma = std::sqrt(std::max((1.0 + (zs / zn).dot(sb)) / 2.0, 1e-300));
      Soc c;
      c.off = off;
      c.dim = d;
      c.eta = std::sqrt(sn / zn);
      c.wbar = (sb + jz) / (2.0 * gamma);
      c.w = c.wbar;
      c.w(0) += 1.0;
      c.w /= std::sqrt(2.0 * (1.0 + c.wbar(0)));
      socs_.push_back(std::move(c));
      off += d;
    }
  }

  Vec apply(const Vec& v) const { return transform(v, false); }
  Vec apply_inverse(const Vec& v) const { return transform(v, true); }
  Vec apply_inverse_sq(const Vec& v) const { return apply_inverse(apply_inverse(v)); }
  Vec apply_sq(const Vec& v) const { return apply(apply(v)); }

  // K = G^T W^{-2} G.
  Mat normal_matrix(const detail::NormalAssembler& assembler, Index m) const {
    Vec d(m);
    d.head(dims_.linear) = lin_w_.cwiseAbs2().cwiseInverse();
    std::vector<Triplet> plus, minus;
    Index col_p = 0, col_m = 0;
    for (const auto& c : socs_) {
      const double inv2 = 1.0 / (c.eta * c.eta);
      d.segment(c.off, c.dim).setConstant(inv2);
      // W^{-2} = (I + 2 a a' - 2 e0 e0') / eta^2 with a = J wbar.
      const double f = std::sqrt(2.0) / c.eta;
      plus.emplace_back(c.off, col_p, f * c.wbar(0));
      for (int i = 1; i < c.dim; ++i) plus.emplace_back(c.off + i, col_p, -f * c.wbar(i));
      minus.emplace_back(c.off, col_m, f);
      col_p += 1;
      col_m += 1;
    }
    SpMat vp(m, col_p), vm(m, col_m);
    vp.setFromTriplets(plus.begin(), plus.end());
    vm.setFromTriplets(minus.begin(), minus.end());
    return assembler.assemble(d, vp, vm);
  }

 private:
  struct Soc {
    Index off;
    int dim;
    double eta;
    Vec w;
    Vec wbar;
  };

  Vec transform(const Vec& v, bool inverse) const {
    Vec out(v.size());
    if (inverse) {
      out.head(dims_.linear) = v.head(dims_.linear).cwiseQuotient(lin_w_);
    } else {
      out.head(dims_.linear) = v.head(dims_.linear).cwiseProduct(lin_w_);
    }
    for (const auto& c : socs_) {
      const auto vs = v.segment(c.off, c.dim);
      Vec jv = vs;
      jv.tail(c.dim - 1) *= -1.0;
      if (inverse) {
        // W^{-1} = (2 a a' - J) / eta with a = J w.
        Vec a = c.w;
        a.tail(c.dim - 1) *= -1.0;
        out.segment(c.off, c.dim) = (2.0 * a.dot(vs) * a - jv) / c.eta;
      } else {
        out.segment(c.off, c.dim) = c.eta * (2.0 * c.w.dot(vs) * c.w - jv);
      }
    }
    return out;
  }

  const ConeDims& dims_;
  Vec lin_w_;
  std::vector<Soc> socs_;
};

// Pushes a vector into the cone interior: v + (1 + alpha) e when needed.
Vec shift_interior(const ConeDims& dims, Vec v) {
  const double alpha = -cone::min_margin(dims, v);
  if (alpha >= -1e-8) v += (1.0 + alpha) * cone::identity(dims);
  return v;
}

}  // namespace

ConeSolution PrimalDualSolver::solve(const ConeProgram& p, const ConeSolverOptions& opts,
                                     const Vec*) const {
  p.validate();
  const ConeDims& dims = p.cones;
  const Index n = p.vars();
  const Index m = p.rows();
  const double degree = dims.complementarity_degree();
  const detail::NormalAssembler assembler(p.G);
  const SpMat& G = p.G;
  const SpMat& Gt = assembler.Gt();
  const Vec e = cone::identity(dims);

  ConeSolution out;
  Eigen::LLT<Mat> llt;

  // Initial point from two least-squares problems.
  Vec x, s, z;
  {
    const Mat gtg = assembler.assemble(Vec::Ones(m), SpMat(m, 0), SpMat(m, 0));
    if (!detail::factor_spd(gtg, llt)) {
      out.status = SolveStatus::kNumericalFailure;
      out.message = "G has dependent columns";
      return out;
    }
    x = llt.solve(Gt * p.h);
    s = shift_interior(dims, p.h - G * x);
    const Vec xd = llt.solve(-p.c);
    z = shift_interior(dims, G * xd);
  }
  double tau = 1.0, kappa = 1.0;
  const double hnorm = std::max(1.0, p.h.norm());
  const double cnorm = std::max(1.0, p.c.norm());

  auto solve_kkt = [&](const NtScaling& W, const Vec& bx, const Vec& bz, Vec& dx, Vec& dz) {
    dx = llt.solve(bx + Gt * W.apply_inverse_sq(bz));
    dz = W.apply_inverse_sq(G * dx - bz);
    for (int refine = 0; refine < 2; ++refine) {
      const Vec r1 = bx - Gt * dz;
      const Vec r2 = bz - (G * dx - W.apply_sq(dz));
      const Vec ddx = llt.solve(r1 + Gt * W.apply_inverse_sq(r2));
      dx += ddx;
      dz += W.apply_inverse_sq(G * ddx - r2);
    }
  };

  for (int iter = 0; iter <= opts.max_iterations; ++iter) {
    out.iterations = iter;
    const Vec rx = Gt * z + p.c * tau;
    const Vec rz = G * x + s - p.h * tau;
    const double cx = p.c.dot(x), hz = p.h.dot(z);
    const double rt = kappa + cx + hz;
    const double mu = (s.dot(z) + tau * kappa) / (degree + 1.0);

    const double pres = rz.norm() / tau / hnorm;
    const double dres = rx.norm() / tau / cnorm;
    const double pcost = cx / tau;
    const double dcost = -hz / tau;
    const double gap = s.dot(z) / (tau * tau);
    const double relgap = gap / std::max(1e-12, std::min(std::abs(pcost), std::abs(dcost)));
    out.gap = gap;

    if (pres < opts.feastol && dres < opts.feastol &&
        (gap < opts.gap_tol || relgap < opts.gap_tol)) {
      out.status = SolveStatus::kOptimal;
      break;
    }
    if (hz < 0.0 && (Gt * z).norm() / -hz < opts.feastol) {
      out.status = SolveStatus::kInfeasible;
      out.message = "primal infeasibility certificate found";
      break;
    }
    if (cx < 0.0 && (G * x + s).norm() / -cx < opts.feastol) {
      out.status = SolveStatus::kUnbounded;
      out.message = "dual infeasibility certificate found";
      break;
    }
    if (iter == opts.max_iterations) {
      out.status = SolveStatus::kNumericalFailure;
      out.message = "iteration limit reached";
      break;
    }

    const NtScaling W(dims, s, z);
    const Vec lambda = W.apply(z);
    if (!detail::factor_spd(W.normal_matrix(assembler, m), llt)) {
      out.status = SolveStatus::kNumericalFailure;
      out.message = "KKT system could not be factored";
      break;
    }
    Vec x1, z1;
    solve_kkt(W, -p.c, p.h, x1, z1);
    const double denom = p.c.dot(x1) + p.h.dot(z1) - kappa / tau;

    auto direction = [&](double sigma, const Vec& rs, double rk, Vec& dx, Vec& dz, Vec& ds,
                         double& dtau, double& dkappa) {
      const Vec lrs = cone::divide(dims, lambda, rs);
      const Vec bx = -(1.0 - sigma) * rx;
      const Vec bz = -(1.0 - sigma) * rz - W.apply(lrs);
      Vec x2, z2;
      solve_kkt(W, bx, bz, x2, z2);
      dtau = (-(1.0 - sigma) * rt - p.c.dot(x2) - p.h.dot(z2) - rk / tau) / denom;
      dx = x2 + dtau * x1;
      dz = z2 + dtau * z1;
      ds = W.apply(lrs - W.apply(dz));
      dkappa = (rk - kappa * dtau) / tau;
    };
    auto step_length = [&](const Vec& ds, const Vec& dz, double dtau, double dkappa) {
      double a = std::min(cone::max_step(dims, s, ds), cone::max_step(dims, z, dz));
      if (dtau < 0.0) a = std::min(a, -tau / dtau);
      if (dkappa < 0.0) a = std::min(a, -kappa / dkappa);
      return a;
    };

    // Predictor.
    Vec dx, dz, ds;
    double dtau, dkappa;
    const Vec ll = cone::product(dims, lambda, lambda);
    direction(0.0, -ll, -tau * kappa, dx, dz, ds, dtau, dkappa);
    const double a_aff = std::min(1.0, step_length(ds, dz, dtau, dkappa));
    const double sigma = std::clamp(std::pow(1.0 - a_aff, 3), 0.0, 1.0);

    // Corrector.
    const Vec corr = cone::product(dims, W.apply_inverse(ds), W.apply(dz));
    const Vec rs = -ll - corr + sigma * mu * e;
    const double rk = -tau * kappa - dtau * dkappa + sigma * mu;
    direction(sigma, rs, rk, dx, dz, ds, dtau, dkappa);
    double a = step_length(ds, dz, dtau, dkappa);
    a = std::min(1.0, 0.99 * a);
    if (!(a > 1e-14) || !dx.allFinite()) {
      out.status = SolveStatus::kNumericalFailure;
      out.message = "step length collapsed";
      break;
    }
    x += a * dx;
    s += a * ds;
    z += a * dz;
    tau += a * dtau;
    kappa += a * dkappa;
  }

  if (out.status == SolveStatus::kInfeasible) {
    out.x = Vec::Zero(n);
    out.z = z / -p.h.dot(z);
  } else if (out.status == SolveStatus::kUnbounded) {
    out.x = x / -p.c.dot(x);
    out.z = Vec::Zero(m);
  } else {
    out.x = x / tau;
    out.z = z / tau;
  }
  out.objective = p.c.dot(out.x);
  out.max_violation = std::max(0.0, -cone::min_margin(dims, p.slack(out.x)));
  if (out.status == SolveStatus::kOptimal && out.max_violation > opts.feastol * hnorm) {
    out.status = SolveStatus::kNumericalFailure;
    out.message = "recovered point violates the cone beyond tolerance";
  }
  return out;
}

}  // namespace noma
