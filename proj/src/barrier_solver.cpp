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

#include "noma/cone.hpp"
#include "normal_assembler.hpp"

namespace noma {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log-barrier of the product cone; +inf outside the interior.
double barrier_value(const ConeDims& dims, const Vec& s) {
  double v = 0.0;
  for (Index i = 0; i < dims.linear; ++i) {
    if (!(s(i) > 0.0)) return kInf;
    v -= std::log(s(i));
  }
  Index off = dims.linear;
  for (int d : dims.soc) {
    const double t = s(off);
    const double q = t * t - (d > 1 ? s.segment(off + 1, d - 1).squaredNorm() : 0.0);
    if (!(t > 0.0) || !(q > 0.0)) return kInf;
    v -= std::log(q);
    off += d;
  }
  return v;
}

struct BarrierDerivatives {
  Vec r;      // grad_x phi(h - G x) = G^T r
  Vec diag;   // Hessian: G^T diag G + (G^T V)(G^T V)^T
  SpMat v;
};

BarrierDerivatives barrier_derivatives(const ConeDims& dims, const Vec& s) {
  const Index m = s.size();
  BarrierDerivatives out;
  out.r.resize(m);
  out.diag.resize(m);
  out.v.resize(m, static_cast<Index>(dims.soc.size()));
  std::vector<Triplet> trips;
  for (Index i = 0; i < dims.linear; ++i) {
    out.r(i) = 1.0 / s(i);
    out.diag(i) = 1.0 / (s(i) * s(i));
  }
  Index off = dims.linear;
  for (std::size_t j = 0; j < dims.soc.size(); ++j) {
    const int d = dims.soc[j];
    const double t = s(off);
    const double q = t * t - (d > 1 ? s.segment(off + 1, d - 1).squaredNorm() : 0.0);
    const double f = 2.0 / q;
    out.r(off) = f * t;
    out.diag(off) = -f;
    trips.emplace_back(off, static_cast<Index>(j), f * t);
    for (int i = 1; i < d; ++i) {
      out.r(off + i) = -f * s(off + i);
      out.diag(off + i) = f;
      trips.emplace_back(off + i, static_cast<Index>(j), -f * s(off + i));
    }
    off += d;
  }
  out.v.setFromTriplets(trips.begin(), trips.end());
  return out;
}

struct PathResult {
  Vec x;
  Vec z;
  double t = 0.0;
  double gap = kInf;
  double dual_residual = kInf;
  int newton_steps = 0;
  bool converged = false;
  bool stopped = false;
  bool diverged = false;
  bool stalled = false;
};

// Follows the central path of min t c'x + phi(h - Gx) from an interior x.
// `stop(x)` is polled after every Newton step.
template <typename Stop>
PathResult follow_path(const ConeProgram& p, Vec x, int max_newton, double gap_tol,
                       Stop&& stop) {
  const ConeDims& dims = p.cones;
  const double degree = dims.barrier_degree();
  const detail::NormalAssembler assembler(p.G);
  const SpMat empty(p.rows(), 0);
  constexpr double kGrowth = 12.0;

  PathResult res;
  Vec s = p.slack(x);
  Eigen::LLT<Mat> llt;

  // Initial t balances the objective against the barrier gradient.
  {
    const auto der = barrier_derivatives(dims, s);
    const Mat H = assembler.assemble(der.diag, der.v, empty);
    double t0 = 1.0;
    if (detail::factor_spd(H, llt)) {
      const Vec hc = llt.solve(p.c);
      const Vec g = p.G.transpose() * der.r;
      const double denom = p.c.dot(hc);
      if (denom > 0.0) t0 = -g.dot(hc) / denom;
    }
    const double scale = std::max(1.0, std::abs(p.c.dot(x)));
    if (!(t0 > 0.0) || !std::isfinite(t0)) t0 = degree / scale;
    res.t = std::clamp(t0, 1e-8, 1e6 * degree / scale);
  }

  while (true) {
    // Centering.
    bool centered = false;
    BarrierDerivatives der;
    while (res.newton_steps < max_newton) {
      der = barrier_derivatives(dims, s);
      const Vec grad = res.t * p.c + p.G.transpose() * der.r;
      const Mat H = assembler.assemble(der.diag, der.v, empty);
      if (!detail::factor_spd(H, llt)) {
        res.stalled = true;
        break;
      }
      const Vec dx = -llt.solve(grad);
      const double decrement = -grad.dot(dx);
      ++res.newton_steps;
      if (!(decrement >= 0.0) || !std::isfinite(decrement)) {
        res.stalled = true;
        break;
      }
      if (decrement < 1e-10) {
        centered = true;
        break;
      }
      const Vec ds = -(p.G * dx);
      double step = std::min(1.0, 0.99 * cone::max_step(dims, s, ds));
      const double phi0 = barrier_value(dims, s);
      const double slope = grad.dot(dx);
      bool accepted = false;
      while (step > 1e-14) {
        const Vec s_new = s + step * ds;
        const double phi1 = barrier_value(dims, s_new);
        if (std::isfinite(phi1)) {
          const double df = res.t * step * p.c.dot(dx) + (phi1 - phi0);
          if (df <= 0.01 * step * slope || decrement < 1e-6) {
            x += step * dx;
            s = p.slack(x);
            if (cone::min_margin(dims, s) <= 0.0) {
              // Recomputed slack rounding pushed us out; undo partially.
              x -= 0.5 * step * dx;
              s = p.slack(x);
            }
            accepted = true;
            break;
          }
        }
        step *= 0.5;
      }
      if (!x.allFinite() || x.lpNorm<Eigen::Infinity>() > 1e14) {
        res.diverged = true;
        break;
      }
      if (stop(x)) {
        res.stopped = true;
        break;
      }
      if (!accepted) {
        // No progress possible at this precision; treat as centered.
        centered = true;
        break;
      }
      if (decrement < 1e-6 && step >= 0.99) {
        centered = true;
        break;
      }
    }
    if (res.stopped || res.diverged || res.stalled) break;
    if (!centered) break;  // Newton budget exhausted

    der = barrier_derivatives(dims, s);
    res.z = der.r / res.t;
    res.dual_residual = (p.G.transpose() * res.z + p.c).lpNorm<Eigen::Infinity>();
    res.gap = degree / res.t;
    if (res.gap <= gap_tol) {
      res.converged = true;
      break;
    }
    res.t *= std::min(kGrowth, std::max(1.0001, res.gap / gap_tol));
  }
  res.x = std::move(x);
  return res;
}

ConeSolution finish(const ConeProgram& p, PathResult&& path, int phase1_steps,
                    const ConeSolverOptions& opts) {
  ConeSolution out;
  out.iterations = path.newton_steps + phase1_steps;
  out.x = std::move(path.x);
  out.z = std::move(path.z);
  out.objective = p.c.dot(out.x);
  out.gap = path.gap;
  out.max_violation = std::max(0.0, -cone::min_margin(p.cones, p.slack(out.x)));
  if (path.diverged) {
    out.status = SolveStatus::kUnbounded;
    out.message = "iterates diverged; objective appears unbounded below";
  } else if (path.converged) {
    out.status = SolveStatus::kOptimal;
  } else if (path.gap <= std::max(opts.gap_tol * 100.0, 1e-6) && out.max_violation == 0.0) {
    // Centering stalled at the precision limit close to the optimum.
    out.status = SolveStatus::kOptimal;
    out.message = "stopped at precision limit";
  } else {
    out.status = SolveStatus::kNumericalFailure;
    out.message = path.stalled ? "Newton system could not be factored"
                               : "iteration limit reached";
  }
  return out;
}

}  // namespace

ConeSolution BarrierSolver::solve(const ConeProgram& p, const ConeSolverOptions& opts,
                                  const Vec* warm_start) const {
  p.validate();
  const int n = p.vars();
  Vec x = warm_start != nullptr ? *warm_start : Vec::Zero(n);
  if (x.size() != n) throw std::invalid_argument("BarrierSolver: warm start has wrong size");

  int phase1_steps = 0;
  if (!(cone::min_margin(p.cones, p.slack(x)) > 0.0)) {
    // Phase I: min sigma s.t. h - Gx + sigma e in K, sigma >= -1,
    // ||x - x0|| <= R.
    const ConeDims& dims = p.cones;
    const Vec s0 = p.slack(x);
    const double sigma0 = std::max(0.0, -cone::min_margin(dims, s0)) + 1.0;
    const double radius = 1e4 * std::max({1.0, x.norm(), p.h.lpNorm<Eigen::Infinity>()});

    ConeProgram aux;
    aux.cones.linear = dims.linear + 1;
    aux.cones.soc = dims.soc;
    aux.cones.soc.push_back(n + 1);
    const int m = aux.cones.rows();
    aux.h = Vec::Zero(m);
    aux.c = Vec::Zero(n + 1);
    aux.c(n) = 1.0;
    std::vector<Triplet> trips;
    const Vec e = cone::identity(dims);
    auto row_map = [&](Index i) { return i < dims.linear ? i : i + 1; };
    for (int col = 0; col < p.G.outerSize(); ++col) {
      for (SpMat::InnerIterator it(p.G, col); it; ++it) {
        trips.emplace_back(row_map(it.row()), it.col(), it.value());
      }
    }
    for (Index i = 0; i < p.rows(); ++i) {
      aux.h(row_map(i)) = p.h(i);
      if (e(i) != 0.0) trips.emplace_back(row_map(i), n, -e(i));
    }
    aux.h(dims.linear) = 1.0;  // sigma + 1 >= 0
    trips.emplace_back(dims.linear, n, -1.0);
    const Index ball = p.rows() + 1;
    aux.h(ball) = radius;
    for (int j = 0; j < n; ++j) {
      aux.h(ball + 1 + j) = -x(j);
      trips.emplace_back(ball + 1 + j, j, -1.0);
    }
    aux.G.resize(m, n + 1);
    aux.G.setFromTriplets(trips.begin(), trips.end());

    Vec xa(n + 1);
    xa << x, sigma0;
    auto path = follow_path(aux, std::move(xa), opts.max_iterations, opts.gap_tol,
                            [n](const Vec& v) { return v(n) < -1e-8; });
    phase1_steps = path.newton_steps;
    const double sigma = path.x(n);
    x = path.x.head(n);
    if (!path.stopped || !(cone::min_margin(p.cones, p.slack(x)) > 0.0)) {
      ConeSolution out;
      out.iterations = phase1_steps;
      out.x = x;
      out.objective = p.c.dot(x);
      out.max_violation = std::max(0.0, -cone::min_margin(p.cones, p.slack(x)));
      if (path.converged && sigma > opts.feastol) {
        out.status = SolveStatus::kInfeasible;
        out.message = "phase I optimum " + std::to_string(sigma) + " > 0";
      } else {
        out.status = SolveStatus::kNumericalFailure;
        out.message = "no strictly feasible point found (phase I sigma = " +
                      std::to_string(sigma) + ")";
      }
      return out;
    }
  }

  auto path = follow_path(p, std::move(x), opts.max_iterations, opts.gap_tol,
                          [](const Vec&) { return false; });
  return finish(p, std::move(path), phase1_steps, opts);
}

}  // namespace noma
