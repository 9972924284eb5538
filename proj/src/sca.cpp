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

#include "noma/sca.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>
#include <tuple>

namespace noma {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

void SolverSettings::validate() const {
  if (!(convergence_tol > 0.0)) throw std::invalid_argument("convergence_tol must be positive");
  if (max_outer_iters < 1) throw std::invalid_argument("max_outer_iters must be >= 1");
  if (!(eps_act > 0.0 && eps_act < 0.5)) throw std::invalid_argument("eps_act must be in (0, 0.5)");
  if (!(eps_v > 0.0 && eps_v < 1e-2)) throw std::invalid_argument("eps_v must be in (0, 0.01)");
  make_cone_solver(backend);
}

const char* SolveTrace::csv_header() {
  return "instance_id,strategy,phase,iter,eta_nats,eta_bits,wall_ms,status";
}

void SolveTrace::write_csv(std::ostream& out, const std::string& instance_id,
                           const std::string& strategy) const {
  const auto old = out.precision(12);
  for (const auto& r : records) {
    out << instance_id << ',' << strategy << ',' << r.phase << ',' << r.iter << ','
        << r.eta_nats << ',' << nats_to_bits(r.eta_nats) << ',' << r.wall_ms << ','
        << r.status << '\n';
  }
  out.precision(old);
}

Iterate initial_point(const Scenario& s, const SolverSettings& settings) {
  const int K = s.k;
  CMat w(s.n, K);
  const double amp = std::sqrt(0.9 * s.p_max_w / K);
  for (Index k = 0; k < K; ++k) {
    const double norm = s.h(k).norm();
    w.col(k) = norm > 0.0 ? CVec(s.h(k) * (amp / norm)) : CVec(CVec::Constant(s.n, amp / std::sqrt(s.n)));
  }
  Mat a = Mat::Zero(K, K);
  if (K >= 2) {
    const double small = 0.4 / (K - 1);
    for (int i = 0; i < K; ++i) {
      for (int j = i + 1; j < K; ++j) a(i, j) = small;
    }
    for (int i = 0; i < K / 2; ++i) a(i, K - K / 2 + i) = 0.5;
  }
  return make_iterate(s, {w}, PairingMatrix(a, PairingMode::kRelaxed), settings.eps_act);
}

LoopResult sca_loop(const Scenario& s, const SolverSettings& settings,
                    const PairingMatrix* fixed, const Iterate* start, int phase) {
  settings.validate();
  if (fixed && !is_valid_pairing(*fixed)) {
    throw std::invalid_argument("sca_loop: fixed pairing is not a valid pairing matrix");
  }
  const auto t0 = Clock::now();
  const auto solver = make_cone_solver(settings.backend);
  const auto fallback =
      make_cone_solver(settings.backend == "barrier" ? "primal_dual" : "barrier");

  LoopResult res;
  Iterate it = start ? *start : initial_point(s, settings);
  if (fixed) {
    it = make_iterate(s, it.w, *fixed, settings.eps_act);
  } else if (start) {
    it = make_iterate(s, it.w, it.a, settings.eps_act);
  }
  res.trace.records.push_back({phase, 0, it.eta, elapsed_ms(t0), "initial"});

  bool converged = false;
  for (int iter = 1; iter <= settings.max_outer_iters; ++iter) {
    const SurrogateCoeffs coeffs =
        build_coeffs(s, it, settings.eps_act, settings.eps_v, fixed != nullptr);
    const Subproblem sp = build_subproblem(s, coeffs, it, settings.eps_v);
    SolveOutcome out = solve_subproblem(sp, it, *solver, settings.cone, settings.warm_start_solver);
    std::string status = "optimal";
    if (out.status != SolveStatus::kOptimal) {
      status = "fallback_after_" + std::string(to_string(out.status));
      out = solve_subproblem(sp, it, *fallback, settings.cone, false);
    }
    if (out.status != SolveStatus::kOptimal) {
      throw ScaError("subproblem " + std::string(to_string(out.status)) + " at phase " +
                         std::to_string(phase) + " iteration " + std::to_string(iter) + ": " +
                         out.message,
                     it, out.max_violation);
    }
    Iterate next = out.point;
    next.mu = tight_mu(s, next.w.w);
    if (fixed) next.a = fixed->as_relaxed();
    const double delta = std::abs(next.eta - it.eta);
    it = std::move(next);
    res.iterations = iter;
    res.trace.records.push_back({phase, iter, it.eta, elapsed_ms(t0), status});
    if (delta < settings.convergence_tol) {
      converged = true;
      break;
    }
  }
  res.capped = !converged;
  res.it = std::move(it);
  return res;
}

PairingMatrix round_pairing(const PairingMatrix& a) {
  const int K = a.size();
  struct Candidate {
    double value;
    int k;
    int l;
  };
  std::vector<Candidate> cand;
  for (int k = 0; k < K; ++k) {
    for (int l = k + 1; l < K; ++l) {
      if (std::floor(a(k, l) + 0.5) >= 1.0) cand.push_back({a(k, l), k, l});
    }
  }
  std::stable_sort(cand.begin(), cand.end(), [](const Candidate& x, const Candidate& y) {
    if (x.value != y.value) return x.value > y.value;
    return std::tie(x.k, x.l) < std::tie(y.k, y.l);
  });
  std::vector<bool> used(K, false);
  std::vector<std::pair<int, int>> keep;
  for (const auto& c : cand) {
    if (used[c.k] || used[c.l]) continue;
    used[c.k] = used[c.l] = true;
    keep.emplace_back(c.k, c.l);
  }
  return PairingMatrix::from_pairs(K, keep);
}

namespace {

void append_trace(SolveTrace& into, const SolveTrace& from) {
  into.records.insert(into.records.end(), from.records.begin(), from.records.end());
}

}  // namespace

ResultRecord algorithm1(const Scenario& s, const SolverSettings& settings) {
  const auto t0 = Clock::now();
  const Scenario ns = normalized(s);
  LoopResult p1 = sca_loop(ns, settings, nullptr, nullptr, 1);
  const PairingMatrix rounded = round_pairing(p1.it.a);
  const Iterate start2 = settings.phase2_warm_start ? p1.it : initial_point(ns, settings);
  LoopResult p2 = sca_loop(ns, settings, &rounded, &start2, 2);

  ResultRecord r;
  r.strategy = "proposed";
  r.pairing = rounded;
  r.w = denormalize(s, p2.it.w);
  r.rates = rate_report(s, r.w, rounded);
  r.iters_phase1 = p1.iterations;
  r.iters_phase2 = p2.iterations;
  r.capped = p1.capped || p2.capped;
  r.trace = std::move(p1.trace);
  append_trace(r.trace, p2.trace);
  r.wall_ms = elapsed_ms(t0);
  return r;
}

ResultRecord solve_fixed_pairing(const Scenario& s, const SolverSettings& settings,
                                 const PairingMatrix& pairing, std::string strategy) {
  const auto t0 = Clock::now();
  const Scenario ns = normalized(s);
  LoopResult p = sca_loop(ns, settings, &pairing, nullptr, 2);
  ResultRecord r;
  r.strategy = std::move(strategy);
  r.pairing = pairing;
  r.w = denormalize(s, p.it.w);
  r.rates = rate_report(s, r.w, pairing);
  r.iters_phase2 = p.iterations;
  r.capped = p.capped;
  r.trace = std::move(p.trace);
  r.wall_ms = elapsed_ms(t0);
  return r;
}

ComplexityEstimate complexity_estimate(int k, int n) {
  if (k < 1 || n < 1) throw std::invalid_argument("complexity_estimate: k and n must be >= 1");
  ComplexityEstimate e;
  e.constraints = nominal_constraint_count(k);
  e.variables = nominal_variable_count(k, n);
  const double x = static_cast<double>(e.constraints);
  const double y = static_cast<double>(e.variables);
  e.order = std::pow(x, 2.5) * (y * y + x);
  return e;
}

}  // namespace noma
