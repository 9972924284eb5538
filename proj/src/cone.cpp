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
#include <limits>
#include <ostream>
#include <stdexcept>

namespace noma {

int ConeDims::rows() const {
  int r = linear;
  for (int d : soc) r += d;
  return r;
}

void ConeProgram::validate() const {
  if (h.size() != G.rows()) throw std::invalid_argument("ConeProgram: h/G row mismatch");
  if (c.size() != G.cols()) throw std::invalid_argument("ConeProgram: c/G column mismatch");
  if (cones.rows() != G.rows()) {
    throw std::invalid_argument("ConeProgram: cone dimensions do not cover G rows");
  }
  for (int d : cones.soc) {
    if (d < 1) throw std::invalid_argument("ConeProgram: empty second-order cone");
  }
}

void write_cone_program(std::ostream& out, const ConeProgram& p) {
  out.precision(17);
  out << "# minimize c'x subject to h - Gx in K\n";
  out << "vars " << p.vars() << "\n";
  out << "rows " << p.rows() << "\n";
  out << "linear " << p.cones.linear << "\n";
  out << "soc " << p.cones.soc.size();
  for (int d : p.cones.soc) out << ' ' << d;
  out << "\n";
  out << "c\n";
  for (Index j = 0; j < p.c.size(); ++j) {
    if (p.c(j) != 0.0) out << j << ' ' << p.c(j) << "\n";
  }
  out << "h\n";
  for (Index i = 0; i < p.h.size(); ++i) {
    if (p.h(i) != 0.0) out << i << ' ' << p.h(i) << "\n";
  }
  out << "G " << p.G.nonZeros() << "\n";
  for (int col = 0; col < p.G.outerSize(); ++col) {
    for (SpMat::InnerIterator it(p.G, col); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value() << "\n";
    }
  }
  out << "end\n";
}

namespace cone {

double min_margin(const ConeDims& dims, const Vec& s) {
  double m = std::numeric_limits<double>::infinity();
  if (dims.linear > 0) m = s.head(dims.linear).minCoeff();
  Index off = dims.linear;
  for (int d : dims.soc) {
    const double tail = d > 1 ? s.segment(off + 1, d - 1).norm() : 0.0;
    m = std::min(m, s(off) - tail);
    off += d;
  }
  return m;
}

namespace {

double soc_step(const Eigen::Ref<const Vec>& u, const Eigen::Ref<const Vec>& du) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const Index d = u.size();
  const double u0 = u(0), d0 = du(0);
  double a = d0 * d0, b = u0 * d0, c = u0 * u0;
  if (d > 1) {
    const auto u1 = u.tail(d - 1);
    const auto d1 = du.tail(d - 1);
    a -= d1.squaredNorm();
    b -= u1.dot(d1);
    c -= u1.squaredNorm();
  }
  if (c <= 0.0) return 0.0;
  // q(t) = a t^2 + 2 b t + c; first positive root leaves the cone.
  const double scale = std::max({std::abs(a), std::abs(b), c});
  if (std::abs(a) <= 1e-15 * scale) {
    return b < 0.0 ? -c / (2.0 * b) : kInf;
  }
  const double disc = b * b - a * c;
  if (disc < 0.0) return kInf;
  const double sq = std::sqrt(disc);
  const double q = -(b + (b >= 0.0 ? sq : -sq));
  double best = kInf;
  for (double r : {q / a, q != 0.0 ? c / q : kInf}) {
    if (r > 0.0) best = std::min(best, r);
  }
  return best;
}

}  // namespace

double max_step(const ConeDims& dims, const Vec& u, const Vec& du) {
  double a = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < dims.linear; ++i) {
    if (du(i) < 0.0) a = std::min(a, -u(i) / du(i));
  }
  Index off = dims.linear;
  for (int d : dims.soc) {
    a = std::min(a, soc_step(u.segment(off, d), du.segment(off, d)));
    off += d;
  }
  return a;
}

Vec identity(const ConeDims& dims) {
  Vec e = Vec::Zero(dims.rows());
  e.head(dims.linear).setOnes();
  Index off = dims.linear;
  for (int d : dims.soc) {
    e(off) = 1.0;
    off += d;
  }
  return e;
}

Vec product(const ConeDims& dims, const Vec& u, const Vec& v) {
  Vec out(u.size());
  out.head(dims.linear) = u.head(dims.linear).cwiseProduct(v.head(dims.linear));
  Index off = dims.linear;
  for (int d : dims.soc) {
    const auto us = u.segment(off, d);
    const auto vs = v.segment(off, d);
    out(off) = us.dot(vs);
    if (d > 1) out.segment(off + 1, d - 1) = us(0) * vs.tail(d - 1) + vs(0) * us.tail(d - 1);
    off += d;
  }
  return out;
}

Vec divide(const ConeDims& dims, const Vec& lambda, const Vec& r) {
  Vec out(r.size());
  out.head(dims.linear) = r.head(dims.linear).cwiseQuotient(lambda.head(dims.linear));
  Index off = dims.linear;
  for (int d : dims.soc) {
    const auto l = lambda.segment(off, d);
    const auto rs = r.segment(off, d);
    if (d == 1) {
      out(off) = rs(0) / l(0);
    } else {
      const double rho = l(0) * l(0) - l.tail(d - 1).squaredNorm();
      const double x0 = (l(0) * rs(0) - l.tail(d - 1).dot(rs.tail(d - 1))) / rho;
      out(off) = x0;
      out.segment(off + 1, d - 1) = (rs.tail(d - 1) - x0 * l.tail(d - 1)) / l(0);
    }
    off += d;
  }
  return out;
}

}  // namespace cone

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kInfeasible: return "infeasible";
    case SolveStatus::kUnbounded: return "unbounded";
    case SolveStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

std::unique_ptr<ConeSolver> make_cone_solver(std::string_view name) {
  if (name == "barrier") return std::make_unique<BarrierSolver>();
  if (name == "primal_dual") return std::make_unique<PrimalDualSolver>();
  throw std::invalid_argument("unknown cone solver '" + std::string(name) + "'");
}

ConeProgramBuilder::Affine& ConeProgramBuilder::Affine::operator+=(const Affine& o) {
  terms.insert(terms.end(), o.terms.begin(), o.terms.end());
  constant += o.constant;
  return *this;
}

ConeProgramBuilder::Affine ConeProgramBuilder::Affine::scaled(double f) const {
  Affine out = *this;
  for (auto& t : out.terms) t.second *= f;
  out.constant *= f;
  return out;
}

void ConeProgramBuilder::add_nonnegative(const Affine& a) { linear_.push_back(a); }

void ConeProgramBuilder::add_soc(const Affine& t, std::span<const Affine> u) {
  std::vector<Affine> rows;
  rows.reserve(u.size() + 1);
  rows.push_back(t);
  rows.insert(rows.end(), u.begin(), u.end());
  socs_.push_back(std::move(rows));
}

void ConeProgramBuilder::add_quadratic(std::span<const Affine> u, const Affine& r) {
  Affine t = r.scaled(0.5);
  t.constant += 0.5;
  Affine tail = r.scaled(0.5);
  tail.constant -= 0.5;
  std::vector<Affine> rows;
  rows.reserve(u.size() + 2);
  rows.push_back(std::move(t));
  rows.insert(rows.end(), u.begin(), u.end());
  rows.push_back(std::move(tail));
  socs_.push_back(std::move(rows));
}

ConeProgram ConeProgramBuilder::build() const {
  ConeProgram p;
  p.cones.linear = static_cast<int>(linear_.size());
  for (const auto& s : socs_) p.cones.soc.push_back(static_cast<int>(s.size()));
  const int m = p.cones.rows();
  p.h = Vec::Zero(m);
  p.c = c_;
  std::vector<Triplet> trips;
  int row = 0;
  auto emit = [&](const Affine& a) {
    p.h(row) = a.constant;
    for (const auto& [var, coef] : a.terms) {
      if (var < 0 || var >= vars_) throw std::out_of_range("ConeProgramBuilder: bad variable");
      trips.emplace_back(row, var, -coef);
    }
    ++row;
  };
  for (const auto& a : linear_) emit(a);
  for (const auto& s : socs_) {
    for (const auto& a : s) emit(a);
  }
  p.G.resize(m, vars_);
  p.G.setFromTriplets(trips.begin(), trips.end());
  p.G.makeCompressed();
  return p;
}

}  // namespace noma
