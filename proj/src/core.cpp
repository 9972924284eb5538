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

#include "noma/core.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace noma {

PairingMatrix::PairingMatrix(Mat entries, PairingMode mode)
    : entries_(std::move(entries)), mode_(mode) {
  if (entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("PairingMatrix: matrix must be square");
  }
}

PairingMatrix PairingMatrix::zeros(int k, PairingMode mode) {
  return {Mat::Zero(k, k), mode};
}

PairingMatrix PairingMatrix::from_pairs(int k,
                                        std::span<const std::pair<int, int>> pairs) {
  Mat m = Mat::Zero(k, k);
  for (const auto& [near, far] : pairs) {
    if (near < 0 || far < 0 || near >= k || far >= k) {
      throw std::out_of_range("PairingMatrix::from_pairs: user index out of range");
    }
    m(near, far) = 1.0;
  }
  return {std::move(m), PairingMode::kBinary};
}

std::vector<std::pair<int, int>> PairingMatrix::pairs() const {
  std::vector<std::pair<int, int>> out;
  for (Index k = 0; k < entries_.rows(); ++k) {
    for (Index l = 0; l < entries_.cols(); ++l) {
      if (entries_(k, l) >= 0.5) out.emplace_back(static_cast<int>(k), static_cast<int>(l));
    }
  }
  return out;
}

std::string format_pairs(const PairingMatrix& a) {
  std::string out;
  for (const auto& [near, far] : a.pairs()) {
    if (!out.empty()) out += ';';
    out += std::to_string(near + 1) + "-" + std::to_string(far + 1);
  }
  return out;
}

PairingMatrix parse_pairs(int k, std::string_view text) {
  std::vector<std::pair<int, int>> pairs;
  std::stringstream in{std::string(text)};
  std::string item;
  while (std::getline(in, item, ';')) {
    if (item.empty()) continue;
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      throw std::invalid_argument("parse_pairs: expected 'near-far', got '" + item + "'");
    }
    const int near = std::stoi(item.substr(0, dash)) - 1;
    const int far = std::stoi(item.substr(dash + 1)) - 1;
    pairs.emplace_back(near, far);
  }
  return PairingMatrix::from_pairs(k, pairs);
}

BeamformerSet denormalize(const Scenario& physical, const BeamformerSet& w) {
  return {w.w * std::sqrt(physical.p_max_w)};
}

Mat gain_matrix(const Scenario& s, const CMat& w) {
  return (s.channels.adjoint() * w).cwiseAbs2();
}

double phi(const Scenario& s, const BeamformerSet& w, const PairingMatrix& a, Index k) {
  double total = s.noise_w(k);
  for (Index l = 0; l < s.k; ++l) {
    if (l == k) continue;
    total += (1.0 - a(k, l)) * std::norm(s.h(k).dot(w.w.col(l)));
  }
  return total;
}

double psi(const Scenario& s, const BeamformerSet& w, Index ell, Index k) {
  double total = s.noise_w(ell);
  for (Index l = 0; l < s.k; ++l) {
    if (l == k) continue;
    total += std::norm(s.h(ell).dot(w.w.col(l)));
  }
  return total;
}

namespace {

double effective_sinr(const Scenario& s, const BeamformerSet& w, const PairingMatrix& a,
                      Index k, double eps_act) {
  const double own = std::norm(s.h(k).dot(w.w.col(k))) / phi(s, w, a, k);
  double gamma = own;
  for (Index ell = 0; ell < k; ++ell) {
    const double alpha = a(ell, k);
    if (alpha <= 0.0 || alpha < eps_act) continue;
    const double at_near = std::norm(s.h(ell).dot(w.w.col(k))) / (alpha * psi(s, w, ell, k));
    gamma = std::min(gamma, at_near);
  }
  return gamma;
}

RateReport make_report(Vec nats) {
  RateReport r;
  r.per_user_rate_bits = nats / kLn2;
  r.min_rate_nats = nats.size() > 0 ? nats.minCoeff() : 0.0;
  r.per_user_rate_nats = std::move(nats);
  return r;
}

}  // namespace

double sinr(const Scenario& s, const BeamformerSet& w, const PairingMatrix& a, Index k) {
  if (!a.is_binary()) {
    throw std::logic_error("sinr: exact evaluation requires a binary pairing matrix");
  }
  return effective_sinr(s, w, a, k, 0.0);
}

double sinr_relaxed(const Scenario& s, const BeamformerSet& w, const PairingMatrix& a,
                    Index k, double eps_act) {
  return effective_sinr(s, w, a, k, eps_act);
}

RateReport rate_report(const Scenario& s, const BeamformerSet& w, const PairingMatrix& a) {
  Vec nats(s.k);
  for (Index k = 0; k < s.k; ++k) nats(k) = std::log1p(sinr(s, w, a, k));
  return make_report(std::move(nats));
}

RateReport relaxed_rate_report(const Scenario& s, const BeamformerSet& w,
                               const PairingMatrix& a, double eps_act) {
  Vec nats(s.k);
  for (Index k = 0; k < s.k; ++k) nats(k) = std::log1p(sinr_relaxed(s, w, a, k, eps_act));
  return make_report(std::move(nats));
}

std::string_view to_string(PairingConstraint c) {
  switch (c) {
    case PairingConstraint::kBinary: return "binary";
    case PairingConstraint::kBox: return "box";
    case PairingConstraint::kColumnSum: return "column_sum";
    case PairingConstraint::kRowSum: return "row_sum";
    case PairingConstraint::kDiagonal: return "diagonal";
    case PairingConstraint::kLowerTriangular: return "lower_triangular";
    case PairingConstraint::kFarAlsoNear: return "far_also_near";
    case PairingConstraint::kNearAlsoFar: return "near_also_far";
  }
  return "unknown";
}

std::vector<PairingViolation> validate_pairing(const PairingMatrix& a, double tol) {
  std::vector<PairingViolation> out;
  const int k = a.size();
  const Mat& m = a.entries();
  const Vec row = m.rowwise().sum();
  const Vec col = m.colwise().sum().transpose();

  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      const double v = m(i, j);
      if (a.is_binary()) {
        if (std::abs(v) > tol && std::abs(v - 1.0) > tol) {
          out.push_back({PairingConstraint::kBinary, i, j});
        }
      } else if (v < -tol || v > 1.0 + tol) {
        out.push_back({PairingConstraint::kBox, i, j});
      }
    }
  }
  for (int j = 0; j < k; ++j) {
    if (col(j) > 1.0 + tol) out.push_back({PairingConstraint::kColumnSum, -1, j});
  }
  for (int i = 0; i < k; ++i) {
    if (row(i) > 1.0 + tol) out.push_back({PairingConstraint::kRowSum, i, -1});
  }
  for (int i = 0; i < k; ++i) {
    if (std::abs(m(i, i)) > tol) out.push_back({PairingConstraint::kDiagonal, i, i});
  }
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < i; ++j) {
      if (std::abs(m(i, j)) > tol) out.push_back({PairingConstraint::kLowerTriangular, i, j});
    }
  }
  for (int i = 0; i < k; ++i) {
    for (int j = i + 1; j < k; ++j) {
      if (m(i, j) + row(j) > 1.0 + tol) out.push_back({PairingConstraint::kFarAlsoNear, i, j});
      if (m(i, j) + col(i) > 1.0 + tol) out.push_back({PairingConstraint::kNearAlsoFar, i, j});
    }
  }
  return out;
}

std::uint64_t involution_number(int k) {
  if (k < 0) throw std::invalid_argument("involution_number: k must be >= 0");
  std::uint64_t prev = 1, cur = 1;
  for (int n = 2; n <= k; ++n) {
    const std::uint64_t next = cur + static_cast<std::uint64_t>(n - 1) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

namespace {

void enumerate_from(int first, std::vector<bool>& used, Mat& m,
                    std::vector<PairingMatrix>& out) {
  const int k = static_cast<int>(used.size());
  while (first < k && used[first]) ++first;
  if (first >= k) {
    out.emplace_back(m, PairingMode::kBinary);
    return;
  }
  used[first] = true;
  enumerate_from(first + 1, used, m, out);
  for (int far = first + 1; far < k; ++far) {
    if (used[far]) continue;
    used[far] = true;
    m(first, far) = 1.0;
    enumerate_from(first + 1, used, m, out);
    m(first, far) = 0.0;
    used[far] = false;
  }
  used[first] = false;
}

}  // namespace

std::vector<PairingMatrix> enumerate_pairings(int k) {
  if (k < 0) throw std::invalid_argument("enumerate_pairings: k must be >= 0");
  if (k > kMaxEnumerationUsers) {
    throw std::length_error("enumerate_pairings: refusing k = " + std::to_string(k) +
                            ", which would produce " +
                            std::to_string(involution_number(k)) + " pairings (limit k <= " +
                            std::to_string(kMaxEnumerationUsers) + ")");
  }
  std::vector<PairingMatrix> out;
  out.reserve(involution_number(k));
  std::vector<bool> used(static_cast<std::size_t>(k), false);
  Mat m = Mat::Zero(k, k);
  enumerate_from(0, used, m, out);
  return out;
}

}  // namespace noma
