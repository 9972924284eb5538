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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "noma/chanmodel.hpp"
#include "noma/types.hpp"

namespace noma {

enum class PairingMode { kBinary, kRelaxed };

/// K x K pairing assignment. Entry (k, l) with k < l set to one means users
/// k (near) and l (far) form a pair in which k cancels l's signal before
/// decoding its own. Only the strict upper triangle may be non-zero.
class PairingMatrix {
 public:
  PairingMatrix() = default;
  PairingMatrix(Mat entries, PairingMode mode);

  static PairingMatrix zeros(int k, PairingMode mode = PairingMode::kBinary);
  /// Binary matrix from 0-based (near, far) pairs.
  static PairingMatrix from_pairs(int k, std::span<const std::pair<int, int>> pairs);

  int size() const { return static_cast<int>(entries_.rows()); }
  PairingMode mode() const { return mode_; }
  bool is_binary() const { return mode_ == PairingMode::kBinary; }
  double operator()(Index k, Index l) const { return entries_(k, l); }
  void set(Index k, Index l, double value) { entries_(k, l) = value; }
  const Mat& entries() const { return entries_; }

  /// 0-based (near, far) pairs with entry >= 1/2, in row-major order.
  std::vector<std::pair<int, int>> pairs() const;

  PairingMatrix as_relaxed() const { return {entries_, PairingMode::kRelaxed}; }

  friend bool operator==(const PairingMatrix& a, const PairingMatrix& b) {
    return a.mode_ == b.mode_ && a.entries_ == b.entries_;
  }

 private:
  Mat entries_;
  PairingMode mode_ = PairingMode::kBinary;
};

/// "1-5;2-6" style edge list with 1-based user numbers; empty string when
/// nobody is paired.
std::string format_pairs(const PairingMatrix& a);
PairingMatrix parse_pairs(int k, std::string_view text);

/// K beamforming vectors stored column-wise (N x K).
struct BeamformerSet {
  CMat w;

  double total_power() const { return w.squaredNorm(); }
  int users() const { return static_cast<int>(w.cols()); }
};

/// Converts beamformers designed on normalized(s) back to physical units.
BeamformerSet denormalize(const Scenario& physical, const BeamformerSet& w);

struct RateReport {
  Vec per_user_rate_nats;
  Vec per_user_rate_bits;
  double min_rate_nats = 0.0;

  double min_rate_bits() const { return nats_to_bits(min_rate_nats); }
};

/// G(k, l) = |h_k^H w_l|^2.
Mat gain_matrix(const Scenario& s, const CMat& w);

/// Interference-plus-noise at user k after cancelling the signals it is
/// paired to decode first.
double phi(const Scenario& s, const BeamformerSet& w, const PairingMatrix& a, Index k);

/// Interference-plus-noise seen at user `ell` when it decodes user k's
/// message. Independent of the pairing.
double psi(const Scenario& s, const BeamformerSet& w, Index ell, Index k);

/// Effective SINR of user k: its own-receiver SINR, further limited by the
/// SINR of its message at any near user that must cancel it. Unpaired terms
/// are +inf and never bind. Binary pairings only.
double sinr(const Scenario& s, const BeamformerSet& w, const PairingMatrix& a, Index k);

/// Relaxed extension used by the solver: fractional entries scale the
/// cancelled interference, and pair terms are generated only for entries at
/// or above `eps_act`.
double sinr_relaxed(const Scenario& s, const BeamformerSet& w,
                    const PairingMatrix& a, Index k, double eps_act);

RateReport rate_report(const Scenario& s, const BeamformerSet& w, const PairingMatrix& a);
RateReport relaxed_rate_report(const Scenario& s, const BeamformerSet& w,
                               const PairingMatrix& a, double eps_act);

enum class PairingConstraint {
  kBinary,           // entries in {0, 1}
  kBox,              // relaxed entries in [0, 1]
  kColumnSum,        // each user is the far user of at most one pair
  kRowSum,           // each user is the near user of at most one pair
  kDiagonal,         // no self pairing
  kLowerTriangular,  // the nearer user always performs cancellation
  kFarAlsoNear,      // a far user cannot also act as a near user
  kNearAlsoFar,      // a near user cannot also act as a far user
};

std::string_view to_string(PairingConstraint c);

struct PairingViolation {
  PairingConstraint constraint;
  int k;
  int l;
};

/// Every violated pairing constraint, or an empty list when feasible.
std::vector<PairingViolation> validate_pairing(const PairingMatrix& a, double tol = 1e-9);

inline bool is_valid_pairing(const PairingMatrix& a, double tol = 1e-9) {
  return validate_pairing(a, tol).empty();
}

inline constexpr int kMaxEnumerationUsers = 10;

/// Number of partial matchings on k users: I(k) = I(k-1) + (k-1) I(k-2).
std::uint64_t involution_number(int k);

/// All feasible binary pairings on k users, starting with the empty one.
/// Throws std::length_error beyond kMaxEnumerationUsers.
std::vector<PairingMatrix> enumerate_pairings(int k);

}  // namespace noma
