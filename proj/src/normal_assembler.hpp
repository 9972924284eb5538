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

#include <Eigen/Cholesky>

#include "noma/cone.hpp"

namespace noma::detail {

/// Assembles G^T diag(d) G + Up Up^T - Um Um^T where Up = G^T Vp and
/// Um = G^T Vm. Both interior-point backends factor matrices of this form.
class NormalAssembler {
 public:
  explicit NormalAssembler(const SpMat& G) : G_(G), Gt_(G.transpose()) {}

  Mat assemble(const Vec& d, const SpMat& vplus, const SpMat& vminus) const {
    const SpMat gtd = Gt_ * d.asDiagonal();
    Mat out = Mat(SpMat(gtd * G_));
    if (vplus.nonZeros() > 0) {
      const SpMat u = Gt_ * vplus;
      out += Mat(SpMat(u * u.transpose()));
    }
    if (vminus.nonZeros() > 0) {
      const SpMat u = Gt_ * vminus;
      out -= Mat(SpMat(u * u.transpose()));
    }
    return out;
  }

  const SpMat& G() const { return G_; }
  const SpMat& Gt() const { return Gt_; }

 private:
  const SpMat& G_;
  SpMat Gt_;
};

/// Cholesky with escalating diagonal regularization; returns false when the
/// matrix cannot be factored even after regularization.
inline bool factor_spd(const Mat& H, Eigen::LLT<Mat>& llt) {
  const double scale = std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
  double reg = 0.0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    if (reg == 0.0) {
      llt.compute(H);
    } else {
      Mat Hr = H;
      Hr.diagonal().array() += reg;
      llt.compute(Hr);
    }
    if (llt.info() == Eigen::Success) return true;
    reg = reg == 0.0 ? 1e-14 * scale : reg * 100.0;
  }
  return false;
}

}  // namespace noma::detail
