// Copyright 2026 The nimp Authors
//
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

#include <algorithm>
#include <string>

#include "nimp/core.hpp"

namespace nimp::detail {

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline void require_hermitian(const Operator& op, const std::string& what) {
  const double scale = op.dim() == 0 ? 1.0 : std::max(1.0, op.matrix().cwiseAbs().maxCoeff());
  require(op.hermiticity_error() <= kHermitianTol * scale, ErrorCode::not_hermitian,
          what + ": operator is not Hermitian (max |A - A^dagger| = " +
              std::to_string(op.hermiticity_error()) + ")");
}

// A joint state on [ancilla block (dim dA)] (x) [target (dim dT)] has flat
// index a*dT + t. Viewed column-major as a dT x dA matrix Y, the operator
// A (x) T acts as Y -> T Y A^T, which avoids forming dA*dT square matrices.
inline Matrix as_target_columns(const Vector& joint, Eigen::Index target_dim) {
  const Eigen::Index ancilla_dim = joint.size() / target_dim;
  return Eigen::Map<const Matrix>(joint.data(), target_dim, ancilla_dim);
}

inline Vector flatten(const Matrix& columns) {
  return Eigen::Map<const Vector>(columns.data(), columns.size());
}

}  // namespace nimp::detail
