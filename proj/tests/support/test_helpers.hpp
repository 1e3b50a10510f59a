// Copyright 2026 The qpd developers
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

#include <cmath>

#include "qpd/hermitian.hpp"

namespace qpd {

inline HermitianMatrix pauli_x() {
  Matrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return HermitianMatrix(m);
}

inline HermitianMatrix pauli_y() {
  Matrix m(2, 2);
  m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
  return HermitianMatrix(m);
}

inline HermitianMatrix pauli_z() {
  Matrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return HermitianMatrix(m);
}

/// Choi matrix of the unitary channel rho -> U^m rho U^-m, U = diag(1, w),
/// w = exp(2 pi i / 3): ones on the corner diagonal, w^{±m} off-corner.
inline HermitianMatrix lambda_choi(int m) {
  const Complex w = std::exp(Complex(0.0, 2.0 * M_PI / 3.0));
  Matrix lam = Matrix::Zero(4, 4);
  lam(0, 0) = 1.0;
  lam(3, 3) = 1.0;
  lam(0, 3) = std::pow(w, -m);
  lam(3, 0) = std::pow(w, m);
  return HermitianMatrix(lam);
}

inline Vector basis_ket(int dim, int i) {
  Vector v = Vector::Zero(dim);
  v(i) = 1.0;
  return v;
}

}  // namespace qpd
