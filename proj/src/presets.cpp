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

#include "qpd/presets.hpp"

#include <cmath>

namespace qpd {

namespace {
const Complex kOmega = std::exp(Complex(0.0, 2.0 * M_PI / 3.0));
}

HermitianMatrix phase_trine_lambda(int m) {
  Matrix u = Matrix::Zero(2, 2);
  u(0, 0) = 1.0;
  u(1, 1) = std::pow(kOmega, m);
  return choi_from_kraus({u}, 2, 2).matrix();
}

DiscriminationInstance phase_trine_instance() {
  SystemLayout layout({2, 2, 2, 2}, {"W2", "V2", "W1", "V1"});
  std::vector<ChoiProcess> combs;
  for (int m = 1; m <= 3; ++m) {
    combs.emplace_back(kron(phase_trine_lambda(m), phase_trine_lambda(m)), layout);
  }
  return DiscriminationInstance(combs, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 2);
}

GroupAction phase_trine_symmetry() {
  Matrix u = Matrix::Zero(2, 2);
  u(0, 0) = 1.0;
  u(1, 1) = kOmega;
  const Matrix eye = Matrix::Identity(2, 2);

  std::vector<std::vector<int>> comp(3, std::vector<int>(3));
  for (int g = 0; g < 3; ++g)
    for (int h = 0; h < 3; ++h) comp[g][h] = (g + h) % 3;

  std::vector<std::vector<Matrix>> unitaries;
  std::vector<std::vector<int>> outcome;
  for (int g = 0; g < 3; ++g) {
    Matrix ug = Matrix::Identity(2, 2);
    for (int k = 0; k < g; ++k) ug = ug * u;
    unitaries.push_back({ug, eye, ug, eye});
    std::vector<int> perm(3);
    for (int m = 0; m < 3; ++m) perm[m] = (m + g) % 3;
    outcome.push_back(perm);
  }
  return GroupAction(comp, unitaries, outcome, SystemLayout({2, 2, 2, 2}));
}

HermitianMatrix phase_trine_bell_state() {
  Matrix s = Matrix::Zero(4, 4);
  s(0, 0) = s(0, 3) = s(3, 0) = s(3, 3) = 0.5;
  return HermitianMatrix(s);
}

Matrix phase_trine_middle_unitary() {
  Matrix u(4, 4);
  const double r2 = std::sqrt(2.0), r3 = std::sqrt(3.0);
  u << r2, 0, 1, 0,
       0, r2, 0, 1,
      -1, 0, r2, 0,
       0, -1, 0, r2;
  return u / r3;
}

std::vector<HermitianMatrix> phase_trine_network_states() {
  // Wires: the state lives on V1 ⊗ A, the first use maps V1 -> W1, the
  // middle unitary maps W1 ⊗ A -> V2 ⊗ B, the second use maps V2 -> W2;
  // the result is a state on W2 ⊗ B.
  ChoiProcess middle = choi_from_kraus({phase_trine_middle_unitary()}, 4, 4);
  ChoiProcess middle_fine(middle.matrix(), SystemLayout({2, 2, 2, 2}));  // [V2, B, W1, A]

  std::vector<HermitianMatrix> out;
  for (int m = 1; m <= 3; ++m) {
    ChoiProcess lam(phase_trine_lambda(m), SystemLayout({2, 2}));  // [W, V]
    ChoiProcess state(phase_trine_bell_state(), SystemLayout({2, 2}));  // [V1, A]
    ChoiProcess after_first = link_product(state, lam, {{0, 1}});       // [A, W1]
    ChoiProcess after_middle = link_product(after_first, middle_fine, {{1, 2}, {0, 3}});  // [V2, B]
    ChoiProcess after_second = link_product(after_middle, lam, {{0, 1}});  // [B, W2]
    out.push_back(after_second.matrix());
  }
  return out;
}

}  // namespace qpd
