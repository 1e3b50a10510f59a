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

#include <catch2/catch_amalgamated.hpp>

#include "qpd/conic.hpp"
#include "qpd/process.hpp"
#include "qpd/rng.hpp"
#include "support/test_helpers.hpp"

using namespace qpd;

TEST_CASE("lmi: min lambda with lambda I >= A equals the max eigenvalue") {
  Rng rng(101);
  for (int trial = 0; trial < 8; ++trial) {
    const int d = 2 + rng.uniform_int(5);
    HermitianMatrix a = rng.random_hermitian(d);

    LmiProgram prog;
    auto lam = prog.add_scalar();
    int blk = prog.add_block(d);
    prog.add_const(blk, -a.raw());
    prog.add_scalar_term(blk, lam, Matrix::Identity(d, d));
    prog.add_objective(lam, 1.0);

    auto res = prog.solve();
    CHECK(res.raw.converged);
    CHECK(res.value == Catch::Approx(max_eigenvalue(a)).margin(1e-6 * (1.0 + a.frobenius_norm())));
  }
}

TEST_CASE("lmi: hermitian variable, min tr(chi) with chi >= A_m") {
  // With a single constraint the optimum is the positive part of A.
  Rng rng(77);
  HermitianMatrix a = rng.random_hermitian(3);
  EigResult eig = eig_hermitian(a);
  double positive_trace = eig.values.cwiseMax(0.0).sum();

  LmiProgram prog;
  auto chi = prog.add_hermitian(3);
  int blk = prog.add_block(3);
  prog.add_const(blk, -a.raw());
  prog.add_term(blk, chi, [](const Matrix& h) { return h; });
  int psd = prog.add_block(3);
  prog.add_term(psd, chi, [](const Matrix& h) { return h; });

  Eigen::VectorXd tr_coeffs = herm_pack(Matrix::Identity(3, 3));
  prog.add_objective(chi, tr_coeffs);

  auto res = prog.solve();
  CHECK(res.raw.converged);
  CHECK(res.value == Catch::Approx(positive_trace).margin(1e-6));
}

TEST_CASE("primal form: max overlap over density matrices is the top eigenvalue") {
  Rng rng(55);
  for (int trial = 0; trial < 5; ++trial) {
    const int d = 2 + rng.uniform_int(4);
    HermitianMatrix h = rng.random_hermitian(d);

    PrimalSdp prog;
    int rho = prog.add_psd_block(d);
    prog.add_objective(rho, -h.raw());  // minimize -<h, rho>
    prog.add_scalar_equality({{rho, Matrix::Identity(d, d)}}, 1.0);

    auto res = prog.solve();
    CHECK(res.raw.converged);
    CHECK(-res.value == Catch::Approx(max_eigenvalue(h)).margin(1e-6 * (1.0 + h.frobenius_norm())));
    CHECK(res.X[rho].trace() == Catch::Approx(1.0).margin(1e-6));
  }
}

TEST_CASE("primal form: matrix equality ties blocks together") {
  // min tr(Y) s.t. Y - X = A, X >= 0, Y >= 0 with A indefinite: the optimum
  // is the positive part of A (X eats the negative part).
  Rng rng(99);
  HermitianMatrix a = rng.random_hermitian(4);
  double positive_trace = eig_hermitian(a).values.cwiseMax(0.0).sum();

  PrimalSdp prog;
  int x = prog.add_psd_block(4);
  int y = prog.add_psd_block(4);
  prog.add_objective(y, Matrix::Identity(4, 4));
  prog.add_matrix_equality(
      {{y, [](const Matrix& h) { return h; }}, {x, [](const Matrix& h) { return -h; }}}, a.raw());

  auto res = prog.solve();
  CHECK(res.raw.converged);
  CHECK(res.value == Catch::Approx(positive_trace).margin(1e-6));
}

TEST_CASE("min lambda with lambda tau >= 0 over combs is zero") {
  LmiProgram prog;
  auto lam = prog.add_scalar();
  int pos = prog.add_block(1);
  prog.add_scalar_term(pos, lam, Matrix::Identity(1, 1));
  prog.add_objective(lam, 1.0);
  auto res = prog.solve();
  CHECK(res.raw.converged);
  CHECK(res.value == Catch::Approx(0.0).margin(1e-7));
}
