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

#include "qpd/hermitian.hpp"
#include "qpd/rng.hpp"
#include "support/test_helpers.hpp"

using namespace qpd;

TEST_CASE("hermitian construction symmetrizes and rejects") {
  Matrix m(2, 2);
  m << 1.0, Complex(0.0, 1.0), Complex(0.0, -1.0), 2.0;
  HermitianMatrix h(m);
  CHECK(h.dim() == 2);
  CHECK((h.raw() - h.raw().adjoint()).norm() == 0.0);

  Matrix bad(2, 2);
  bad << 1.0, 2.0, 3.0, 4.0;
  CHECK_THROWS_AS(HermitianMatrix(bad), std::invalid_argument);
}

TEST_CASE("inner product examples") {
  CHECK(inner_product(HermitianMatrix::identity(2), HermitianMatrix::identity(2)) ==
        Catch::Approx(2.0).margin(1e-14));
  CHECK(inner_product(pauli_z(), pauli_x()) == Catch::Approx(0.0).margin(1e-14));
  // Tr(Lambda_1^2): Lambda_1 is rank one with eigenvalue 2.
  HermitianMatrix lam = lambda_choi(1);
  CHECK(inner_product(lam, lam) == Catch::Approx(4.0).margin(1e-12));

  CHECK_THROWS_AS(inner_product(HermitianMatrix::identity(2), HermitianMatrix::identity(3)),
                  std::invalid_argument);
}

TEST_CASE("inner product is symmetric and real on random pairs") {
  Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    const int d = 2 + rng.uniform_int(6);
    HermitianMatrix a = rng.random_hermitian(d);
    HermitianMatrix b = rng.random_hermitian(d);
    const double ab = inner_product(a, b);
    const double ba = inner_product(b, a);
    CHECK(std::abs(ab - ba) <= 1e-12 * (1.0 + std::abs(ab)));
    const Complex tr = (a.raw() * b.raw()).trace();
    CHECK(std::abs(tr.imag()) <= 1e-12 * (1.0 + std::abs(tr)));
  }
}

TEST_CASE("kron basics") {
  HermitianMatrix i4 = kron(HermitianMatrix::identity(2), HermitianMatrix::identity(2));
  CHECK((i4.raw() - Matrix::Identity(4, 4)).norm() == Catch::Approx(0.0).margin(1e-15));

  Vector e0 = Vector::Zero(2), e1 = Vector::Zero(2);
  e0(0) = 1.0;
  e1(1) = 1.0;
  HermitianMatrix p = kron(HermitianMatrix::outer(e0), HermitianMatrix::outer(e1));
  Matrix expect = Matrix::Zero(4, 4);
  expect(1, 1) = 1.0;
  CHECK((p.raw() - expect).norm() == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("partial trace examples") {
  Rng rng(3);
  HermitianMatrix a = rng.random_hermitian(3);
  HermitianMatrix b = rng.random_hermitian(2);
  SystemLayout layout({3, 2});

  HermitianMatrix ab = kron(a, b);
  HermitianMatrix keep_first = partial_trace(ab, layout, {0});
  CHECK((keep_first.raw() - b.trace() * a.raw()).norm() <= 1e-12 * (1.0 + a.frobenius_norm()));

  // Choi of a trace-preserving channel traces to the identity on the input.
  HermitianMatrix lam = lambda_choi(1);
  HermitianMatrix t = partial_trace(lam, SystemLayout({2, 2}), {1});
  CHECK((t.raw() - Matrix::Identity(2, 2)).norm() <= 1e-12);

  HermitianMatrix mixed = HermitianMatrix::identity(4) * 0.25;
  for (int keep : {0, 1}) {
    HermitianMatrix r = partial_trace(mixed, SystemLayout({2, 2}), {keep});
    CHECK((r.raw() - 0.5 * Matrix::Identity(2, 2)).norm() <= 1e-14);
  }

  CHECK_THROWS_AS(partial_trace(mixed, SystemLayout({2, 2}), {2}), std::invalid_argument);
}

TEST_CASE("partial trace is linear and trace preserving") {
  Rng rng(11);
  SystemLayout layout({2, 3, 2});
  for (int i = 0; i < 25; ++i) {
    HermitianMatrix m = rng.random_hermitian(12);
    HermitianMatrix r = partial_trace(m, layout, {1});
    CHECK(std::abs(r.trace() - m.trace()) <= 1e-12 * (1.0 + std::abs(m.trace())));
  }
}

TEST_CASE("permute systems") {
  Rng rng(5);
  HermitianMatrix a = rng.random_hermitian(2);
  HermitianMatrix b = rng.random_hermitian(3);
  SystemLayout layout({2, 3});

  HermitianMatrix ab = kron(a, b);
  HermitianMatrix ba = permute_systems(ab, layout, {1, 0});
  CHECK((ba.raw() - kron(b, a).raw()).norm() <= 1e-13);

  HermitianMatrix same = permute_systems(ab, layout, {0, 1});
  CHECK((same.raw() - ab.raw()).norm() == 0.0);

  HermitianMatrix twice = permute_systems(ba, SystemLayout({3, 2}), {1, 0});
  CHECK((twice.raw() - ab.raw()).norm() <= 1e-13);

  CHECK_THROWS_AS(permute_systems(ab, layout, {0, 0}), std::invalid_argument);
}

TEST_CASE("permutation preserves spectrum") {
  Rng rng(7);
  SystemLayout layout({2, 2, 3});
  for (int i = 0; i < 10; ++i) {
    HermitianMatrix m = rng.random_hermitian(12);
    HermitianMatrix p = permute_systems(m, layout, {2, 0, 1});
    Eigen::VectorXd s1 = eig_hermitian(m).values;
    Eigen::VectorXd s2 = eig_hermitian(p).values;
    CHECK((s1 - s2).cwiseAbs().maxCoeff() <= 1e-10 * (1.0 + s1.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("eigendecomposition examples") {
  Matrix d(2, 2);
  d << 3.0, 0.0, 0.0, 1.0;
  EigResult r = eig_hermitian(HermitianMatrix(d));
  CHECK(r.values(0) == Catch::Approx(3.0));
  CHECK(r.values(1) == Catch::Approx(1.0));

  EigResult rx = eig_hermitian(pauli_x());
  CHECK(rx.values(0) == Catch::Approx(1.0));
  CHECK(rx.values(1) == Catch::Approx(-1.0));
  CHECK(std::abs(std::abs(rx.vectors(0, 0)) - 1.0 / std::sqrt(2.0)) <= 1e-12);

  EigResult rl = eig_hermitian(lambda_choi(1));
  CHECK(rl.values(0) == Catch::Approx(2.0).margin(1e-12));
  for (int i = 1; i < 4; ++i) CHECK(std::abs(rl.values(i)) <= 1e-12);
}

TEST_CASE("eig reconstruction on random matrices") {
  Rng rng(23);
  for (int i = 0; i < 1000; ++i) {
    const int d = 1 + rng.uniform_int(16);
    HermitianMatrix m = rng.random_hermitian(d);
    EigResult r = eig_hermitian(m);
    Matrix rec = r.vectors * r.values.asDiagonal() * r.vectors.adjoint();
    CHECK((rec - m.raw()).norm() <= 1e-10 * (1.0 + m.frobenius_norm()));
    for (int j = 0; j + 1 < d; ++j) CHECK(r.values(j) >= r.values(j + 1));
  }
}

TEST_CASE("min eigenvalue and psd tests") {
  CHECK(min_eigenvalue(HermitianMatrix::identity(2)) == Catch::Approx(1.0));
  CHECK(min_eigenvalue(pauli_z()) == Catch::Approx(-1.0));
  CHECK(min_eigenvalue(lambda_choi(1)) == Catch::Approx(0.0).margin(1e-12));
  CHECK(is_psd(lambda_choi(1)));
  CHECK_FALSE(is_psd(pauli_z()));
}

TEST_CASE("hermitian basis pack round trip") {
  Rng rng(31);
  for (int d : {1, 2, 3, 5}) {
    HermitianMatrix m = rng.random_hermitian(d);
    Eigen::VectorXd packed = herm_pack(m.raw());
    CHECK((herm_unpack(packed, d) - m.raw()).norm() <= 1e-14 * (1.0 + m.frobenius_norm()));
    HermitianMatrix n = rng.random_hermitian(d);
    CHECK(std::abs(packed.dot(herm_pack(n.raw())) - inner_product(m, n)) <=
          1e-12 * (1.0 + std::abs(inner_product(m, n))));
  }
}
