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

#include "qpd/dual.hpp"
#include "qpd/presets.hpp"
#include "qpd/primal.hpp"
#include "support/oracles.hpp"
#include "support/test_helpers.hpp"

using namespace qpd;

namespace {

DiscriminationInstance channel_pair(const Matrix& u1, const Matrix& u2, double p1) {
  std::vector<ChoiProcess> combs = {choi_from_kraus({u1}, 2, 2), choi_from_kraus({u2}, 2, 2)};
  return DiscriminationInstance(combs, {p1, 1.0 - p1}, 1);
}

}  // namespace

TEST_CASE("helstrom closed form on the basic pairs") {
  HermitianMatrix zero = HermitianMatrix::outer(basis_ket(2, 0));
  HermitianMatrix one = HermitianMatrix::outer(basis_ket(2, 1));
  auto [perfect, m1] = helstrom_two_state(0.5, zero, 0.5, one);
  CHECK(perfect == Catch::Approx(1.0).margin(1e-12));

  auto [same, m2] = helstrom_two_state(0.3, zero, 0.7, zero);
  CHECK(same == Catch::Approx(0.7).margin(1e-12));

  Vector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  auto [overlap, m3] = helstrom_two_state(0.5, zero, 0.5, HermitianMatrix::outer(plus));
  CHECK(overlap == Catch::Approx(0.5 * (1.0 + 1.0 / std::sqrt(2.0))).margin(1e-12));

  CHECK_THROWS_AS(helstrom_two_state(0.5, zero, 0.6, one), std::invalid_argument);
  CHECK_THROWS_AS(helstrom_two_state(0.5, HermitianMatrix::identity(2), 0.5, one),
                  std::invalid_argument);
}

TEST_CASE("helstrom closed form dominates a measurement search") {
  Rng rng(808);
  for (int trial = 0; trial < 100; ++trial) {
    HermitianMatrix rho1 = rng.random_density(2);
    HermitianMatrix rho2 = rng.random_density(2);
    const double p1 = 0.1 + 0.8 * rng.uniform();
    auto [value, povm] = helstrom_two_state(p1, rho1, 1.0 - p1, rho2);
    const double searched =
        oracles::helstrom_povm_search(p1, rho1, 1.0 - p1, rho2, 100, 900 + trial);
    CHECK(value >= searched - 1e-9);
    // The returned measurement achieves the value.
    const double achieved = p1 * inner_product(povm[0], rho1) + (1.0 - p1) * inner_product(povm[1], rho2);
    CHECK(achieved == Catch::Approx(value).margin(1e-10));
  }
  // A denser search on one instance corners the closed form from below.
  HermitianMatrix rho1 = rng.random_density(2);
  HermitianMatrix rho2 = rng.random_density(2);
  auto [value, povm] = helstrom_two_state(0.5, rho1, 0.5, rho2);
  CHECK(oracles::helstrom_povm_search(0.5, rho1, 0.5, rho2, 10000, 77) ==
        Catch::Approx(value).margin(1e-6));
}

TEST_CASE("fixed input: identical channels leave only guessing") {
  ChoiProcess id = choi_from_kraus({Matrix::Identity(2, 2)}, 2, 2);
  DiscriminationInstance inst({id, id}, {0.35, 0.65}, 1);
  PrimalResult res = optimize_fixed_input(inst, basis_ket(2, 0));
  CHECK(res.value == Catch::Approx(0.65).margin(1e-9));
  CHECK(res.certified_optimal);
}

TEST_CASE("fixed input: orthogonal unitary outputs are distinguished perfectly") {
  DiscriminationInstance inst = channel_pair(Matrix::Identity(2, 2), pauli_x().raw(), 0.5);
  PrimalResult res = optimize_fixed_input(inst, basis_ket(2, 0));
  CHECK(res.value == Catch::Approx(1.0).margin(1e-9));
  auto validation = validate_tester(*res.tester, res.tester->strategy(), 1e-7);
  CHECK(validation.ok);
}

TEST_CASE("fixed input: amplitude damping versus identity at the excited state") {
  // Damping gamma = 1/2 sends |1><1| to the even mixture; the closed-form
  // trace distance to the undamped state gives 3/4.
  const double gamma = 0.5;
  Matrix k0 = Matrix::Zero(2, 2), k1 = Matrix::Zero(2, 2);
  k0(0, 0) = 1.0;
  k0(1, 1) = std::sqrt(1.0 - gamma);
  k1(0, 1) = std::sqrt(gamma);
  std::vector<ChoiProcess> combs = {choi_from_kraus({k0, k1}, 2, 2),
                                    choi_from_kraus({Matrix::Identity(2, 2)}, 2, 2)};
  DiscriminationInstance inst(combs, {0.5, 0.5}, 1);
  PrimalResult res = optimize_fixed_input(inst, basis_ket(2, 1));
  CHECK(res.value == Catch::Approx(0.75).margin(1e-9));
}

TEST_CASE("fixed input on three outputs goes through the measurement solve") {
  Rng rng(313);
  std::vector<ChoiProcess> combs;
  for (int m = 0; m < 3; ++m) combs.push_back(choi_from_kraus({rng.haar_unitary(2)}, 2, 2));
  DiscriminationInstance inst(combs, {0.2, 0.5, 0.3}, 1);
  Vector phi = rng.random_pure_state(2);
  PrimalResult res = optimize_fixed_input(inst, phi);
  CHECK(res.value >= 0.5 - 1e-9);  // at least guessing the likeliest
  CHECK(res.value <= 1.0 + 1e-9);
  // Cross-check against the fixed-input dual value.
  DualCertificate dual = solve_dual(inst, StrategyClass::fixed_input(phi));
  CHECK(res.value == Catch::Approx(dual.value).margin(1e-6));
}

TEST_CASE("separable input finds the discriminating state for phase flips") {
  DiscriminationInstance inst = channel_pair(Matrix::Identity(2, 2), pauli_z().raw(), 0.5);
  SeparableSearchOptions opt;
  opt.grid_degrees = 6.0;
  PrimalResult res = optimize_separable_input(inst, opt);
  CHECK(res.value == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("separable input on identical channels is prior guessing") {
  ChoiProcess id = choi_from_kraus({Matrix::Identity(2, 2)}, 2, 2);
  DiscriminationInstance inst({id, id}, {0.4, 0.6}, 1);
  SeparableSearchOptions opt;
  opt.grid_degrees = 15.0;
  PrimalResult res = optimize_separable_input(inst, opt);
  CHECK(res.value == Catch::Approx(0.6).margin(1e-8));
}

TEST_CASE("unrestricted primal matches its dual and validates") {
  DiscriminationInstance inst = phase_trine_instance();
  PrimalResult res = optimize_global(inst);
  CHECK(res.value == Catch::Approx(1.0).margin(1e-5));
  auto validation = validate_tester(*res.tester, StrategyClass::global(), 1e-5);
  INFO(validation.diagnostics);
  CHECK(validation.ok);
}

TEST_CASE("seesaw on identical ensembles returns the guessing rate") {
  SystemLayout layout({2, 2, 2, 2});
  ChoiProcess e(kron(lambda_choi(1), lambda_choi(1)), layout);
  DiscriminationInstance inst({e, e, e}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 2);
  SeesawOptions opt;
  opt.branching = 2;
  opt.restarts = 2;
  PrimalResult res = seesaw_sequential(inst, opt);
  CHECK(res.value == Catch::Approx(1.0 / 3).margin(1e-6));
}

TEST_CASE("seesaw objective is monotone and more branches never hurt") {
  DiscriminationInstance inst = phase_trine_instance();
  std::vector<double> trace;
  SeesawOptions opt;
  opt.branching = 4;
  opt.restarts = 3;
  opt.objective_trace = &trace;
  PrimalResult res = seesaw_sequential(inst, opt);
  REQUIRE(trace.size() >= 2);
  // Per-restart monotonicity: the trace resets between restarts, so check
  // within segments of nondecreasing runs only when values drop to a new
  // restart's starting level is allowed. Simpler: every consecutive pair
  // within one restart is nondecreasing; restarts are detected by drops
  // larger than the stall tolerance from a converged plateau.
  int violations = 0;
  for (size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] < trace[i - 1] - 1e-12) ++violations;
  }
  CHECK(violations <= opt.restarts - 1);  // only the restart boundaries may drop

  SeesawOptions single;
  single.branching = 1;
  single.restarts = 3;
  PrimalResult res1 = seesaw_sequential(inst, single);
  CHECK(res1.value <= res.value + 1e-9);
}

TEST_CASE("seesaw approaches the sequential dual on the reference instance") {
  DiscriminationInstance inst = phase_trine_instance();
  SeesawOptions opt;
  opt.branching = 8;
  opt.restarts = 16;
  PrimalResult res = seesaw_sequential(inst, opt);
  CHECK(res.value >= 0.928);
  CHECK(res.value <= 0.9335);
  auto validation = validate_tester(*res.tester, StrategyClass::sequential_two_step(), 1e-6);
  INFO(validation.diagnostics);
  CHECK(validation.ok);
}

TEST_CASE("success probability is permutation equivariant on exact routes") {
  Rng rng(616);
  HermitianMatrix rho1 = rng.random_density(2);
  HermitianMatrix rho2 = rng.random_density(2);
  SystemLayout layout({2, 1});
  DiscriminationInstance a({ChoiProcess(rho1, layout), ChoiProcess(rho2, layout)}, {0.3, 0.7}, 1);
  DiscriminationInstance b({ChoiProcess(rho2, layout), ChoiProcess(rho1, layout)}, {0.7, 0.3}, 1);
  auto [va, ma] = helstrom_two_state(0.3, rho1, 0.7, rho2);
  auto [vb, mb] = helstrom_two_state(0.7, rho2, 0.3, rho1);
  CHECK(va == Catch::Approx(vb).margin(1e-10));
  PrimalResult ra = optimize_fixed_input(a, Vector::Ones(1));
  PrimalResult rb = optimize_fixed_input(b, Vector::Ones(1));
  CHECK(ra.value == Catch::Approx(rb.value).margin(1e-10));
}
