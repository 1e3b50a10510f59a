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
#include "qpd/strategy.hpp"
#include "support/test_helpers.hpp"

using namespace qpd;

namespace {
const SystemLayout kOneStep({2, 2});
const SystemLayout kTwoStep({2, 2, 2, 2});
}

TEST_CASE("sampled testers validate in their own class") {
  struct Case {
    StrategyClass cls;
    const SystemLayout* layout;
    int time_steps;
  };
  Vector zero_state = basis_ket(2, 0);
  std::vector<Case> cases = {
      {StrategyClass::global(), &kOneStep, 1},
      {StrategyClass::global(), &kTwoStep, 2},
      {StrategyClass::fixed_input(zero_state), &kOneStep, 1},
      {StrategyClass::separable_input(), &kOneStep, 1},
      {StrategyClass::nonadaptive(), &kTwoStep, 2},
      {StrategyClass::sequential_two_step(2), &kTwoStep, 2},
      {StrategyClass::one_way_ab(), &kTwoStep, 2},
      {StrategyClass::max_entangled(), &kOneStep, 1},
      {StrategyClass::max_entangled(), &kTwoStep, 2},
  };
  for (const auto& c : cases) {
    for (uint64_t seed : {11, 12, 13}) {
      Tester t = sample_tester(c.cls, *c.layout, c.time_steps, 3, seed);
      auto report = validate_tester(t, c.cls, 1e-8);
      INFO(to_string(c.cls.variant()) << " seed " << seed << ": " << report.diagnostics);
      CHECK(report.ok);
      // Class hierarchy: everything also validates as an unrestricted tester.
      Tester as_global(t.elements(), StrategyClass::global());
      CHECK(validate_tester(as_global, StrategyClass::global(), 1e-8).ok);
    }
  }
}

TEST_CASE("sampling is deterministic in the seed") {
  Tester a = sample_tester(StrategyClass::global(), kTwoStep, 2, 3, 99);
  Tester b = sample_tester(StrategyClass::global(), kTwoStep, 2, 3, 99);
  for (int m = 0; m < 3; ++m) {
    CHECK((a.element(m).matrix().raw() - b.element(m).matrix().raw()).norm() == 0.0);
  }
}

TEST_CASE("validate_tester rejects broken sums with a diagnostic") {
  Tester t = sample_tester(StrategyClass::max_entangled(), kOneStep, 1, 2, 5);
  std::vector<ChoiProcess> warped;
  for (const auto& e : t.elements()) {
    warped.emplace_back(e.matrix() * 1.5, e.layout(), ProcessRole::tester_element);
  }
  Tester bad(warped, StrategyClass::max_entangled());
  auto report = validate_tester(bad, StrategyClass::max_entangled(), 1e-8);
  CHECK_FALSE(report.ok);
  CHECK(report.diagnostics.find("maximally mixed") != std::string::npos);
}

TEST_CASE("global tester built from state and measurement validates") {
  // Bell input into the channel slot plus a projective measurement.
  Rng rng(21);
  Matrix u = rng.haar_unitary(4);
  std::vector<ChoiProcess> elements;
  HermitianMatrix sigma(0.5 * Matrix::Identity(4, 4));  // I_W ⊗ (I/2)
  HermitianMatrix root = psd_sqrt(sigma);
  for (int m = 0; m < 4; ++m) {
    Vector col = u.col(m);
    HermitianMatrix proj = HermitianMatrix::outer(col);
    elements.emplace_back(HermitianMatrix(root.raw() * proj.raw() * root.raw()), kOneStep,
                          ProcessRole::tester_element);
  }
  // Merge outcomes 2,3 to get a 3-outcome tester.
  std::vector<ChoiProcess> merged = {elements[0], elements[1],
                                     ChoiProcess(elements[2].matrix() + elements[3].matrix(),
                                                 kOneStep, ProcessRole::tester_element)};
  Tester t(merged, StrategyClass::global());
  CHECK(validate_tester(t, StrategyClass::global(), 1e-8).ok);
}

TEST_CASE("cone separation for the PSD-product classes is the min-eig test") {
  Rng rng(31);
  SeparationOptions opt;
  opt.tol = 1e-9;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<HermitianMatrix> deficit;
    bool psd = true;
    for (int m = 0; m < 3; ++m) {
      HermitianMatrix h = rng.random_hermitian(4);
      if (trial % 2 == 0) h = h + HermitianMatrix::identity(4) * (2.5 * h.frobenius_norm());
      psd = psd && min_eigenvalue(h) >= -opt.tol * (1.0 + h.frobenius_norm());
      deficit.push_back(h);
    }
    auto viol = cone_separation(StrategyClass::global(), deficit, kOneStep, 1, opt);
    CHECK(viol.has_value() == !psd);
    if (viol) {
      CHECK(viol->violation < 0.0);
      double pairing = 0.0;
      for (int m = 0; m < 3; ++m) pairing += inner_product(viol->phi[m], deficit[m]);
      CHECK(pairing == Catch::Approx(viol->violation).margin(1e-10));
    }
  }
}

TEST_CASE("separation example: one negative direction") {
  Matrix d1 = Matrix::Identity(2, 2);
  d1(1, 1) = -0.5;
  std::vector<HermitianMatrix> deficit = {HermitianMatrix(d1), HermitianMatrix::identity(2),
                                          HermitianMatrix::identity(2)};
  auto viol = cone_separation(StrategyClass::global(), deficit, SystemLayout({2, 1}), 1, {});
  REQUIRE(viol.has_value());
  CHECK(viol->violation == Catch::Approx(-0.5).margin(1e-10));
  CHECK(viol->phi[0].trace() == Catch::Approx(1.0).margin(1e-10));
  CHECK(viol->phi[1].frobenius_norm() == 0.0);
}

TEST_CASE("sequential separation finds a violator for an undervalued comb") {
  DiscriminationInstance inst = phase_trine_instance();
  DualCertificate global = solve_global_dual(inst);
  REQUIRE(global.comb_factor.has_value());
  // 0.9 < the sequential value, so 0.9 * comb cannot be feasible.
  HermitianMatrix chi = global.comb_factor->second.matrix() * 0.9;
  std::vector<HermitianMatrix> deficit;
  for (int m = 0; m < 3; ++m) deficit.push_back(chi - inst.weighted(m));
  auto viol = cone_separation(StrategyClass::sequential_two_step(), deficit, kTwoStep, 2, {});
  REQUIRE(viol.has_value());
  CHECK(viol->violation < -1e-4);
  // The violator pairing reproduces the reported violation.
  double pairing = 0.0;
  for (int m = 0; m < 3; ++m) pairing += inner_product(viol->phi[m], deficit[m]);
  CHECK(pairing == Catch::Approx(viol->violation).margin(1e-8));
}

TEST_CASE("separation accepts points feasible for every strategy") {
  DiscriminationInstance inst = phase_trine_instance();
  DualCertificate global = solve_global_dual(inst);
  std::vector<HermitianMatrix> deficit;
  for (int m = 0; m < 3; ++m) deficit.push_back(global.chi - inst.weighted(m));
  SeparationOptions opt;
  opt.tol = 1e-5;
  opt.restarts = 6;
  CHECK_FALSE(one_way_separation(deficit, kTwoStep, opt).has_value());
  CHECK_FALSE(sequential_separation(deficit, kTwoStep, opt).has_value());
}

TEST_CASE("custom classes require oracles") {
  CustomOracles oracles;  // no sampler, no separation
  StrategyClass custom = StrategyClass::custom(oracles);
  CHECK_THROWS_AS(sample_tester(custom, kOneStep, 1, 2, 1), std::invalid_argument);
  std::vector<HermitianMatrix> deficit = {HermitianMatrix::identity(4),
                                          HermitianMatrix::identity(4)};
  CHECK_THROWS_AS(cone_separation(custom, deficit, kOneStep, 1, {}), std::invalid_argument);
}

TEST_CASE("sub-tester optimization dominates random sampling") {
  Rng rng(71);
  std::vector<HermitianMatrix> h = {rng.random_hermitian(4), rng.random_hermitian(4)};
  auto [value, b] = optimize_sub_tester(h, 2, 2, true, 1e-9);
  double sampled_best = -1e300;
  for (int trial = 0; trial < 300; ++trial) {
    HermitianMatrix rho = rng.random_density(2);
    HermitianMatrix sig(kron(Matrix::Identity(2, 2), rho.raw()));
    HermitianMatrix root = psd_sqrt(sig);
    auto povm = rng.random_povm(4, 2);
    double v = 0.0;
    for (int m = 0; m < 2; ++m) {
      v += inner_product(HermitianMatrix(root.raw() * povm[m].raw() * root.raw()), h[m]);
    }
    sampled_best = std::max(sampled_best, v);
  }
  CHECK(value >= sampled_best - 1e-7);
  // The maximizer itself is a valid sub-tester.
  Matrix sum = b[0].raw() + b[1].raw();
  Matrix rho = partial_trace(sum, {2, 2}, {1}) / 2.0;
  CHECK((sum - kron(Matrix::Identity(2, 2), rho)).norm() <= 1e-6);
}
