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

DiscriminationInstance two_state_instance(const HermitianMatrix& rho1, const HermitianMatrix& rho2,
                                          double p1) {
  SystemLayout layout({2, 1});
  return DiscriminationInstance(
      {ChoiProcess(rho1, layout), ChoiProcess(rho2, layout)}, {p1, 1.0 - p1}, 1);
}

DiscriminationInstance random_channel_instance(int m_count, int time_steps, uint64_t seed) {
  SystemLayout layout(std::vector<int>(2 * time_steps, 2));
  Rng prior_rng(seed ^ 0xabcdef);
  std::vector<ChoiProcess> combs;
  for (int m = 0; m < m_count; ++m) combs.push_back(random_comb(layout, time_steps, seed * 31 + m));
  return DiscriminationInstance(combs, prior_rng.random_priors(m_count), time_steps);
}

}  // namespace

TEST_CASE("evaluate_D_S closed forms") {
  // Maximally entangled sum set: <I/prod N_V, chi>.
  SystemLayout two({2, 2, 2, 2});
  CHECK(evaluate_D_S(StrategyClass::max_entangled(), HermitianMatrix::identity(16), two, 2) ==
        Catch::Approx(4.0).margin(1e-12));

  // Fixed input |0>: <I_W ⊗ |0><0|, chi> picks twice the top-left diagonal.
  SystemLayout one({2, 2});
  Matrix chi = kron(Matrix::Identity(2, 2), Matrix(Eigen::Vector2cd(0.3, 0.9).asDiagonal()));
  CHECK(evaluate_D_S(StrategyClass::fixed_input(basis_ket(2, 0)), HermitianMatrix(chi), one, 1) ==
        Catch::Approx(0.6).margin(1e-12));

  // Dual-comb set value of a scaled comb is the scale.
  for (uint64_t seed : {1, 2, 3}) {
    ChoiProcess tau = random_comb(two, 2, seed);
    const double lambda = 0.25 + 0.5 * seed;
    CHECK(dual_comb_set_value(tau.matrix() * lambda, two, 2) ==
          Catch::Approx(lambda).margin(1e-6));
  }
}

TEST_CASE("global dual of identical ensembles is 1/M") {
  SystemLayout layout({2, 2});
  ChoiProcess lam(lambda_choi(1), layout);
  for (int m_count : {2, 3}) {
    std::vector<ChoiProcess> combs(m_count, lam);
    std::vector<double> priors(m_count, 1.0 / m_count);
    DiscriminationInstance inst(combs, priors, 1);
    DualCertificate cert = solve_global_dual(inst);
    CHECK(cert.value == Catch::Approx(1.0 / m_count).margin(1e-6));
    REQUIRE(cert.comb_factor.has_value());
    auto [ok, witness] = is_comb(cert.comb_factor->second, 1, {1e-6, 1e-7});
    CHECK(ok);
  }
}

TEST_CASE("global dual separates orthogonal pure states perfectly") {
  DiscriminationInstance inst = two_state_instance(
      HermitianMatrix::outer(basis_ket(2, 0)), HermitianMatrix::outer(basis_ket(2, 1)), 0.5);
  CHECK(solve_global_dual(inst).value == Catch::Approx(1.0).margin(1e-7));
}

TEST_CASE("global dual matches the closed form on random two-state instances") {
  Rng rng(2024);
  for (int trial = 0; trial < 30; ++trial) {
    HermitianMatrix rho1 = rng.random_density(2);
    HermitianMatrix rho2 = rng.random_density(2);
    const double p1 = 0.2 + 0.6 * rng.uniform();
    DiscriminationInstance inst = two_state_instance(rho1, rho2, p1);
    auto [expected, povm] = helstrom_two_state(p1, rho1, 1.0 - p1, rho2);
    CHECK(solve_global_dual(inst).value == Catch::Approx(expected).margin(1e-6));
  }
}

TEST_CASE("reference instance: unrestricted value is 1") {
  DiscriminationInstance inst = phase_trine_instance();
  DualCertificate cert = solve_global_dual(inst);
  CHECK(cert.value == Catch::Approx(1.0).margin(1e-6));
  REQUIRE(cert.comb_factor.has_value());
}

TEST_CASE("cutting plane on the PSD-product path agrees with the direct solve") {
  for (uint64_t seed : {41, 42}) {
    DiscriminationInstance inst = random_channel_instance(2, 1, seed);
    DualCertificate direct = solve_global_dual(inst);
    DualOptions opt;
    DualCertificate cp = solve_semi_infinite(inst, StrategyClass::global(), opt);
    CHECK(cp.value == Catch::Approx(direct.value).margin(1e-6));
  }
}

TEST_CASE("reference instance: sequential value and the reduced brute force") {
  DiscriminationInstance inst = phase_trine_instance();
  DualOptions opt;
  opt.restarts = 10;
  DualCertificate cert = solve_dual(inst, StrategyClass::sequential_two_step(), opt);
  CHECK(std::abs(cert.value - 0.933) <= 5e-3);
  CHECK(cert.bound_kind == DualCertificate::BoundKind::exact);
  CHECK(cert.upper_bracket >= cert.lower_bracket - 1e-6);

  const double brute = oracles::trine_reduced_brute_force(7);
  CHECK(std::abs(cert.value - brute) <= 1e-3);
}

TEST_CASE("nonadaptive dual is sandwiched on the reference instance") {
  DiscriminationInstance inst = phase_trine_instance();
  DualCertificate cert = solve_dual(inst, StrategyClass::nonadaptive());
  CHECK(cert.value <= 1.0 + 1e-6);
  double best_sample = 0.0;
  for (uint64_t seed = 0; seed < 6; ++seed) {
    Tester t = sample_tester(StrategyClass::nonadaptive(), inst.layout(), 2, 3, seed);
    double p = 0.0;
    for (int m = 0; m < 3; ++m) {
      p += inst.prior(m) * inner_product(t.element(m).matrix(), inst.comb(m).matrix());
    }
    best_sample = std::max(best_sample, p);
  }
  CHECK(cert.value >= best_sample - 1e-6);
}

TEST_CASE("fixed input aligned with identical outputs yields a coin flip") {
  // Phase channels act trivially on |0>, so the outputs coincide.
  SystemLayout layout({2, 2});
  std::vector<ChoiProcess> combs = {
      choi_from_kraus({Matrix::Identity(2, 2)}, 2, 2),
      choi_from_kraus({pauli_z().raw()}, 2, 2)};
  DiscriminationInstance inst(combs, {0.5, 0.5}, 1);
  DualCertificate cert = solve_dual(inst, StrategyClass::fixed_input(basis_ket(2, 0)));
  CHECK(cert.value == Catch::Approx(0.5).margin(1e-7));
}

TEST_CASE("weak duality against sampled testers") {
  for (uint64_t seed : {5, 6}) {
    DiscriminationInstance inst = random_channel_instance(3, 2, seed);
    DualCertificate cert = solve_global_dual(inst);
    // Strictify feasibility so the comparison is exact mathematics.
    double worst = 0.0;
    for (int m = 0; m < 3; ++m) {
      worst = std::min(worst, min_eigenvalue(cert.chi - inst.weighted(m)));
    }
    HermitianMatrix chi = cert.chi + HermitianMatrix::identity(16) * (-worst);
    const double d_value = dual_comb_set_value(chi, inst.layout(), 2);
    for (uint64_t s = 0; s < 10; ++s) {
      Tester t = sample_tester(StrategyClass::global(), inst.layout(), 2, 3, 100 + s);
      double p = 0.0;
      for (int m = 0; m < 3; ++m) {
        p += inst.prior(m) * inner_product(t.element(m).matrix(), inst.comb(m).matrix());
      }
      CHECK(p <= d_value + 1e-9);
    }
  }
}

TEST_CASE("zero duality gap on random instances") {
  for (uint64_t seed : {11, 12, 13}) {
    for (int time_steps : {1, 2}) {
      DiscriminationInstance inst = random_channel_instance(2 + static_cast<int>(seed % 2),
                                                            time_steps, seed * 7);
      DualCertificate dual = solve_global_dual(inst);
      PrimalResult primal = optimize_global(inst);
      CHECK(std::abs(primal.value - dual.value) <= 1e-4 * (1.0 + dual.value));
    }
  }
}

TEST_CASE("certificate replay verifies") {
  DiscriminationInstance inst = phase_trine_instance();
  DualCertificate cert = solve_global_dual(inst);
  CertificateReplay replay = verify_certificate(cert, inst, StrategyClass::global(), 1e-6);
  CHECK(replay.feasible);
  CHECK(replay.value_matches);
}

TEST_CASE("dual value is invariant under relabeling the ensemble") {
  Rng rng(515);
  HermitianMatrix rho1 = rng.random_density(2);
  HermitianMatrix rho2 = rng.random_density(2);
  DiscriminationInstance a = two_state_instance(rho1, rho2, 0.3);
  DiscriminationInstance b = two_state_instance(rho2, rho1, 0.7);
  CHECK(solve_global_dual(a).value ==
        Catch::Approx(solve_global_dual(b).value).margin(1e-8));
}
