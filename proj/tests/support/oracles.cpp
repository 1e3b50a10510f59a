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

#include "support/oracles.hpp"

#include <array>
#include <cmath>

namespace qpd::oracles {

double helstrom_povm_search(double p1, const HermitianMatrix& rho1, double p2,
                            const HermitianMatrix& rho2, int samples, uint64_t seed) {
  Rng rng(seed);
  const int d = rho1.dim();
  double best = std::max(p1, p2);  // guessing without measuring
  Matrix best_dir;
  for (int s = 0; s < samples; ++s) {
    Matrix pi1;
    if (s % 2 == 0) {
      Vector v = rng.random_pure_state(d);
      pi1 = v * v.adjoint();
    } else {
      std::vector<HermitianMatrix> povm = rng.random_povm(d, 2);
      pi1 = povm[0].raw();
    }
    const double value = p1 * pi1.cwiseProduct(rho1.raw().conjugate()).sum().real() +
                         p2 * (Matrix::Identity(d, d) - pi1)
                                  .cwiseProduct(rho2.raw().conjugate())
                                  .sum()
                                  .real();
    if (value > best) {
      best = value;
      best_dir = pi1;
    }
  }
  // Polish the best projective direction by a shrinking random walk so the
  // search itself converges, not just samples.
  if (best_dir.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(best_dir);
    Vector v = es.eigenvectors().col(d - 1);
    double scale = 0.3;
    for (int it = 0; it < 4000; ++it) {
      Vector cand = v + scale * rng.random_pure_state(d);
      cand.normalize();
      Matrix pi1 = cand * cand.adjoint();
      const double value = p1 * pi1.cwiseProduct(rho1.raw().conjugate()).sum().real() +
                           p2 * (Matrix::Identity(d, d) - pi1)
                                    .cwiseProduct(rho2.raw().conjugate())
                                    .sum()
                                    .real();
      if (value > best) {
        best = value;
        v = cand;
      } else {
        scale *= 0.995;
      }
    }
  }
  return best;
}

namespace {

const Complex kOmega = std::exp(Complex(0.0, 2.0 * M_PI / 3.0));

// Objective of the reduced problem: testers live on the two-dimensional
// corner support, as 2x2 PSD parts summing to diag(d, 1-d); the pairing
// with the m-th channel is <u_m, B_m u_m> for u_m = (1, w^m).
double reduced_objective(const std::array<Matrix, 3>& b) {
  double a = 0.0;
  Complex phase = 0.0;
  for (int m = 1; m <= 3; ++m) {
    Vector u(2);
    u << 1.0, std::pow(kOmega, m);
    const double c = (u.adjoint() * b[m - 1] * u).real()(0, 0) / 3.0;
    a += c;
    phase += c * std::pow(kOmega, m);
  }
  return a + std::abs(phase);
}

// Rescale three raw PSD factors so the parts sum exactly to diag(d, 1-d).
bool project_to_tester(const std::array<Matrix, 3>& raw, double d, std::array<Matrix, 3>& out) {
  Matrix total = raw[0] + raw[1] + raw[2];
  Eigen::SelfAdjointEigenSolver<Matrix> es(total);
  if (es.eigenvalues().minCoeff() < 1e-12) return false;
  Matrix inv_root = es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                    es.eigenvectors().adjoint();
  Matrix droot = Matrix::Zero(2, 2);
  droot(0, 0) = std::sqrt(std::max(0.0, d));
  droot(1, 1) = std::sqrt(std::max(0.0, 1.0 - d));
  for (int m = 0; m < 3; ++m) {
    out[m] = droot * inv_root * raw[m] * inv_root * droot;
  }
  return true;
}

}  // namespace

double trine_reduced_brute_force(uint64_t seed) {
  double best = 0.0;

  // Deterministic layer: for each outcome pair, a projective measurement of
  // the corner qubit swept over a Bloch grid, third outcome empty on the
  // support, input weight d swept over a coarse grid.
  const double step = M_PI / 180.0;
  for (int pair = 0; pair < 3; ++pair) {
    for (double dgrid = 0.30; dgrid <= 0.701; dgrid += 0.05) {
      Matrix droot = Matrix::Zero(2, 2);
      droot(0, 0) = std::sqrt(dgrid);
      droot(1, 1) = std::sqrt(1.0 - dgrid);
      for (double theta = 0.0; theta <= M_PI + 1e-12; theta += step) {
        for (double phi = 0.0; phi < 2.0 * M_PI - 1e-12; phi += 4.0 * step) {
          Vector u(2);
          u << std::cos(theta / 2.0), std::exp(Complex(0.0, phi)) * std::sin(theta / 2.0);
          Vector uperp(2);
          uperp << -std::conj(u(1)), std::conj(u(0));
          std::array<Matrix, 3> b = {Matrix::Zero(2, 2), Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
          b[pair] = droot * (u * u.adjoint()) * droot;
          b[(pair + 1) % 3] = droot * (uperp * uperp.adjoint()) * droot;
          best = std::max(best, reduced_objective(b));
        }
      }
    }
  }

  // Stochastic layer: random rank factors with multiplicative polish,
  // exploring testers with three active outcomes and free d.
  Rng rng(seed);
  for (int start = 0; start < 60; ++start) {
    std::array<Matrix, 3> raw;
    for (int m = 0; m < 3; ++m) {
      Matrix g = rng.ginibre(2, 2);
      raw[m] = g * g.adjoint() + 1e-6 * Matrix::Identity(2, 2);
    }
    double d = 0.25 + 0.5 * rng.uniform();
    std::array<Matrix, 3> tester;
    if (!project_to_tester(raw, d, tester)) continue;
    double current = reduced_objective(tester);
    double scale = 0.5;
    for (int it = 0; it < 400; ++it) {
      std::array<Matrix, 3> cand_raw = raw;
      const int which = rng.uniform_int(3);
      Matrix g = rng.ginibre(2, 2);
      cand_raw[which] = raw[which] + scale * (g * g.adjoint());
      double cand_d = std::clamp(d + scale * 0.2 * (rng.uniform() - 0.5), 0.01, 0.99);
      std::array<Matrix, 3> cand;
      if (!project_to_tester(cand_raw, cand_d, cand)) continue;
      const double value = reduced_objective(cand);
      if (value > current) {
        current = value;
        raw = cand_raw;
        d = cand_d;
      } else {
        scale *= 0.97;
      }
    }
    best = std::max(best, current);
  }
  return best;
}

}  // namespace qpd::oracles
