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

#include "qpd/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace qpd {

namespace {
constexpr uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += kSplitMixGamma);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace

Rng::Rng(uint64_t seed) : state_(seed), inc_(kSplitMixGamma) {
  // Warm up so nearby seeds decorrelate.
  for (int i = 0; i < 4; ++i) splitmix64(state_);
}

Rng Rng::spawn(uint64_t index) const {
  uint64_t s = state_;
  uint64_t mixed = splitmix64(s) ^ (index * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL);
  return Rng(mixed);
}

uint64_t Rng::next_u64() { return splitmix64(state_); }

double Rng::uniform() {
  // 53 random bits -> double in [0, 1).
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 1e-300) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

int Rng::uniform_int(int bound) {
  if (bound <= 0) throw std::invalid_argument("uniform_int: bound must be positive");
  return static_cast<int>(next_u64() % static_cast<uint64_t>(bound));
}

Complex Rng::gaussian_complex() {
  const double re = gaussian();
  const double im = gaussian();
  return Complex(re, im);
}

Matrix Rng::ginibre(int rows, int cols) {
  Matrix g(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) g(i, j) = gaussian_complex();
  return g;
}

Matrix Rng::haar_unitary(int dim) { return haar_isometry(dim, dim); }

Matrix Rng::haar_isometry(int rows, int cols) {
  if (cols > rows) throw std::invalid_argument("haar_isometry: cols must be <= rows");
  Matrix g = ginibre(rows, cols);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(rows, cols);
  Matrix r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  // Fix phases so the distribution is Haar, not QR-convention dependent.
  for (int j = 0; j < cols; ++j) {
    Complex d = r(j, j);
    double a = std::abs(d);
    if (a > 1e-300) q.col(j) *= d / a;
  }
  return q;
}

Vector Rng::random_pure_state(int dim) {
  Vector v(dim);
  for (int i = 0; i < dim; ++i) v(i) = gaussian_complex();
  v.normalize();
  return v;
}

HermitianMatrix Rng::random_density(int dim, int rank) {
  if (rank <= 0 || rank > dim) rank = dim;
  Matrix g = ginibre(dim, rank);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return HermitianMatrix(rho);
}

HermitianMatrix Rng::random_hermitian(int dim) {
  Matrix g = ginibre(dim, dim);
  return HermitianMatrix(0.5 * (g + g.adjoint().eval()));
}

std::vector<HermitianMatrix> Rng::random_povm(int dim, int outcomes) {
  std::vector<Matrix> raw;
  Matrix total = Matrix::Zero(dim, dim);
  for (int m = 0; m < outcomes; ++m) {
    Matrix g = ginibre(dim, dim);
    raw.push_back(g * g.adjoint());
    total += raw.back();
  }
  // Normalize: S^{-1/2} G_m S^{-1/2} sums to the identity.
  Eigen::SelfAdjointEigenSolver<Matrix> es(total);
  Matrix inv_sqrt = es.eigenvectors() *
                    es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse().asDiagonal() *
                    es.eigenvectors().adjoint();
  std::vector<HermitianMatrix> povm;
  for (int m = 0; m < outcomes; ++m) {
    povm.push_back(HermitianMatrix(inv_sqrt * raw[m] * inv_sqrt));
  }
  return povm;
}

std::vector<double> Rng::random_priors(int m) {
  std::vector<double> p(m);
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    const double g = gaussian();
    p[i] = g * g;  // chi-squared(1), a valid Dirichlet-like weight
    total += p[i];
  }
  for (int i = 0; i < m; ++i) p[i] /= total;
  return p;
}

}  // namespace qpd
