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

#include <cstdint>
#include <vector>

#include "qpd/hermitian.hpp"

namespace qpd {

/// Deterministic random stream. Gaussian variates come from a hand-rolled
/// Box-Muller over the raw 64-bit engine so output is identical on every
/// platform (std::normal_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(uint64_t seed);

  /// Independent child stream; (seed, index) pairs never collide.
  Rng spawn(uint64_t index) const;

  double uniform();               // [0, 1)
  double gaussian();              // standard normal
  int uniform_int(int bound);     // {0, ..., bound-1}
  Complex gaussian_complex();     // Re, Im independent N(0, 1)

  Matrix ginibre(int rows, int cols);
  Matrix haar_unitary(int dim);
  /// Haar-random isometry, cols <= rows; satisfies V†V = I.
  Matrix haar_isometry(int rows, int cols);
  Vector random_pure_state(int dim);
  HermitianMatrix random_density(int dim, int rank = 0);
  HermitianMatrix random_hermitian(int dim);
  /// M positive operators summing to the identity.
  std::vector<HermitianMatrix> random_povm(int dim, int outcomes);
  /// Point on the probability simplex.
  std::vector<double> random_priors(int m);

 private:
  uint64_t next_u64();
  uint64_t state_;
  uint64_t inc_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace qpd
