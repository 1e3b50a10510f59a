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

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace qpd {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Dense complex matrix constrained to be Hermitian.
///
/// Construction symmetrizes (m + m†)/2 when the asymmetry is below
/// 1e-12 * (1 + max|entry|) and throws otherwise, so every instance is
/// exactly Hermitian and all pairings against it are real.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const Matrix& m);

  static HermitianMatrix zero(int dim);
  static HermitianMatrix identity(int dim);
  /// Rank-1 projector v v† (not normalized).
  static HermitianMatrix outer(const Vector& v);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Matrix& raw() const { return mat_; }
  Complex operator()(int i, int j) const { return mat_(i, j); }

  double trace() const { return mat_.trace().real(); }
  double frobenius_norm() const { return mat_.norm(); }

  HermitianMatrix operator+(const HermitianMatrix& o) const;
  HermitianMatrix operator-(const HermitianMatrix& o) const;
  HermitianMatrix operator*(double s) const;
  HermitianMatrix operator-() const { return *this * -1.0; }

 private:
  struct Trusted {};
  HermitianMatrix(Matrix m, Trusted) : mat_(std::move(m)) {}
  Matrix mat_;
};

inline HermitianMatrix operator*(double s, const HermitianMatrix& m) { return m * s; }

/// Ordered subsystem dimensions for W_T ⊗ V_T ⊗ ... ⊗ W_1 ⊗ V_1,
/// leftmost factor at index 0. Dimension-1 subsystems are legal and
/// stand in for the trivial system C.
class SystemLayout {
 public:
  explicit SystemLayout(std::vector<int> dims, std::vector<std::string> labels = {});

  int subsystem_count() const { return static_cast<int>(dims_.size()); }
  int dim(int i) const { return dims_.at(i); }
  const std::vector<int>& dims() const { return dims_; }
  const std::vector<std::string>& labels() const { return labels_; }
  int total_dim() const;

  bool operator==(const SystemLayout& o) const { return dims_ == o.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<std::string> labels_;
};

/// Tr(a b); real because both arguments are Hermitian, symmetric in (a, b).
double inner_product(const HermitianMatrix& a, const HermitianMatrix& b);

HermitianMatrix kron(const HermitianMatrix& a, const HermitianMatrix& b);
Matrix kron(const Matrix& a, const Matrix& b);

/// Trace over the subsystems NOT listed in `keep`; kept subsystems stay in
/// their original relative order. Preserves the total trace.
HermitianMatrix partial_trace(const HermitianMatrix& m, const SystemLayout& layout,
                              const std::vector<int>& keep);
Matrix partial_trace(const Matrix& m, const std::vector<int>& dims, const std::vector<int>& keep);

/// Relabel subsystems: slot i of the result is subsystem perm[i] of the input.
HermitianMatrix permute_systems(const HermitianMatrix& m, const SystemLayout& layout,
                                const std::vector<int>& perm);
Matrix permute_systems(const Matrix& m, const std::vector<int>& dims, const std::vector<int>& perm);

/// Transpose the listed subsystems in place, leaving the rest untouched.
HermitianMatrix partial_transpose(const HermitianMatrix& m, const SystemLayout& layout,
                                  const std::vector<int>& systems);

struct EigResult {
  Eigen::VectorXd values;  // sorted descending
  Matrix vectors;          // orthonormal columns, matching order
};

EigResult eig_hermitian(const HermitianMatrix& m);

double min_eigenvalue(const HermitianMatrix& m);
double max_eigenvalue(const HermitianMatrix& m);

/// min_eigenvalue(m) >= -tol * (1 + ||m||_F)
bool is_psd(const HermitianMatrix& m, double tol = 1e-9);

/// Hermitian square root of a PSD matrix (negative eigenvalues clamped to 0).
HermitianMatrix psd_sqrt(const HermitianMatrix& m);

// Orthonormal real basis of the Hermitian matrices of a given dimension,
// packed as coordinates: diagonal entries first, then (sqrt2*Re, sqrt2*Im)
// of each strictly upper entry. Satisfies Tr(A B) = dot(pack A, pack B).
int herm_basis_size(int dim);
Eigen::VectorXd herm_pack(const Matrix& h);
Matrix herm_unpack(const Eigen::VectorXd& coords, int dim);
Matrix herm_basis_element(int dim, int index);

/// Orthonormal basis of the traceless Hermitian matrices (dim^2 - 1 items).
std::vector<Matrix> traceless_herm_basis(int dim);

}  // namespace qpd
