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

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qpd/hermitian.hpp"

namespace qpd {

// Conic programs in the standard primal-dual pair
//
//   (P)  min sum_k <C_k, X_k>   s.t.  sum_k <A_ik, X_k> = b_i,   X_k >= 0
//   (D)  max b^T y              s.t.  C_k - sum_i y_i A_ik >= 0
//
// over complex Hermitian blocks. One Nesterov-Todd predictor-corrector
// iteration solves the pair; builders below encode either reading.

struct ConicOptions {
  double tol = 1e-8;        // relative gap and residual target
  int max_iterations = 150;
  bool trace = false;       // per-iteration telemetry on stderr
};

struct ConicSolution {
  Eigen::VectorXd y;                       // dual/free variables
  std::vector<HermitianMatrix> block_X;    // primal blocks (constraint multipliers in LMI form)
  std::vector<HermitianMatrix> block_S;    // slack blocks
  double primal_value = 0.0;               // <C, X>
  double dual_value = 0.0;                 // b^T y
  int iterations = 0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  bool converged = false;
};

class ConicError : public std::runtime_error {
 public:
  ConicError(const std::string& what, const ConicSolution& best)
      : std::runtime_error(what), best_iterate(best) {}
  ConicSolution best_iterate;
};

struct StandardSdp {
  std::vector<int> block_dims;
  std::vector<Matrix> objective;             // C_k, one per block (may be zero)
  // Constraint rows stored packed: row i of `rows` holds the herm_pack
  // coordinates of every A_ik, blocks concatenated in order.
  Eigen::MatrixXd rows;
  Eigen::VectorXd rhs;

  int packed_size() const;
  int block_offset(int k) const;  // offset of block k in packed coordinates
};

ConicSolution solve_standard(const StandardSdp& sdp, const ConicOptions& opt = {});

/// Coefficient matrix of a real-linear Hermitian->Hermitian map: column s is
/// herm_pack(lin(basis_s)).
Eigen::MatrixXd linear_map_coefficients(const std::function<Matrix(const Matrix&)>& lin,
                                        int in_dim, int out_dim);

/// LMI-form problems: minimize c^T y subject to
///   Const_k + sum_i y_i Coeff_ik >= 0 for every block k,
/// where y collects free scalar and free Hermitian variables.
class LmiProgram {
 public:
  struct Var {
    int offset = -1;
    int dim = 0;   // Hermitian dimension; 0 for scalar and vector variables
    int size = 1;  // raw coordinate count
    int coords() const { return dim == 0 ? size : dim * dim; }
  };

  Var add_scalar();
  Var add_hermitian(int dim);
  /// Plain real coordinate vector; terms supply one matrix per coordinate.
  Var add_vector(int n);

  int add_block(int dim);
  void add_const(int block, const Matrix& value);
  /// Hermitian-variable term: the block gains lin(H) for variable value H.
  void add_term(int block, Var v, const std::function<Matrix(const Matrix&)>& lin);
  /// Vector-variable term: the block gains sum_i y_i per_coord[i].
  void add_term(int block, Var v, const std::vector<Matrix>& per_coord);
  /// Scalar-variable term: the block gains y * coeff.
  void add_scalar_term(int block, Var v, const Matrix& coeff);

  void add_objective(Var v, const Eigen::VectorXd& coeffs);  // + coeffs . coords(v)
  void add_objective(Var v, double coeff);                   // scalar variable

  struct Result {
    double value = 0.0;  // c^T y at the optimum
    Eigen::VectorXd y;
    ConicSolution raw;
  };
  Result solve(const ConicOptions& opt = {}) const;

  Matrix value_of(const Result& r, Var v) const;
  double scalar_of(const Result& r, Var v) const;
  Eigen::VectorXd vector_of(const Result& r, Var v) const {
    return r.y.segment(v.offset, v.coords());
  }

  int var_coords() const { return total_coords_; }

 private:
  int total_coords_ = 0;
  std::vector<int> block_dims_;
  std::vector<Matrix> block_const_;
  // Per block: dense (n^2 x total_coords) coefficient matrix in packed form.
  std::vector<Eigen::MatrixXd> block_coeffs_;
  Eigen::VectorXd objective_;
  void ensure_objective_size();
};

/// Primal-form problems: minimize sum <obj_k, X_k> over PSD blocks X_k tied
/// by affine equality constraints.
class PrimalSdp {
 public:
  int add_psd_block(int dim);
  void add_objective(int block, const Matrix& coeff);

  using Term = std::pair<int, std::function<Matrix(const Matrix&)>>;
  /// sum_k L_k(X_k) = rhs, expanded over the Hermitian basis of rhs's space.
  void add_matrix_equality(const std::vector<Term>& terms, const Matrix& rhs);
  /// sum_k <coeff_k, X_k> = rhs.
  void add_scalar_equality(const std::vector<std::pair<int, Matrix>>& terms, double rhs);

  struct Result {
    double value = 0.0;  // objective at the optimum
    std::vector<HermitianMatrix> X;
    ConicSolution raw;
  };
  Result solve(const ConicOptions& opt = {}) const;

 private:
  std::vector<int> block_dims_;
  std::vector<Matrix> objective_;
  std::vector<Eigen::VectorXd> rows_;
  std::vector<double> rhs_;
};

}  // namespace qpd
