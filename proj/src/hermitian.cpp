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

#include "qpd/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qpd {

namespace {

// Mixed-radix index helpers: index <-> digit vector for a dims list.
void index_to_digits(int index, const std::vector<int>& dims, std::vector<int>& digits) {
  for (int i = static_cast<int>(dims.size()) - 1; i >= 0; --i) {
    digits[i] = index % dims[i];
    index /= dims[i];
  }
}

int digits_to_index(const std::vector<int>& digits, const std::vector<int>& dims) {
  int index = 0;
  for (size_t i = 0; i < dims.size(); ++i) index = index * dims[i] + digits[i];
  return index;
}

int product(const std::vector<int>& dims) {
  return std::accumulate(dims.begin(), dims.end(), 1, std::multiplies<int>());
}

}  // namespace

HermitianMatrix::HermitianMatrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw std::invalid_argument("HermitianMatrix: matrix must be square with dim >= 1");
  }
  const double max_entry = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.adjoint()).norm();
  if (asym > 1e-12 * (1.0 + max_entry) * std::sqrt(static_cast<double>(m.rows()))) {
    throw std::invalid_argument("HermitianMatrix: input is not Hermitian (asymmetry " +
                                std::to_string(asym) + ")");
  }
  mat_ = 0.5 * (m + m.adjoint().eval());
}

HermitianMatrix HermitianMatrix::zero(int dim) {
  return HermitianMatrix(Matrix::Zero(dim, dim), Trusted{});
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  return HermitianMatrix(Matrix::Identity(dim, dim), Trusted{});
}

HermitianMatrix HermitianMatrix::outer(const Vector& v) {
  return HermitianMatrix((v * v.adjoint()).eval(), Trusted{});
}

HermitianMatrix HermitianMatrix::operator+(const HermitianMatrix& o) const {
  if (dim() != o.dim()) throw std::invalid_argument("HermitianMatrix: dimension mismatch in +");
  return HermitianMatrix(mat_ + o.mat_, Trusted{});
}

HermitianMatrix HermitianMatrix::operator-(const HermitianMatrix& o) const {
  if (dim() != o.dim()) throw std::invalid_argument("HermitianMatrix: dimension mismatch in -");
  return HermitianMatrix(mat_ - o.mat_, Trusted{});
}

HermitianMatrix HermitianMatrix::operator*(double s) const {
  return HermitianMatrix(s * mat_, Trusted{});
}

SystemLayout::SystemLayout(std::vector<int> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
  if (dims_.empty()) throw std::invalid_argument("SystemLayout: empty dims");
  for (int d : dims_) {
    if (d < 1) throw std::invalid_argument("SystemLayout: all dims must be >= 1");
  }
  if (!labels_.empty() && labels_.size() != dims_.size()) {
    throw std::invalid_argument("SystemLayout: labels/dims size mismatch");
  }
}

int SystemLayout::total_dim() const { return product(dims_); }

double inner_product(const HermitianMatrix& a, const HermitianMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("inner_product: dimension mismatch");
  // Tr(ab) = sum_ij a_ij conj(b_ij) for Hermitian b.
  return a.raw().cwiseProduct(b.raw().conjugate()).sum().real();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

HermitianMatrix kron(const HermitianMatrix& a, const HermitianMatrix& b) {
  return HermitianMatrix(kron(a.raw(), b.raw()));
}

Matrix partial_trace(const Matrix& m, const std::vector<int>& dims, const std::vector<int>& keep) {
  const int n = static_cast<int>(dims.size());
  for (int k : keep) {
    if (k < 0 || k >= n) throw std::invalid_argument("partial_trace: subsystem index out of range");
  }
  if (m.rows() != product(dims)) {
    throw std::invalid_argument("partial_trace: matrix dim does not match layout");
  }
  std::vector<int> keep_sorted(keep);
  std::sort(keep_sorted.begin(), keep_sorted.end());
  keep_sorted.erase(std::unique(keep_sorted.begin(), keep_sorted.end()), keep_sorted.end());

  std::vector<int> traced;
  for (int i = 0; i < n; ++i) {
    if (!std::binary_search(keep_sorted.begin(), keep_sorted.end(), i)) traced.push_back(i);
  }
  std::vector<int> keep_dims, traced_dims;
  for (int i : keep_sorted) keep_dims.push_back(dims[i]);
  for (int i : traced) traced_dims.push_back(dims[i]);
  const int dk = product(keep_dims);
  const int dt = product(traced_dims);

  Matrix out = Matrix::Zero(dk, dk);
  std::vector<int> row(n), col(n), krow(keep_sorted.size()), kcol(keep_sorted.size()),
      tdig(traced.size());
  for (int r = 0; r < dk; ++r) {
    index_to_digits(r, keep_dims, krow);
    for (int c = 0; c < dk; ++c) {
      index_to_digits(c, keep_dims, kcol);
      Complex sum = 0.0;
      for (int t = 0; t < dt; ++t) {
        index_to_digits(t, traced_dims, tdig);
        for (size_t i = 0; i < keep_sorted.size(); ++i) {
          row[keep_sorted[i]] = krow[i];
          col[keep_sorted[i]] = kcol[i];
        }
        for (size_t i = 0; i < traced.size(); ++i) {
          row[traced[i]] = tdig[i];
          col[traced[i]] = tdig[i];
        }
        sum += m(digits_to_index(row, dims), digits_to_index(col, dims));
      }
      out(r, c) = sum;
    }
  }
  return out;
}

HermitianMatrix partial_trace(const HermitianMatrix& m, const SystemLayout& layout,
                              const std::vector<int>& keep) {
  return HermitianMatrix(partial_trace(m.raw(), layout.dims(), keep));
}

Matrix permute_systems(const Matrix& m, const std::vector<int>& dims, const std::vector<int>& perm) {
  const int n = static_cast<int>(dims.size());
  if (static_cast<int>(perm.size()) != n) {
    throw std::invalid_argument("permute_systems: permutation size mismatch");
  }
  std::vector<bool> seen(n, false);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p]) {
      throw std::invalid_argument("permute_systems: invalid permutation");
    }
    seen[p] = true;
  }
  if (m.rows() != product(dims)) {
    throw std::invalid_argument("permute_systems: matrix dim does not match layout");
  }
  std::vector<int> new_dims(n);
  for (int i = 0; i < n; ++i) new_dims[i] = dims[perm[i]];
  const int d = static_cast<int>(m.rows());

  // Row r of the result, decomposed in new_dims, has digit i equal to digit
  // perm[i] of the corresponding source row.
  std::vector<int> map(d);
  std::vector<int> digits(n), src(n);
  for (int r = 0; r < d; ++r) {
    index_to_digits(r, new_dims, digits);
    for (int i = 0; i < n; ++i) src[perm[i]] = digits[i];
    map[r] = digits_to_index(src, dims);
  }
  Matrix out(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) out(r, c) = m(map[r], map[c]);
  return out;
}

HermitianMatrix permute_systems(const HermitianMatrix& m, const SystemLayout& layout,
                                const std::vector<int>& perm) {
  return HermitianMatrix(permute_systems(m.raw(), layout.dims(), perm));
}

HermitianMatrix partial_transpose(const HermitianMatrix& m, const SystemLayout& layout,
                                  const std::vector<int>& systems) {
  const auto& dims = layout.dims();
  const int n = layout.subsystem_count();
  for (int s : systems) {
    if (s < 0 || s >= n) throw std::invalid_argument("partial_transpose: index out of range");
  }
  if (m.dim() != layout.total_dim()) {
    throw std::invalid_argument("partial_transpose: matrix dim does not match layout");
  }
  std::vector<bool> flip(n, false);
  for (int s : systems) flip[s] = true;
  const int d = m.dim();
  Matrix out(d, d);
  std::vector<int> rd(n), cd(n), nr(n), nc(n);
  for (int r = 0; r < d; ++r) {
    index_to_digits(r, dims, rd);
    for (int c = 0; c < d; ++c) {
      index_to_digits(c, dims, cd);
      for (int i = 0; i < n; ++i) {
        nr[i] = flip[i] ? cd[i] : rd[i];
        nc[i] = flip[i] ? rd[i] : cd[i];
      }
      out(digits_to_index(nr, dims), digits_to_index(nc, dims)) = m.raw()(r, c);
    }
  }
  return HermitianMatrix(out);
}

EigResult eig_hermitian(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.raw());
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eig_hermitian: eigensolver failed");
  }
  const int d = m.dim();
  EigResult res;
  res.values.resize(d);
  res.vectors.resize(d, d);
  // Eigen returns ascending order; flip to descending.
  for (int i = 0; i < d; ++i) {
    res.values(i) = solver.eigenvalues()(d - 1 - i);
    res.vectors.col(i) = solver.eigenvectors().col(d - 1 - i);
  }
  return res;
}

double min_eigenvalue(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.raw(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

double max_eigenvalue(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m.raw(), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

bool is_psd(const HermitianMatrix& m, double tol) {
  return min_eigenvalue(m) >= -tol * (1.0 + m.frobenius_norm());
}

HermitianMatrix psd_sqrt(const HermitianMatrix& m) {
  EigResult eig = eig_hermitian(m);
  Eigen::VectorXd sqrt_vals = eig.values.cwiseMax(0.0).cwiseSqrt();
  return HermitianMatrix(eig.vectors * sqrt_vals.asDiagonal() * eig.vectors.adjoint());
}

int herm_basis_size(int dim) { return dim * dim; }

Eigen::VectorXd herm_pack(const Matrix& h) {
  const int n = static_cast<int>(h.rows());
  Eigen::VectorXd out(n * n);
  int k = 0;
  for (int i = 0; i < n; ++i) out(k++) = h(i, i).real();
  const double s = std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      out(k++) = s * h(i, j).real();
      out(k++) = s * h(i, j).imag();
    }
  }
  return out;
}

Matrix herm_unpack(const Eigen::VectorXd& coords, int dim) {
  Matrix h = Matrix::Zero(dim, dim);
  int k = 0;
  for (int i = 0; i < dim; ++i) h(i, i) = coords(k++);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const double re = coords(k++) * s;
      const double im = coords(k++) * s;
      h(i, j) = Complex(re, im);
      h(j, i) = Complex(re, -im);
    }
  }
  return h;
}

Matrix herm_basis_element(int dim, int index) {
  Eigen::VectorXd coords = Eigen::VectorXd::Zero(dim * dim);
  coords(index) = 1.0;
  return herm_unpack(coords, dim);
}

std::vector<Matrix> traceless_herm_basis(int dim) {
  std::vector<Matrix> basis;
  // Diagonal part: dim-1 generalized Gell-Mann diagonal matrices.
  for (int k = 1; k < dim; ++k) {
    Matrix m = Matrix::Zero(dim, dim);
    const double norm = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
    for (int i = 0; i < k; ++i) m(i, i) = norm;
    m(k, k) = -static_cast<double>(k) * norm;
    basis.push_back(m);
  }
  // Off-diagonal part reuses the packed basis ordering.
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      Matrix re = Matrix::Zero(dim, dim), im = Matrix::Zero(dim, dim);
      re(i, j) = re(j, i) = s;
      im(i, j) = Complex(0.0, s);
      im(j, i) = Complex(0.0, -s);
      basis.push_back(re);
      basis.push_back(im);
    }
  }
  return basis;
}

}  // namespace qpd
