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

#include "qpd/conic.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>

namespace qpd {

int StandardSdp::packed_size() const {
  int total = 0;
  for (int d : block_dims) total += d * d;
  return total;
}

int StandardSdp::block_offset(int k) const {
  int off = 0;
  for (int i = 0; i < k; ++i) off += block_dims[i] * block_dims[i];
  return off;
}

namespace {

// Hermitian square root and inverse square root via eigendecomposition,
// with eigenvalues floored to keep the scaling point well defined.
void sqrt_pair(const Matrix& m, Matrix& root, Matrix& inv_root) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Eigen::VectorXd vals = es.eigenvalues().cwiseMax(1e-300);
  Eigen::VectorXd s = vals.cwiseSqrt();
  root = es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
  inv_root = es.eigenvectors() * s.cwiseInverse().asDiagonal() * es.eigenvectors().adjoint();
}

Matrix herm_part(const Matrix& m) { return 0.5 * (m + m.adjoint().eval()); }

// Largest alpha in (0, 1] with X + alpha dX >= 0, given a factor of X.
double max_step(const Matrix& x, const Matrix& dx) {
  Eigen::LLT<Matrix> llt(x);
  Matrix l;
  if (llt.info() == Eigen::Success) {
    l = llt.matrixL();
  } else {
    Eigen::LLT<Matrix> boosted(x + 1e-14 * x.trace().real() * Matrix::Identity(x.rows(), x.cols()) +
                               1e-300 * Matrix::Identity(x.rows(), x.cols()));
    if (boosted.info() != Eigen::Success) return 0.0;
    l = boosted.matrixL();
  }
  Matrix inner = l.triangularView<Eigen::Lower>().solve(dx);
  inner = l.triangularView<Eigen::Lower>().solve(inner.adjoint().eval()).adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(herm_part(inner), Eigen::EigenvaluesOnly);
  const double lam_min = es.eigenvalues().minCoeff();
  if (lam_min >= -1e-300) return 1.0;
  return std::min(1.0, -1.0 / lam_min);
}

struct BlockView {
  std::vector<Matrix> mats;

  explicit BlockView(const std::vector<int>& dims) {
    for (int d : dims) mats.push_back(Matrix::Zero(d, d));
  }

  void unpack(const Eigen::VectorXd& packed, const StandardSdp& sdp) {
    for (size_t k = 0; k < mats.size(); ++k) {
      const int d = sdp.block_dims[k];
      mats[k] = herm_unpack(packed.segment(sdp.block_offset(static_cast<int>(k)), d * d), d);
    }
  }

  Eigen::VectorXd pack(const StandardSdp& sdp) const {
    Eigen::VectorXd out(sdp.packed_size());
    for (size_t k = 0; k < mats.size(); ++k) {
      out.segment(sdp.block_offset(static_cast<int>(k)),
                  sdp.block_dims[k] * sdp.block_dims[k]) = herm_pack(mats[k]);
    }
    return out;
  }
};

}  // namespace

ConicSolution solve_standard(const StandardSdp& sdp, const ConicOptions& opt) {
  const int nblocks = static_cast<int>(sdp.block_dims.size());
  const int m = static_cast<int>(sdp.rows.rows());
  const int packed = sdp.packed_size();
  if (sdp.rows.cols() != packed) {
    throw std::invalid_argument("solve_standard: row width does not match blocks");
  }

  int cone_dim = 0;
  for (int d : sdp.block_dims) cone_dim += d;

  // Scale-aware cold start.
  double data_scale = 1.0 + sdp.rhs.cwiseAbs().maxCoeff();
  double coeff_scale = 1.0;
  for (const Matrix& c : sdp.objective) coeff_scale = std::max(coeff_scale, c.norm());
  if (m > 0) coeff_scale = std::max(coeff_scale, sdp.rows.cwiseAbs().maxCoeff());

  std::vector<Matrix> X, S;
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < nblocks; ++k) {
    const int d = sdp.block_dims[k];
    X.push_back(Matrix::Identity(d, d) * std::max(1.0, data_scale) * std::sqrt(double(d)));
    S.push_back(Matrix::Identity(d, d) * std::max(1.0, coeff_scale));
  }

  auto pack_blocks = [&](const std::vector<Matrix>& blocks) {
    Eigen::VectorXd out(packed);
    for (int k = 0; k < nblocks; ++k) {
      out.segment(sdp.block_offset(k), sdp.block_dims[k] * sdp.block_dims[k]) =
          herm_pack(blocks[k]);
    }
    return out;
  };
  auto unpack_vec = [&](const Eigen::VectorXd& v) {
    std::vector<Matrix> out;
    for (int k = 0; k < nblocks; ++k) {
      const int d = sdp.block_dims[k];
      out.push_back(herm_unpack(v.segment(sdp.block_offset(k), d * d), d));
    }
    return out;
  };

  Eigen::VectorXd c_packed = pack_blocks(sdp.objective);

  auto make_solution = [&](int iter, bool conv, double gap, double pres, double dres) {
    ConicSolution sol;
    sol.y = y;
    for (int k = 0; k < nblocks; ++k) {
      sol.block_X.emplace_back(HermitianMatrix(herm_part(X[k])));
      sol.block_S.emplace_back(HermitianMatrix(herm_part(S[k])));
    }
    sol.primal_value = c_packed.dot(pack_blocks(X));
    sol.dual_value = sdp.rhs.dot(y);
    sol.iterations = iter;
    sol.gap = gap;
    sol.primal_residual = pres;
    sol.dual_residual = dres;
    sol.converged = conv;
    return sol;
  };

  double best_err = std::numeric_limits<double>::infinity();
  ConicSolution best;

  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    // Residuals.
    Eigen::VectorXd x_packed = pack_blocks(X);
    Eigen::VectorXd rp = sdp.rhs - sdp.rows * x_packed;
    Eigen::VectorXd aty = sdp.rows.transpose() * y;
    std::vector<Matrix> aty_blocks = unpack_vec(aty);
    std::vector<Matrix> Rd(nblocks);
    double dres = 0.0;
    for (int k = 0; k < nblocks; ++k) {
      Rd[k] = sdp.objective[k] - S[k] - aty_blocks[k];
      dres = std::max(dres, Rd[k].norm());
    }
    const double pres = m > 0 ? rp.norm() : 0.0;
    const double pobj = c_packed.dot(x_packed);
    const double dobj = sdp.rhs.dot(y);
    const double rel_gap = std::abs(pobj - dobj) / (1.0 + std::max(std::abs(pobj), std::abs(dobj)));
    const double rel_p = pres / (1.0 + sdp.rhs.norm());
    const double rel_d = dres / (1.0 + coeff_scale);

    double mu = 0.0;
    for (int k = 0; k < nblocks; ++k) mu += (X[k] * S[k]).trace().real();
    mu /= std::max(1, cone_dim);

    if (opt.trace) {
      std::fprintf(stderr, "  conic iter %3d  gap %.3e  pres %.3e  dres %.3e  mu %.3e\n", iter,
                   rel_gap, rel_p, rel_d, mu);
    }

    const double err = rel_gap + rel_p + rel_d;
    if (err < best_err) {
      best_err = err;
      best = make_solution(iter, false, rel_gap, rel_p, rel_d);
    }
    if (rel_gap <= opt.tol && rel_p <= opt.tol && rel_d <= opt.tol) {
      return make_solution(iter, true, rel_gap, rel_p, rel_d);
    }
    if (!std::isfinite(mu) || mu > 1e100) {
      throw ConicError("conic solver diverged (mu=" + std::to_string(mu) + ")", best);
    }

    // Nesterov-Todd scaling per block: W S W = X.
    std::vector<Matrix> W(nblocks), G(nblocks), Ginv(nblocks), lam(nblocks);
    std::vector<Eigen::SelfAdjointEigenSolver<Matrix>> lam_eig(nblocks);
    for (int k = 0; k < nblocks; ++k) {
      Matrix xr, xir;
      sqrt_pair(herm_part(X[k]), xr, xir);
      Matrix mid = herm_part(xr * S[k] * xr);
      Matrix mr, mir;
      sqrt_pair(mid, mr, mir);
      W[k] = herm_part(xr * mir * xr);
      Matrix wr, wir;
      sqrt_pair(W[k], wr, wir);
      G[k] = wr;
      Ginv[k] = wir;
      lam[k] = herm_part(0.5 * (Ginv[k] * X[k] * Ginv[k] + G[k] * S[k] * G[k]));
      lam_eig[k].compute(lam[k]);
      if (lam_eig[k].info() != Eigen::Success) {
        throw ConicError("conic solver: scaling eigendecomposition failed", best);
      }
    }

    // Lyapunov solve in the scaling eigenbasis: L_lam(K) = R.
    auto lyap_solve = [&](int k, const Matrix& r) {
      const auto& q = lam_eig[k].eigenvectors();
      const auto& l = lam_eig[k].eigenvalues();
      Matrix rq = q.adjoint() * r * q;
      for (Eigen::Index a = 0; a < rq.rows(); ++a)
        for (Eigen::Index b = 0; b < rq.cols(); ++b)
          rq(a, b) *= 2.0 / std::max(l(a) + l(b), 1e-300);
      return herm_part(q * rq * q.adjoint());
    };

    // Schur complement M_ij = sum_k <A_ik, W A_jk W>, via packed GEMM.
    Eigen::MatrixXd Tpack(m, packed);
    for (int i = 0; i < m; ++i) {
      std::vector<Matrix> ai = unpack_vec(sdp.rows.row(i).transpose());
      Eigen::VectorXd trow(packed);
      for (int k = 0; k < nblocks; ++k) {
        const int d = sdp.block_dims[k];
        trow.segment(sdp.block_offset(k), d * d) = herm_pack(herm_part(W[k] * ai[k] * W[k]));
      }
      Tpack.row(i) = trow;
    }
    Eigen::MatrixXd M = sdp.rows * Tpack.transpose();
    M = 0.5 * (M + M.transpose().eval());

    Eigen::LLT<Eigen::MatrixXd> mf(M);
    double boost = std::max(1e-14 * M.diagonal().maxCoeff(), 1e-300);
    while (mf.info() != Eigen::Success && boost < 1e-4 * (1.0 + M.diagonal().maxCoeff())) {
      M += boost * Eigen::MatrixXd::Identity(m, m);
      mf.compute(M);
      boost *= 100.0;
    }
    if (mf.info() != Eigen::Success) {
      throw ConicError("conic solver: Schur factorization failed", best);
    }
    auto schur_solve = [&](const Eigen::VectorXd& r) {
      Eigen::VectorXd s = mf.solve(r);
      s += mf.solve(r - M * s);  // one refinement step
      return s;
    };

    // Common piece A(W Rd W).
    Eigen::VectorXd a_wrdw(m);
    {
      Eigen::VectorXd tmp(packed);
      for (int k = 0; k < nblocks; ++k) {
        const int d = sdp.block_dims[k];
        tmp.segment(sdp.block_offset(k), d * d) = herm_pack(herm_part(W[k] * Rd[k] * W[k]));
      }
      a_wrdw = sdp.rows * tmp;
    }

    auto direction = [&](const std::vector<Matrix>& K, std::vector<Matrix>& dX,
                         Eigen::VectorXd& dy, std::vector<Matrix>& dS) {
      Eigen::VectorXd a_gkg(m);
      Eigen::VectorXd tmp(packed);
      for (int k = 0; k < nblocks; ++k) {
        const int d = sdp.block_dims[k];
        tmp.segment(sdp.block_offset(k), d * d) = herm_pack(herm_part(G[k] * K[k] * G[k]));
      }
      a_gkg = sdp.rows * tmp;
      dy = schur_solve(rp - a_gkg + a_wrdw);
      Eigen::VectorXd atdy = sdp.rows.transpose() * dy;
      std::vector<Matrix> atdy_blocks = unpack_vec(atdy);
      dX.resize(nblocks);
      dS.resize(nblocks);
      for (int k = 0; k < nblocks; ++k) {
        dS[k] = Rd[k] - atdy_blocks[k];
        dX[k] = herm_part(G[k] * K[k] * G[k] - W[k] * dS[k] * W[k]);
      }
    };

    // Predictor (affine) direction: K = lyap^-1(-lam^2) = -lam.
    std::vector<Matrix> K_aff(nblocks);
    for (int k = 0; k < nblocks; ++k) K_aff[k] = -lam[k];
    std::vector<Matrix> dX_aff, dS_aff;
    Eigen::VectorXd dy_aff;
    direction(K_aff, dX_aff, dy_aff, dS_aff);

    double ap = 1.0, ad = 1.0;
    for (int k = 0; k < nblocks; ++k) {
      ap = std::min(ap, max_step(herm_part(X[k]), dX_aff[k]));
      ad = std::min(ad, max_step(herm_part(S[k]), dS_aff[k]));
    }
    double mu_aff = 0.0;
    for (int k = 0; k < nblocks; ++k) {
      mu_aff += ((X[k] + ap * dX_aff[k]) * (S[k] + ad * dS_aff[k])).trace().real();
    }
    mu_aff /= std::max(1, cone_dim);
    double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3.0);
    sigma = std::min(1.0, std::max(sigma, 1e-10));

    // Corrector.
    std::vector<Matrix> K(nblocks);
    for (int k = 0; k < nblocks; ++k) {
      Matrix dxt = Ginv[k] * dX_aff[k] * Ginv[k];
      Matrix dst = G[k] * dS_aff[k] * G[k];
      Matrix r = sigma * mu * Matrix::Identity(lam[k].rows(), lam[k].cols()) - lam[k] * lam[k] -
                 herm_part(dxt * dst);
      K[k] = lyap_solve(k, herm_part(r));
    }
    std::vector<Matrix> dX, dS;
    Eigen::VectorXd dy;
    direction(K, dX, dy, dS);

    ap = 1.0;
    ad = 1.0;
    for (int k = 0; k < nblocks; ++k) {
      ap = std::min(ap, max_step(herm_part(X[k]), dX[k]));
      ad = std::min(ad, max_step(herm_part(S[k]), dS[k]));
    }
    const double gamma = 0.98;
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);

    for (int k = 0; k < nblocks; ++k) {
      X[k] = herm_part(X[k] + ap * dX[k]);
      S[k] = herm_part(S[k] + ad * dS[k]);
    }
    y += ad * dy;
  }

  throw ConicError("conic solver did not converge within iteration cap (best gap " +
                       std::to_string(best.gap) + ", primal residual " +
                       std::to_string(best.primal_residual) + ", dual residual " +
                       std::to_string(best.dual_residual) + ")",
                   best);
}

Eigen::MatrixXd linear_map_coefficients(const std::function<Matrix(const Matrix&)>& lin,
                                        int in_dim, int out_dim) {
  Eigen::MatrixXd coeffs(out_dim * out_dim, in_dim * in_dim);
  for (int s = 0; s < in_dim * in_dim; ++s) {
    Matrix image = lin(herm_basis_element(in_dim, s));
    if (image.rows() != out_dim) {
      throw std::invalid_argument("linear_map_coefficients: map output has wrong dimension");
    }
    coeffs.col(s) = herm_pack(herm_part(image));
  }
  return coeffs;
}

LmiProgram::Var LmiProgram::add_scalar() {
  Var v{total_coords_, 0, 1};
  total_coords_ += 1;
  ensure_objective_size();
  return v;
}

LmiProgram::Var LmiProgram::add_hermitian(int dim) {
  Var v{total_coords_, dim, dim * dim};
  total_coords_ += dim * dim;
  ensure_objective_size();
  return v;
}

LmiProgram::Var LmiProgram::add_vector(int n) {
  Var v{total_coords_, 0, n};
  total_coords_ += n;
  ensure_objective_size();
  return v;
}

void LmiProgram::ensure_objective_size() {
  Eigen::VectorXd grown = Eigen::VectorXd::Zero(total_coords_);
  grown.head(objective_.size()) = objective_;
  objective_ = grown;
  for (auto& coeffs : block_coeffs_) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(coeffs.rows(), total_coords_);
    g.leftCols(coeffs.cols()) = coeffs;
    coeffs = g;
  }
}

int LmiProgram::add_block(int dim) {
  block_dims_.push_back(dim);
  block_const_.push_back(Matrix::Zero(dim, dim));
  block_coeffs_.push_back(Eigen::MatrixXd::Zero(dim * dim, total_coords_));
  return static_cast<int>(block_dims_.size()) - 1;
}

void LmiProgram::add_const(int block, const Matrix& value) {
  block_const_[block] += value;
}

void LmiProgram::add_term(int block, Var v, const std::function<Matrix(const Matrix&)>& lin) {
  if (v.dim == 0) throw std::invalid_argument("LmiProgram::add_term: variable is not Hermitian");
  Eigen::MatrixXd coeffs = linear_map_coefficients(lin, v.dim, block_dims_[block]);
  block_coeffs_[block].middleCols(v.offset, v.coords()) += coeffs;
}

void LmiProgram::add_term(int block, Var v, const std::vector<Matrix>& per_coord) {
  if (static_cast<int>(per_coord.size()) != v.coords()) {
    throw std::invalid_argument("LmiProgram::add_term: coordinate count mismatch");
  }
  for (int i = 0; i < v.coords(); ++i) {
    block_coeffs_[block].col(v.offset + i) += herm_pack(herm_part(per_coord[i]));
  }
}

void LmiProgram::add_scalar_term(int block, Var v, const Matrix& coeff) {
  if (v.dim != 0) throw std::invalid_argument("LmiProgram::add_term: hermitian var needs a map");
  block_coeffs_[block].col(v.offset) += herm_pack(herm_part(coeff));
}

void LmiProgram::add_objective(Var v, const Eigen::VectorXd& coeffs) {
  objective_.segment(v.offset, v.coords()) += coeffs;
}

void LmiProgram::add_objective(Var v, double coeff) {
  objective_(v.offset) += coeff;
}

LmiProgram::Result LmiProgram::solve(const ConicOptions& opt) const {
  // Encode as the (D) side: max (-c)^T y with C_k - sum_i y_i A_ik >= 0,
  // where C_k = Const_k and A_ik = -Coeff_ik.
  StandardSdp sdp;
  sdp.block_dims = block_dims_;
  sdp.objective = block_const_;
  sdp.rows.resize(total_coords_, sdp.packed_size());
  for (size_t k = 0; k < block_dims_.size(); ++k) {
    sdp.rows.middleCols(sdp.block_offset(static_cast<int>(k)),
                        block_dims_[k] * block_dims_[k]) =
        -block_coeffs_[k].transpose();
  }
  sdp.rhs = -objective_;

  ConicSolution sol = solve_standard(sdp, opt);
  Result res;
  res.y = sol.y;
  res.value = objective_.dot(sol.y);
  res.raw = std::move(sol);
  return res;
}

Matrix LmiProgram::value_of(const Result& r, Var v) const {
  return herm_unpack(r.y.segment(v.offset, v.coords()), v.dim);
}

double LmiProgram::scalar_of(const Result& r, Var v) const { return r.y(v.offset); }

int PrimalSdp::add_psd_block(int dim) {
  block_dims_.push_back(dim);
  objective_.push_back(Matrix::Zero(dim, dim));
  return static_cast<int>(block_dims_.size()) - 1;
}

void PrimalSdp::add_objective(int block, const Matrix& coeff) {
  objective_[block] += coeff;
}

void PrimalSdp::add_matrix_equality(const std::vector<Term>& terms, const Matrix& rhs) {
  const int out_dim = static_cast<int>(rhs.rows());
  int packed = 0;
  for (int d : block_dims_) packed += d * d;
  std::vector<Eigen::MatrixXd> coeff_mats(block_dims_.size());
  for (const auto& [blk, lin] : terms) {
    Eigen::MatrixXd c = linear_map_coefficients(lin, block_dims_[blk], out_dim);
    if (coeff_mats[blk].size() == 0) {
      coeff_mats[blk] = c;
    } else {
      coeff_mats[blk] += c;
    }
  }
  Eigen::VectorXd rhs_packed = herm_pack(herm_part(rhs));
  for (int r = 0; r < out_dim * out_dim; ++r) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(packed);
    int off = 0;
    for (size_t k = 0; k < block_dims_.size(); ++k) {
      const int sz = block_dims_[k] * block_dims_[k];
      if (coeff_mats[k].size() != 0) row.segment(off, sz) = coeff_mats[k].row(r);
      off += sz;
    }
    rows_.push_back(row);
    rhs_.push_back(rhs_packed(r));
  }
}

void PrimalSdp::add_scalar_equality(const std::vector<std::pair<int, Matrix>>& terms, double rhs) {
  int packed = 0;
  for (int d : block_dims_) packed += d * d;
  Eigen::VectorXd row = Eigen::VectorXd::Zero(packed);
  for (const auto& [blk, coeff] : terms) {
    int off = 0;
    for (int k = 0; k < blk; ++k) off += block_dims_[k] * block_dims_[k];
    row.segment(off, block_dims_[blk] * block_dims_[blk]) += herm_pack(herm_part(coeff));
  }
  rows_.push_back(row);
  rhs_.push_back(rhs);
}

PrimalSdp::Result PrimalSdp::solve(const ConicOptions& opt) const {
  StandardSdp sdp;
  sdp.block_dims = block_dims_;
  sdp.objective = objective_;
  const int m = static_cast<int>(rows_.size());
  sdp.rows.resize(m, sdp.packed_size());
  for (int i = 0; i < m; ++i) sdp.rows.row(i) = rows_[i];
  sdp.rhs.resize(m);
  for (int i = 0; i < m; ++i) sdp.rhs(i) = rhs_[i];

  ConicSolution sol = solve_standard(sdp, opt);
  Result res;
  res.value = sol.primal_value;
  res.X = sol.block_X;
  res.raw = std::move(sol);
  return res;
}

}  // namespace qpd
