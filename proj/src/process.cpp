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

#include "qpd/process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qpd {

namespace {

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

int product(const std::vector<int>& v) {
  return std::accumulate(v.begin(), v.end(), 1, std::multiplies<int>());
}

}  // namespace

ChoiProcess::ChoiProcess(HermitianMatrix matrix, SystemLayout layout, ProcessRole role,
                         double psd_tol)
    : matrix_(std::move(matrix)), layout_(std::move(layout)), role_(role) {
  if (matrix_.dim() != layout_.total_dim()) {
    throw std::invalid_argument("ChoiProcess: matrix dim does not match layout");
  }
  if (role_ != ProcessRole::dual_variable && !is_psd(matrix_, psd_tol)) {
    throw std::invalid_argument("ChoiProcess: matrix must be PSD for this role");
  }
}

DiscriminationInstance::DiscriminationInstance(std::vector<ChoiProcess> combs,
                                               std::vector<double> priors, int time_steps,
                                               CombTolerances tol)
    : combs_(std::move(combs)), priors_(std::move(priors)), time_steps_(time_steps) {
  if (combs_.size() < 2) throw std::invalid_argument("DiscriminationInstance: need M >= 2 combs");
  if (priors_.size() != combs_.size()) {
    throw std::invalid_argument("DiscriminationInstance: priors/combs size mismatch");
  }
  double sum = 0.0;
  for (double p : priors_) {
    if (p < -1e-15) throw std::invalid_argument("DiscriminationInstance: negative prior");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::invalid_argument("DiscriminationInstance: priors must sum to 1");
  }
  const SystemLayout& base = combs_.front().layout();
  if (base.subsystem_count() != 2 * time_steps_) {
    throw std::invalid_argument("DiscriminationInstance: layout must have 2T subsystems");
  }
  for (const auto& c : combs_) {
    if (!(c.layout() == base)) {
      throw std::invalid_argument("DiscriminationInstance: combs must share one layout");
    }
    auto [ok, witness] = is_comb(c, time_steps_, tol);
    if (!ok) {
      throw std::invalid_argument("DiscriminationInstance: comb check failed (residual " +
                                  std::to_string(witness.residual) + ")");
    }
  }
}

std::vector<int> DiscriminationInstance::input_dims() const {
  std::vector<int> out;
  const auto& dims = layout().dims();
  for (size_t i = 1; i < dims.size(); i += 2) out.push_back(dims[i]);
  return out;
}

double DiscriminationInstance::input_dim_product() const {
  double p = 1.0;
  for (int d : input_dims()) p *= d;
  return p;
}

ChoiProcess choi_from_kraus(const std::vector<Matrix>& kraus, int in_dim, int out_dim,
                            ProcessRole role) {
  if (kraus.empty()) throw std::invalid_argument("choi_from_kraus: empty Kraus list");
  const int d = out_dim * in_dim;
  Matrix choi = Matrix::Zero(d, d);
  for (const Matrix& k : kraus) {
    if (k.rows() != out_dim || k.cols() != in_dim) {
      throw std::invalid_argument("choi_from_kraus: Kraus operator has wrong shape");
    }
    // (K ⊗ I)|I⟩⟩ is K flattened row-major.
    Vector w(d);
    for (int i = 0; i < out_dim; ++i)
      for (int j = 0; j < in_dim; ++j) w(i * in_dim + j) = k(i, j);
    choi += w * w.adjoint();
  }
  return ChoiProcess(HermitianMatrix(choi), SystemLayout({out_dim, in_dim}), role);
}

std::pair<bool, CombWitness> is_comb(const ChoiProcess& p, int time_steps, CombTolerances tol) {
  const SystemLayout& layout = p.layout();
  if (layout.subsystem_count() != 2 * time_steps) {
    throw std::invalid_argument("is_comb: layout must have 2T subsystems");
  }
  CombWitness witness;
  bool ok = is_psd(p.matrix(), tol.psd);

  // Walk the recursion from tau^(T) = p down to the scalar tau^(0) = 1.
  std::vector<HermitianMatrix> chain_desc;  // tau^(T), tau^(T-1), ..., tau^(1)
  chain_desc.push_back(p.matrix());
  std::vector<int> dims = layout.dims();
  HermitianMatrix current = p.matrix();
  for (int t = time_steps; t >= 1; --t) {
    // current = tau^(t) on [W_t, V_t, ..., W_1, V_1]; trace out W_t.
    std::vector<int> keep(dims.size() - 1);
    std::iota(keep.begin(), keep.end(), 1);
    Matrix a = partial_trace(current.raw(), dims, keep);
    std::vector<int> a_dims(dims.begin() + 1, dims.end());
    const int nv = a_dims[0];

    if (t == 1) {
      // Bottom level: Tr_{W_1} tau^(1) must be exactly I_{V_1}.
      const double scalar = a.trace().real() / nv;
      double res = (a - Matrix::Identity(nv, nv) * scalar).norm();
      res = std::max(res, std::abs(scalar - 1.0));
      witness.residual = std::max(witness.residual, res);
      break;
    }

    std::vector<int> keep_rest(a_dims.size() - 1);
    std::iota(keep_rest.begin(), keep_rest.end(), 1);
    Matrix tau_prev = partial_trace(a, a_dims, keep_rest) / static_cast<double>(nv);
    const double res = (a - kron(Matrix::Identity(nv, nv), tau_prev)).norm();
    witness.residual = std::max(witness.residual, res);

    dims.assign(a_dims.begin() + 1, a_dims.end());
    current = HermitianMatrix(tau_prev);
    chain_desc.push_back(current);
  }

  // Spec order: tau^(1) first.
  witness.chain.assign(chain_desc.rbegin(), chain_desc.rend());
  ok = ok && witness.residual <= tol.residual;
  return {ok, witness};
}

bool is_dual_comb(const ChoiProcess& p, int time_steps, CombTolerances tol) {
  const SystemLayout& layout = p.layout();
  if (layout.subsystem_count() != 2 * time_steps) {
    throw std::invalid_argument("is_dual_comb: layout must have 2T subsystems");
  }
  if (!is_psd(p.matrix(), tol.psd)) return false;

  double residual = 0.0;
  std::vector<int> dims = layout.dims();

  // Factor p = I_{W_T} ⊗ tau^(T).
  const int nw_top = dims[0];
  std::vector<int> keep(dims.size() - 1);
  std::iota(keep.begin(), keep.end(), 1);
  Matrix tau = partial_trace(p.matrix().raw(), dims, keep) / static_cast<double>(nw_top);
  residual = std::max(residual, (p.matrix().raw() - kron(Matrix::Identity(nw_top, nw_top), tau)).norm());
  std::vector<int> tau_dims(dims.begin() + 1, dims.end());

  // tau^(t) lives on [V_t, W_{t-1}, V_{t-1}, ..., V_1]; peel two systems per step.
  for (int t = time_steps; t >= 2; --t) {
    std::vector<int> keep_a(tau_dims.size() - 1);
    std::iota(keep_a.begin(), keep_a.end(), 1);
    Matrix a = partial_trace(tau, tau_dims, keep_a);
    std::vector<int> a_dims(tau_dims.begin() + 1, tau_dims.end());
    const int nw = a_dims[0];
    std::vector<int> keep_b(a_dims.size() - 1);
    std::iota(keep_b.begin(), keep_b.end(), 1);
    Matrix tau_prev = partial_trace(a, a_dims, keep_b) / static_cast<double>(nw);
    residual = std::max(residual, (a - kron(Matrix::Identity(nw, nw), tau_prev)).norm());
    tau = tau_prev;
    tau_dims.assign(a_dims.begin() + 1, a_dims.end());
  }

  // tau^(1) must be a density on V_1.
  residual = std::max(residual, std::abs(tau.trace().real() - 1.0));
  return residual <= tol.residual;
}

ChoiProcess link_product(const ChoiProcess& a, const ChoiProcess& b,
                         const std::vector<std::pair<int, int>>& shared, ProcessRole role) {
  const auto& adims = a.layout().dims();
  const auto& bdims = b.layout().dims();
  std::vector<bool> a_shared(adims.size(), false), b_shared(bdims.size(), false);
  for (auto [ia, ib] : shared) {
    if (ia < 0 || ia >= static_cast<int>(adims.size()) || ib < 0 ||
        ib >= static_cast<int>(bdims.size())) {
      throw std::invalid_argument("link_product: shared index out of range");
    }
    if (a_shared[ia] || b_shared[ib]) {
      throw std::invalid_argument("link_product: duplicate shared index");
    }
    if (adims[ia] != bdims[ib]) {
      throw std::invalid_argument("link_product: shared wires must have equal dims");
    }
    a_shared[ia] = true;
    b_shared[ib] = true;
  }

  // Reorder a to [rest_a, shared] and b to [shared, rest_b].
  std::vector<int> aperm, bperm;
  std::vector<int> ra_dims, rb_dims, s_dims;
  for (size_t i = 0; i < adims.size(); ++i) {
    if (!a_shared[i]) {
      aperm.push_back(static_cast<int>(i));
      ra_dims.push_back(adims[i]);
    }
  }
  for (auto [ia, ib] : shared) {
    aperm.push_back(ia);
    s_dims.push_back(adims[ia]);
  }
  for (auto [ia, ib] : shared) bperm.push_back(ib);
  for (size_t i = 0; i < bdims.size(); ++i) {
    if (!b_shared[i]) {
      bperm.push_back(static_cast<int>(i));
      rb_dims.push_back(bdims[i]);
    }
  }
  Matrix am = permute_systems(a.matrix().raw(), adims, aperm);
  Matrix bm = permute_systems(b.matrix().raw(), bdims, bperm);

  const int da = product(ra_dims);
  const int db = product(rb_dims);
  const int ds = product(s_dims);

  // C[(iA,jB),(i'A,j'B)] = sum_{s,s'} a[(iA,s'),(i'A,s)] b[(s',jB),(s,j'B)]
  // (contraction with the shared wires transposed on the a side).
  Matrix out = Matrix::Zero(da * db, da * db);
  for (int ia = 0; ia < da; ++ia) {
    for (int ja = 0; ja < da; ++ja) {
      for (int ib = 0; ib < db; ++ib) {
        for (int jb = 0; jb < db; ++jb) {
          Complex sum = 0.0;
          for (int s = 0; s < ds; ++s) {
            for (int sp = 0; sp < ds; ++sp) {
              sum += am(ia * ds + sp, ja * ds + s) * bm(sp * db + ib, s * db + jb);
            }
          }
          out(ia * db + ib, ja * db + jb) = sum;
        }
      }
    }
  }

  std::vector<int> out_dims = ra_dims;
  out_dims.insert(out_dims.end(), rb_dims.begin(), rb_dims.end());
  if (out_dims.empty()) out_dims.push_back(1);
  return ChoiProcess(HermitianMatrix(out), SystemLayout(out_dims), role);
}

ChoiProcess random_comb(const SystemLayout& layout, int time_steps, uint64_t seed) {
  if (layout.subsystem_count() != 2 * time_steps) {
    throw std::invalid_argument("random_comb: layout must have 2T subsystems");
  }
  const auto& dims = layout.dims();
  Rng rng(seed);

  // Step t channel: V_t ⊗ A_{t-1} -> W_t ⊗ A_t via a Haar isometry, with
  // A_t sized to the input so the isometry always exists.
  // Position bookkeeping: running process accumulates open wires
  // [W_1, V_1, W_2, V_2, ..., W_t, A_t] as steps are linked.
  ChoiProcess running = ChoiProcess(HermitianMatrix::identity(1), SystemLayout({1}));
  int anc_prev = 1;
  int anc_pos = 0;  // index of A_{t-1} wire inside running
  for (int t = 1; t <= time_steps; ++t) {
    const int nv = dims[2 * (time_steps - t) + 1];
    const int nw = dims[2 * (time_steps - t)];
    const int in = nv * anc_prev;
    const int anc = in;
    Matrix iso = rng.haar_isometry(nw * anc, in);
    ChoiProcess step = choi_from_kraus({iso}, in, nw * anc);
    // Refine [out, in] into [W_t, A_t, V_t, A_{t-1}].
    ChoiProcess step_fine(step.matrix(), SystemLayout({nw, anc, nv, anc_prev}));
    running = link_product(running, step_fine, {{anc_pos, 3}});
    // New layout: [prior wires..., W_t, A_t, V_t]; A_t sits one before last.
    anc_prev = anc;
    anc_pos = running.layout().subsystem_count() - 2;
  }

  // Trace out the final ancilla, then order as [W_T, V_T, ..., W_1, V_1].
  const int n = running.layout().subsystem_count();
  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    if (i != anc_pos) keep.push_back(i);
  }
  HermitianMatrix traced = partial_trace(running.matrix(), running.layout(), keep);

  // Kept wires, in order: [W_1, V_1, W_2, V_2, ..., W_T, V_T].
  std::vector<int> kept_dims;
  for (int i : keep) kept_dims.push_back(running.layout().dim(i));
  std::vector<int> perm;
  for (int t = time_steps; t >= 1; --t) {
    perm.push_back(2 * (t - 1));      // W_t
    perm.push_back(2 * (t - 1) + 1);  // V_t
  }
  Matrix canon = permute_systems(traced.raw(), kept_dims, perm);
  return ChoiProcess(HermitianMatrix(canon), layout);
}

ChoiProcess random_dual_comb(const SystemLayout& layout, int time_steps, uint64_t seed) {
  if (layout.subsystem_count() != 2 * time_steps) {
    throw std::invalid_argument("random_dual_comb: layout must have 2T subsystems");
  }
  const auto& dims = layout.dims();
  Rng rng(seed);
  const int nv1 = dims[2 * time_steps - 1];

  if (time_steps == 1) {
    HermitianMatrix rho = rng.random_density(nv1);
    Matrix sigma = kron(Matrix::Identity(dims[0], dims[0]), rho.raw());
    return ChoiProcess(HermitianMatrix(sigma), layout, ProcessRole::comb_candidate);
  }

  // State on [V_1, A_1], then channels W_{t-1} ⊗ A_{t-1} -> V_t ⊗ A_t.
  int anc = nv1;
  ChoiProcess running(rng.random_density(nv1 * anc), SystemLayout({nv1, anc}));
  int anc_pos = 1;
  for (int t = 2; t <= time_steps; ++t) {
    const int nv = dims[2 * (time_steps - t) + 1];
    const int nw_prev = dims[2 * (time_steps - t) + 2];
    const int in = nw_prev * anc;
    const int anc_next = in;
    Matrix iso = rng.haar_isometry(nv * anc_next, in);
    ChoiProcess step = choi_from_kraus({iso}, in, nv * anc_next);
    ChoiProcess step_fine(step.matrix(), SystemLayout({nv, anc_next, nw_prev, anc}));
    running = link_product(running, step_fine, {{anc_pos, 3}});
    anc = anc_next;
    anc_pos = running.layout().subsystem_count() - 2;
  }

  // Trace the last ancilla; collect tau^(T) and prepend I_{W_T}.
  const int n = running.layout().subsystem_count();
  std::vector<int> keep;
  for (int i = 0; i < n; ++i) {
    if (i != anc_pos) keep.push_back(i);
  }
  HermitianMatrix traced = partial_trace(running.matrix(), running.layout(), keep);
  std::vector<int> kept_dims;
  for (int i : keep) kept_dims.push_back(running.layout().dim(i));

  // Kept wires in order: [V_1, V_2, W_1, V_3, W_2, ..., V_T, W_{T-1}], i.e.
  // V_1 at 0, V_t at 2t-3 (t >= 2), W_t at 2t. Reorder to
  // [V_T, W_{T-1}, V_{T-1}, ..., W_1, V_1].
  std::vector<int> perm;
  perm.push_back(2 * time_steps - 3);  // V_T
  for (int t = time_steps - 1; t >= 1; --t) {
    perm.push_back(2 * t);                  // W_t
    perm.push_back(t >= 2 ? 2 * t - 3 : 0);  // V_t
  }
  Matrix tau = permute_systems(traced.raw(), kept_dims, perm);
  Matrix sigma = kron(Matrix::Identity(dims[0], dims[0]), tau);
  return ChoiProcess(HermitianMatrix(sigma), layout, ProcessRole::comb_candidate);
}

}  // namespace qpd
