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

#include <utility>
#include <vector>

#include "qpd/hermitian.hpp"
#include "qpd/rng.hpp"

namespace qpd {

enum class ProcessRole { comb_candidate, tester_element, dual_variable };

struct CombTolerances {
  double residual = 1e-8;  // absolute, per recursion level
  double psd = 1e-9;       // relative, scaled by (1 + ||m||_F)
};

/// Choi matrix together with the subsystem layout that gives its partial
/// traces meaning. tester_element and comb_candidate roles must be PSD.
class ChoiProcess {
 public:
  ChoiProcess(HermitianMatrix matrix, SystemLayout layout,
              ProcessRole role = ProcessRole::comb_candidate,
              double psd_tol = 1e-9);

  const HermitianMatrix& matrix() const { return matrix_; }
  const SystemLayout& layout() const { return layout_; }
  ProcessRole role() const { return role_; }
  int dim() const { return matrix_.dim(); }

 private:
  HermitianMatrix matrix_;
  SystemLayout layout_;
  ProcessRole role_;
};

/// Chain tau^(1) ... tau^(T) recovered while checking the comb recursion
/// Tr_{W_t} tau^(t) = I_{V_t} ⊗ tau^(t-1), plus the worst residual seen.
struct CombWitness {
  std::vector<HermitianMatrix> chain;
  double residual = 0.0;
};

/// Ensemble {(p_m, E_m)} of combs on a common layout with T time steps.
class DiscriminationInstance {
 public:
  DiscriminationInstance(std::vector<ChoiProcess> combs, std::vector<double> priors,
                         int time_steps, CombTolerances tol = {});

  int count() const { return static_cast<int>(combs_.size()); }
  int time_steps() const { return time_steps_; }
  const std::vector<ChoiProcess>& combs() const { return combs_; }
  const ChoiProcess& comb(int m) const { return combs_.at(m); }
  double prior(int m) const { return priors_.at(m); }
  const std::vector<double>& priors() const { return priors_; }
  const SystemLayout& layout() const { return combs_.front().layout(); }

  /// p_m * E_m
  HermitianMatrix weighted(int m) const { return combs_.at(m).matrix() * priors_.at(m); }

  /// Dimensions N_{V_t}, t = 1..T (rightmost pair first).
  std::vector<int> input_dims() const;
  /// Product of the N_{V_t}; the trace of every comb on this layout.
  double input_dim_product() const;

 private:
  std::vector<ChoiProcess> combs_;
  std::vector<double> priors_;
  int time_steps_;
};

/// Choi matrix sum_k (K_k ⊗ I)|I⟩⟩⟨⟨I|(K_k ⊗ I)† on layout [out, in].
ChoiProcess choi_from_kraus(const std::vector<Matrix>& kraus, int in_dim, int out_dim,
                            ProcessRole role = ProcessRole::comb_candidate);

/// Membership in Comb_{W_T,...,V_1}: PSD plus the trace-out recursion. The
/// witness chain is recovered deterministically as the normalized partial
/// trace at each level.
std::pair<bool, CombWitness> is_comb(const ChoiProcess& p, int time_steps,
                                     CombTolerances tol = {});

/// Membership in the dual set: p = I_{W_T} ⊗ tau^(T) with
/// Tr_{V_t} tau^(t) = I_{W_{t-1}} ⊗ tau^(t-1) down to a density on V_1.
bool is_dual_comb(const ChoiProcess& p, int time_steps, CombTolerances tol = {});

/// Link product: contract `a` and `b` along the listed wire pairs
/// (index in a.layout, index in b.layout), transposing the shared wires on
/// the `a` side. Output layout: a's remaining systems then b's.
ChoiProcess link_product(const ChoiProcess& a, const ChoiProcess& b,
                         const std::vector<std::pair<int, int>>& shared,
                         ProcessRole role = ProcessRole::comb_candidate);

/// Haar-random comb: T random isometry channels threaded through ancillas.
/// Deterministic for a fixed seed; passes is_comb by construction.
ChoiProcess random_comb(const SystemLayout& layout, int time_steps, uint64_t seed);

/// Random element of the dual set (a tester with its outcomes summed).
ChoiProcess random_dual_comb(const SystemLayout& layout, int time_steps, uint64_t seed);

}  // namespace qpd
