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

#include <optional>
#include <string>
#include <vector>

#include "qpd/dual.hpp"
#include "qpd/process.hpp"

namespace qpd {

/// Finite group acting on an ensemble by local unitary conjugation
/// (one unitary per wire, per element) together with an outcome
/// permutation. Unitary representations may be projective: the composition
/// law is only required up to a phase.
class GroupAction {
 public:
  /// elements are indexed 0..n-1; composition[g][h] = g*h; unitaries[g][s]
  /// acts on wire s of the layout; outcome_action[g] permutes outcomes.
  GroupAction(std::vector<std::vector<int>> composition,
              std::vector<std::vector<Matrix>> unitaries,
              std::vector<std::vector<int>> outcome_action, const SystemLayout& layout);

  int order() const { return static_cast<int>(composition_.size()); }
  int compose(int g, int h) const { return composition_[g][h]; }
  int inverse(int g) const { return inverse_[g]; }
  /// Full-space unitary of element g (tensor over wires).
  const Matrix& unitary(int g) const { return full_unitaries_[g]; }
  /// Wire-local unitary of element g on subsystem s.
  const Matrix& wire_unitary(int g, int s) const { return unitaries_[g][s]; }
  int outcome(int g, int m) const { return outcome_action_[g][m]; }
  int outcome_count() const { return static_cast<int>(outcome_action_.front().size()); }

  /// Conjugation U_g rho U_g†.
  HermitianMatrix apply(int g, const HermitianMatrix& rho) const;

 private:
  std::vector<std::vector<int>> composition_;
  std::vector<int> inverse_;
  std::vector<std::vector<Matrix>> unitaries_;
  std::vector<Matrix> full_unitaries_;
  std::vector<std::vector<int>> outcome_action_;
};

/// True iff conjugating each comb by U_g permutes the ensemble according to
/// the group's outcome action, for every element.
bool check_covariance(const DiscriminationInstance& inst, const GroupAction& action,
                      double tol = 1e-9);

/// Group average (1/|G|) sum_g U_g(chi). For covariant instances this stays
/// feasible and does not increase the sum-set value when S is closed under
/// the action.
HermitianMatrix symmetrize_dual(const HermitianMatrix& chi, const GroupAction& action);

/// True iff the commutant of the wire-s representation is one-dimensional
/// (Schur test via the joint null space of the commutator system).
bool check_irreducibility(const GroupAction& action, int wire);

struct MaxEntVerdict {
  bool ok = false;
  std::string explanation;
};

/// Hypotheses under which a maximally entangled tester attains the
/// unrestricted optimum: per time step, a covariant group action whose
/// input-wire representation is irreducible (and which acts trivially on
/// the other steps).
MaxEntVerdict assert_maxent_optimal(const DiscriminationInstance& inst,
                                    const std::vector<GroupAction>& per_step_actions);

struct GlobalOptimality {
  bool globally_optimal = false;
  int condition = 0;  // 3 or 4 when globally_optimal
  std::string explanation;
};

/// Tests whether a class-restricted dual certificate also certifies the
/// unrestricted optimum: either (3) chi is feasible for every strategy and
/// proportional to a comb, or (4) chi is feasible for every strategy and
/// its sum-set value equals the dual-comb-set value.
GlobalOptimality check_global_optimality(const DualCertificate& cert,
                                         const DiscriminationInstance& inst,
                                         const StrategyClass& cls, double tol = 1e-6);

struct MaxMinReport {
  bool equality = false;
  double lhs = 0.0;  // best fixed-input dual value over pure inputs
  double rhs = 0.0;  // unrestricted dual value
};

struct MaxMinOptions {
  double tol = 1e-5;
  double grid_degrees = 3.0;  // initial Bloch grid spacing (qubit inputs)
  int refinement_rounds = 4;
  uint64_t seed = 0xb10c;
};

/// Single-use instances: compares max over pure inputs of the fixed-input
/// dual value against the unrestricted dual value.
MaxMinReport check_separable_maxmin(const DiscriminationInstance& inst,
                                    const MaxMinOptions& opt = {});

}  // namespace qpd
