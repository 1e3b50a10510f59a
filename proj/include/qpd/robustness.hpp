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
#include <variant>

#include "qpd/dual.hpp"

namespace qpd {

// Generalized robustness R of a target against a cone K relative to a free
// set F: the least mixing weight lambda with (1+lambda) Z - target in K for
// some Z in F. Discrimination optima equal (1 + R)/M for the matched
// descriptors below.

/// F = { I_A ⊗ chi' : D_S(chi') = 1/M } for a strategy class's sum set.
struct DiscriminationFreeSet {
  StrategyClass strategy;
  SystemLayout process_layout;  // layout of chi' (without the label wire)
  int time_steps = 1;
  int outcomes = 2;  // M
};

/// F given by finitely many generators (their convex hull).
struct FiniteFreeSet {
  std::vector<HermitianMatrix> generators;
};

/// K = { Y : sum_m <|m><m| ⊗ Phi_m, Y> >= 0 for all Phi in C } with C the
/// PSD product cone; membership is then blockwise PSD on the label wire.
struct DiscriminationCone {
  int outcomes = 2;
};

/// K is the PSD cone of the target's space.
struct PsdCone {};

/// K generated by finitely many rays (an inner approximation).
struct FiniteCone {
  std::vector<HermitianMatrix> generators;
};

struct RobustnessProblem {
  HermitianMatrix target;
  std::variant<DiscriminationFreeSet, FiniteFreeSet> free_set;
  std::variant<PsdCone, DiscriminationCone, FiniteCone> cone;

  RobustnessProblem(HermitianMatrix target_, std::variant<DiscriminationFreeSet, FiniteFreeSet> f,
                    std::variant<PsdCone, DiscriminationCone, FiniteCone> k)
      : target(std::move(target_)), free_set(std::move(f)), cone(std::move(k)) {}
};

/// Block-diagonal extension sum_m p_m |m><m| ⊗ E_m on the label ⊗ process
/// space.
HermitianMatrix build_extended_process(const DiscriminationInstance& inst);

/// The matched robustness problem whose value encodes the class optimum.
RobustnessProblem discrimination_robustness_problem(const DiscriminationInstance& inst,
                                                    const StrategyClass& cls);

/// R = M * (class dual value) - 1.
double robustness_from_value(const DiscriminationInstance& inst, const StrategyClass& cls,
                             const DualOptions& opt = {});

struct RobustnessResult {
  double value = 0.0;
  bool upper_bound = false;  // true when K is a finitely generated inner approximation
};

/// Conic evaluation of the mixing form: minimize lambda with
/// (1+lambda) Z - target in K, Z in F.
RobustnessResult robustness_direct(const RobustnessProblem& p, const ConicOptions& opt = {});

/// Dual value: maximize <phi, target> over phi in K* with <phi, Z> <= 1 on
/// F. Exact for PSD K with finite-hull F; otherwise the best ratio over a
/// supplied generator family of K* (a lower bound on 1 + R).
double robustness_dual_bound(const RobustnessProblem& p,
                             const std::vector<HermitianMatrix>& k_star_family = {},
                             const ConicOptions& opt = {});

/// sup over the family of <phi, target> / max_{Z in F} <phi, Z>; never
/// exceeds 1 + R, with equality when the family contains a maximizer.
double advantage_ratio(const RobustnessProblem& p,
                       const std::vector<HermitianMatrix>& family);

/// max_{Z in F} <phi, Z>; +inf when unbounded over the slice.
double free_set_support(const RobustnessProblem& p, const HermitianMatrix& phi);

}  // namespace qpd
