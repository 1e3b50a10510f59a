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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qpd/process.hpp"

namespace qpd {

class Tester;

enum class StrategyVariant {
  Global,
  FixedInput,
  SeparableInput,
  Nonadaptive,
  SequentialTwoStep,
  OneWayAB,
  MaxEntangled,
  Custom
};

std::string to_string(StrategyVariant v);

/// Violating cone element found by a separation oracle: elements on the full
/// layout with sum_m <phi_m, deficit_m> = violation < 0. `identity_pairing`
/// is sum_m Tr(phi_m), used to renormalize feasibility restorations.
struct ConeViolator {
  std::vector<HermitianMatrix> phi;
  double violation = 0.0;
  double identity_pairing = 0.0;
};

/// Description of a custom sum-constraint set S: a singleton, a finite
/// convex hull, or the full dual-comb set.
struct CustomSumSet {
  enum class Kind { DualCombSet, Singleton, FiniteHull };
  Kind kind = Kind::DualCombSet;
  std::optional<HermitianMatrix> singleton;
  std::vector<HermitianMatrix> hull;
};

struct CustomOracles {
  CustomSumSet sum_set;
  /// Membership test for the cone C (per element list).
  std::function<bool(const std::vector<HermitianMatrix>&, double)> cone_membership;
  /// Separation over C given the deficit list; empty optional = no violation.
  std::function<std::optional<ConeViolator>(const std::vector<HermitianMatrix>&, double)>
      separation;
  /// Sampler; may be null (then sample_tester errors).
  std::function<Tester(const SystemLayout&, int, int, uint64_t)> sampler;
};

/// One of the tester families: a closed convex cone C of element lists
/// together with a sum-constraint set S.
class StrategyClass {
 public:
  static StrategyClass global();
  static StrategyClass fixed_input(const Vector& phi);
  static StrategyClass separable_input();
  static StrategyClass nonadaptive();
  static StrategyClass sequential_two_step(int default_branching = 8);
  static StrategyClass one_way_ab();
  static StrategyClass max_entangled();
  static StrategyClass custom(CustomOracles oracles);

  StrategyVariant variant() const { return variant_; }
  /// FixedInput payload: the input pure state on V_1.
  const Vector& fixed_state() const;
  int default_branching() const { return branching_; }
  /// Dual optima for this class only upper-bound the primal optimum.
  bool dual_is_upper_bound() const { return variant_ == StrategyVariant::OneWayAB; }
  const CustomOracles& oracles() const;

 private:
  explicit StrategyClass(StrategyVariant v) : variant_(v) {}
  StrategyVariant variant_;
  Vector fixed_state_;
  int branching_ = 8;
  std::shared_ptr<CustomOracles> oracles_;
};

/// Decomposition payload carried by sequential testers:
/// Phi_m = sum_j B[j][m] ⊗ A[j] with {A_j} a tester on (W_1, V_1) and each
/// {B[j][m]}_m a tester on (W_2, V_2).
struct SequentialParts {
  std::vector<HermitianMatrix> a;
  std::vector<std::vector<HermitianMatrix>> b;  // b[j][m]
};

/// Decomposition payload for one-way A-to-B testers:
/// Phi_m = swap(sum_i sigma[i] ⊗ A[i][m]) with sigma[i] proportional to the
/// Choi matrix of a channel W_1 -> V_2 and A[i][m] PSD on (W_2, V_1).
struct OneWayParts {
  std::vector<HermitianMatrix> sigma;
  std::vector<std::vector<HermitianMatrix>> a;  // a[i][m]
};

/// An M-outcome tester: PSD elements on a common layout whose sum is a
/// dual comb (or the class's tighter sum constraint).
class Tester {
 public:
  Tester(std::vector<ChoiProcess> elements, StrategyClass cls);

  int outcomes() const { return static_cast<int>(elements_.size()); }
  const ChoiProcess& element(int m) const { return elements_.at(m); }
  const std::vector<ChoiProcess>& elements() const { return elements_; }
  const StrategyClass& strategy() const { return class_; }
  const SystemLayout& layout() const { return elements_.front().layout(); }

  HermitianMatrix sum() const;

  void set_sequential_parts(SequentialParts parts) { seq_parts_ = std::move(parts); }
  const std::optional<SequentialParts>& sequential_parts() const { return seq_parts_; }
  void set_one_way_parts(OneWayParts parts) { oneway_parts_ = std::move(parts); }
  const std::optional<OneWayParts>& one_way_parts() const { return oneway_parts_; }

 private:
  std::vector<ChoiProcess> elements_;
  StrategyClass class_;
  std::optional<SequentialParts> seq_parts_;
  std::optional<OneWayParts> oneway_parts_;
};

struct ValidationReport {
  bool ok = false;
  std::string diagnostics;
};

/// True iff every element lies in the class cone C and the sum lies in S,
/// both within tol; diagnostics name the first violated constraint.
ValidationReport validate_tester(const Tester& t, const StrategyClass& c, double tol = 1e-8);

/// Random tester of the class on the given layout; deterministic in seed.
Tester sample_tester(const StrategyClass& c, const SystemLayout& layout, int time_steps,
                     int outcomes, uint64_t seed, int branching = 0);

struct SeparationOptions {
  double tol = 1e-6;
  int restarts = 12;
  int max_iterations = 60;
  uint64_t seed = 0x7a31;
  double conic_tol = 1e-9;
};

/// Search for a cone element certifying sum_m <phi_m, deficit_m> < -tol.
/// Exact for classes whose cone is the full PSD product; seesaw-based for
/// SequentialTwoStep and OneWayAB.
std::optional<ConeViolator> cone_separation(const StrategyClass& c,
                                            const std::vector<HermitianMatrix>& deficit,
                                            const SystemLayout& layout, int time_steps,
                                            const SeparationOptions& opt = {});

// Rich separation results used by the cutting-plane solver: the violating
// sub-tester (sequential) or channel Choi (one-way), from which matrix
// cuts are formed.
struct SequentialCut {
  std::vector<HermitianMatrix> b;  // tester on (W_2, V_2)
  double violation = 0.0;          // min eigenvalue of the contracted deficit
};
struct OneWayCut {
  HermitianMatrix sigma = HermitianMatrix::zero(1);  // channel Choi on (V_2, W_1)
  double violation = 0.0;
  int outcome = 0;  // which m certifies the violation
};

std::optional<SequentialCut> sequential_separation(
    const std::vector<HermitianMatrix>& deficit, const SystemLayout& layout,
    const SeparationOptions& opt,
    const std::vector<std::vector<HermitianMatrix>>& warm_sub_testers = {});
std::optional<OneWayCut> one_way_separation(const std::vector<HermitianMatrix>& deficit,
                                            const SystemLayout& layout,
                                            const SeparationOptions& opt,
                                            const std::vector<HermitianMatrix>& warm_channels = {});

/// Contract a two-step deficit against a (W_2, V_2) tester:
/// sum_m Tr_{W2 V2}[(B_m ⊗ I)(deficit_m)], a matrix on (W_1, V_1).
HermitianMatrix contract_upper_tester(const std::vector<HermitianMatrix>& b,
                                      const std::vector<HermitianMatrix>& deficit,
                                      const SystemLayout& layout);

/// Contract one two-step deficit element against a channel Choi sigma on
/// (V_2, W_1): Tr_{V2 W1}[(sigma ⊗ I)(swapped deficit_m)], on (W_2, V_1).
HermitianMatrix contract_oneway_channel(const HermitianMatrix& sigma,
                                        const HermitianMatrix& deficit_m,
                                        const SystemLayout& layout);

/// Tester on (W, V) whose elements are I_W ⊗ I_V / (M N_V); the
/// "guess uniformly, learn nothing" strategy.
std::vector<HermitianMatrix> uniform_sub_tester(int nw, int nv, int outcomes);

/// Exact single-step tester optimization: optimize sum_m <B_m, h_m> over
/// {B_m >= 0, sum_m B_m = I_W ⊗ rho, rho a density on V}.
std::pair<double, std::vector<HermitianMatrix>> optimize_sub_tester(
    const std::vector<HermitianMatrix>& h, int nw, int nv, bool maximize,
    double conic_tol = 1e-9);

}  // namespace qpd
