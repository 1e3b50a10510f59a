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

#include "qpd/conic.hpp"
#include "qpd/strategy.hpp"

namespace qpd {

/// Certified feasible point of the minimization over the dual cone: the
/// variable chi, its achieved objective D_S(chi), and, when available, the
/// factorization chi = lambda * tau with tau a comb.
struct DualCertificate {
  HermitianMatrix chi;
  SystemLayout layout;
  int time_steps = 1;
  double value = 0.0;
  StrategyVariant class_variant = StrategyVariant::Global;
  enum class BoundKind { exact, upper };
  BoundKind bound_kind = BoundKind::exact;
  std::optional<std::pair<double, ChoiProcess>> comb_factor;

  // Solver telemetry.
  int iterations = 0;
  int cuts = 0;
  double residual = 0.0;
  double lower_bracket = 0.0;  // restricted-master value at termination
  double upper_bracket = 0.0;  // best feasibility-restored objective

  DualCertificate(HermitianMatrix chi_, SystemLayout layout_)
      : chi(std::move(chi_)), layout(std::move(layout_)) {}
};

/// D_S(chi) = max over sigma in S of <sigma, chi>, evaluated exactly:
/// singletons by pairing, finite hulls by enumeration, the dual-comb set by
/// a chain-constrained maximization, the nonadaptive slice by a top
/// eigenvalue.
double evaluate_D_S(const StrategyClass& cls, const HermitianMatrix& chi,
                    const SystemLayout& layout, int time_steps,
                    const ConicOptions& opt = {});

/// Maximum of <sigma, chi> over the dual-comb set on the given layout.
double dual_comb_set_value(const HermitianMatrix& chi, const SystemLayout& layout, int time_steps,
                           const ConicOptions& opt = {});

struct DualOptions {
  double tol = 1e-7;            // relative objective tolerance
  double violation_tol = 1e-6;  // cutting-plane stopping threshold
  int max_cuts = 500;
  int restarts = 12;            // separation seesaw restarts
  uint64_t seed = 0x5eed;
  bool trace = false;
};

/// Unrestricted-strategy dual: minimize lambda over lambda * tau >= p_m E_m
/// with tau a comb. The certificate carries chi = lambda * tau, so it is
/// proportional to a comb by construction.
DualCertificate solve_global_dual(const DiscriminationInstance& inst,
                                  const DualOptions& opt = {});

/// Cutting-plane solver for classes whose dual cone has infinitely many
/// PSD constraints indexed by sub-testers (SequentialTwoStep, OneWayAB).
/// Also accepts the PSD-product classes, for which the index set is the
/// finite outcome set.
DualCertificate solve_semi_infinite(const DiscriminationInstance& inst, const StrategyClass& cls,
                                    const DualOptions& opt = {});

/// Dispatch on the strategy class: exact conic reformulations for Global,
/// FixedInput, Nonadaptive and MaxEntangled; cutting plane for
/// SequentialTwoStep and OneWayAB.
DualCertificate solve_dual(const DiscriminationInstance& inst, const StrategyClass& cls,
                           const DualOptions& opt = {});

/// Re-run the feasibility and objective checks on a stored certificate.
struct CertificateReplay {
  bool feasible = false;
  bool value_matches = false;
  double worst_violation = 0.0;
  double recomputed_value = 0.0;
};
CertificateReplay verify_certificate(const DualCertificate& cert,
                                     const DiscriminationInstance& inst, const StrategyClass& cls,
                                     double tol = 1e-6);

}  // namespace qpd
