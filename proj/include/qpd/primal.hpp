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

enum class PrimalMethod { exact, seesaw, grid };

/// Feasible strategy together with its achieved success probability.
struct PrimalResult {
  double value = 0.0;
  std::optional<Tester> tester;
  PrimalMethod method = PrimalMethod::exact;
  int restarts_used = 0;
  /// True when `value` is the class optimum rather than a lower bound.
  bool certified_optimal = false;
};

/// sum_m p_m <Phi_m, E_m>.
double success_probability(const DiscriminationInstance& inst, const Tester& t);

/// Closed-form two-state discrimination: value and the optimal two-outcome
/// measurement (positive/negative eigenspace projectors of p1 rho1 - p2 rho2).
std::pair<double, std::vector<HermitianMatrix>> helstrom_two_state(double p1,
                                                                   const HermitianMatrix& rho1,
                                                                   double p2,
                                                                   const HermitianMatrix& rho2);

/// Unrestricted optimum: maximize over all testers. Exact (conic solve on
/// the tester polytope); the returned tester attains the value.
PrimalResult optimize_global(const DiscriminationInstance& inst, const ConicOptions& opt = {});

/// Exact optimum over measurements for a fixed pure input (single use):
/// two hypotheses via the closed form, more via the measurement conic solve.
PrimalResult optimize_fixed_input(const DiscriminationInstance& inst, const Vector& phi,
                                  const ConicOptions& opt = {});

struct SeparableSearchOptions {
  double grid_degrees = 3.0;  // exhaustive Bloch grid for qubit inputs
  int refinement_rounds = 5;
  int starts = 24;  // multi-start ascent for larger inputs
  uint64_t seed = 0x5e9a;
};

/// Best fixed-input value over pure product inputs. Exact (up to the grid
/// pitch) for qubit inputs; a lower bound otherwise.
PrimalResult optimize_separable_input(const DiscriminationInstance& inst,
                                      const SeparableSearchOptions& opt = {});

struct SeesawOptions {
  int branching = 8;  // number of first-step outcomes carried
  int restarts = 32;
  int max_iterations = 200;
  double stall_tol = 1e-9;  // stop when three rounds gain less than this
  uint64_t seed = 0xca11;
  double conic_tol = 1e-9;
  std::vector<double>* objective_trace = nullptr;  // appended per iteration
};

/// Alternating optimization over sequential testers (two-step instances):
/// exact measurement optimization on each side, monotone objective, best
/// value over restarts. Lower-bounds the sequential-class optimum.
PrimalResult seesaw_sequential(const DiscriminationInstance& inst, const SeesawOptions& opt = {});

}  // namespace qpd
