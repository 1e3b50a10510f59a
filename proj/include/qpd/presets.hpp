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

#include "qpd/certify.hpp"
#include "qpd/process.hpp"

namespace qpd {

// The bundled reference problem: three qubit unitary channels
// rho -> U^m rho U^-m with U = diag(1, w), w = exp(2 pi i / 3), each used
// twice, equal priors. Sequential strategies cannot reach the unrestricted
// optimum on it, which makes it the canonical regression target.

/// Choi matrix of the m-th phase channel on (W, V).
HermitianMatrix phase_trine_lambda(int m);

/// The full two-use ensemble {Lambda_m ⊗ Lambda_m} with equal priors.
DiscriminationInstance phase_trine_instance();

/// Cyclic symmetry of the ensemble: U^k on both output wires, shifting the
/// outcome index by k.
GroupAction phase_trine_symmetry();

/// The explicit perfect-discrimination network: a Bell input state and the
/// intermediate unitary that orthogonalizes the three reachable states.
HermitianMatrix phase_trine_bell_state();
Matrix phase_trine_middle_unitary();

/// Output states of the network under the three channels, obtained by
/// linking state, first use, middle unitary, and second use.
std::vector<HermitianMatrix> phase_trine_network_states();

}  // namespace qpd
