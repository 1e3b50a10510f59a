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

#include "qpd/certify.hpp"

#include <cmath>

namespace qpd {

GroupAction::GroupAction(std::vector<std::vector<int>> composition,
                         std::vector<std::vector<Matrix>> unitaries,
                         std::vector<std::vector<int>> outcome_action,
                         const SystemLayout& layout)
    : composition_(std::move(composition)),
      unitaries_(std::move(unitaries)),
      outcome_action_(std::move(outcome_action)) {
  const int n = static_cast<int>(composition_.size());
  if (n == 0) throw std::invalid_argument("GroupAction: empty group");
  if (static_cast<int>(unitaries_.size()) != n || static_cast<int>(outcome_action_.size()) != n) {
    throw std::invalid_argument("GroupAction: table sizes disagree");
  }

  // Identify the identity element and verify the group axioms.
  int identity = -1;
  for (int e = 0; e < n; ++e) {
    bool ok = true;
    for (int h = 0; h < n; ++h) ok = ok && composition_[e][h] == h && composition_[h][e] == h;
    if (ok) {
      identity = e;
      break;
    }
  }
  if (identity < 0) throw std::invalid_argument("GroupAction: no identity element");
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h) {
      for (int k = 0; k < n; ++k) {
        if (composition_[composition_[g][h]][k] != composition_[g][composition_[h][k]]) {
          throw std::invalid_argument("GroupAction: composition is not associative");
        }
      }
    }
  }
  inverse_.assign(n, -1);
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h) {
      if (composition_[g][h] == identity) inverse_[g] = h;
    }
    if (inverse_[g] < 0) throw std::invalid_argument("GroupAction: missing inverse");
  }

  // Outcome action must be a homomorphism with identity at e.
  const int m_count = static_cast<int>(outcome_action_.front().size());
  for (int m = 0; m < m_count; ++m) {
    if (outcome_action_[identity][m] != m) {
      throw std::invalid_argument("GroupAction: outcome action not trivial at identity");
    }
  }
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h) {
      for (int m = 0; m < m_count; ++m) {
        if (outcome_action_[composition_[g][h]][m] != outcome_action_[g][outcome_action_[h][m]]) {
          throw std::invalid_argument("GroupAction: outcome action is not a homomorphism");
        }
      }
    }
  }

  // Wire shapes, unitarity, and the projective composition law.
  const int wires = layout.subsystem_count();
  for (int g = 0; g < n; ++g) {
    if (static_cast<int>(unitaries_[g].size()) != wires) {
      throw std::invalid_argument("GroupAction: wrong wire count");
    }
    Matrix full = Matrix::Identity(1, 1);
    for (int s = 0; s < wires; ++s) {
      const Matrix& u = unitaries_[g][s];
      if (u.rows() != layout.dim(s) || u.cols() != layout.dim(s)) {
        throw std::invalid_argument("GroupAction: unitary dim mismatch on wire " +
                                    std::to_string(s));
      }
      if ((u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm() > 1e-9 * u.rows()) {
        throw std::invalid_argument("GroupAction: matrix is not unitary");
      }
      full = kron(full, u);
    }
    full_unitaries_.push_back(full);
  }
  const int d = static_cast<int>(full_unitaries_.front().rows());
  for (int g = 0; g < n; ++g) {
    for (int h = 0; h < n; ++h) {
      const Complex overlap =
          (full_unitaries_[composition_[g][h]].adjoint() * full_unitaries_[g] * full_unitaries_[h])
              .trace();
      if (std::abs(std::abs(overlap) - d) > 1e-9 * d) {
        throw std::invalid_argument("GroupAction: projective composition law fails");
      }
    }
  }
}

HermitianMatrix GroupAction::apply(int g, const HermitianMatrix& rho) const {
  const Matrix& u = full_unitaries_.at(g);
  return HermitianMatrix(u * rho.raw() * u.adjoint());
}

bool check_covariance(const DiscriminationInstance& inst, const GroupAction& action, double tol) {
  if (action.outcome_count() != inst.count()) {
    throw std::invalid_argument("check_covariance: outcome count mismatch");
  }
  if (action.unitary(0).rows() != inst.layout().total_dim()) {
    throw std::invalid_argument("check_covariance: unitary dimension mismatch");
  }
  for (int g = 0; g < action.order(); ++g) {
    for (int m = 0; m < inst.count(); ++m) {
      HermitianMatrix moved = action.apply(g, inst.comb(m).matrix());
      const HermitianMatrix& target = inst.comb(action.outcome(g, m)).matrix();
      if ((moved.raw() - target.raw()).norm() > tol * (1.0 + target.frobenius_norm())) {
        return false;
      }
    }
  }
  return true;
}

HermitianMatrix symmetrize_dual(const HermitianMatrix& chi, const GroupAction& action) {
  Matrix acc = Matrix::Zero(chi.dim(), chi.dim());
  for (int g = 0; g < action.order(); ++g) acc += action.apply(g, chi).raw();
  return HermitianMatrix(acc / action.order());
}

bool check_irreducibility(const GroupAction& action, int wire) {
  const Matrix& probe = action.wire_unitary(0, wire);
  const int d = static_cast<int>(probe.rows());
  const int n2 = d * d;
  // Commutant system: (I ⊗ U_g - U_g^T ⊗ I) vec(X) = 0 for every g.
  Matrix stacked(n2 * action.order(), n2);
  for (int g = 0; g < action.order(); ++g) {
    const Matrix& u = action.wire_unitary(g, wire);
    stacked.block(g * n2, 0, n2, n2) =
        kron(Matrix::Identity(d, d), u) - kron(u.transpose().eval(), Matrix::Identity(d, d));
  }
  Eigen::JacobiSVD<Matrix> svd(stacked);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-9 * (1.0 + sv.maxCoeff());
  int nullity = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) <= cutoff) ++nullity;
  }
  nullity += n2 - static_cast<int>(sv.size());
  return nullity == 1;
}

MaxEntVerdict assert_maxent_optimal(const DiscriminationInstance& inst,
                                    const std::vector<GroupAction>& per_step_actions) {
  MaxEntVerdict verdict;
  if (static_cast<int>(per_step_actions.size()) != inst.time_steps()) {
    verdict.explanation = "need one group action per time step";
    return verdict;
  }
  const SystemLayout& layout = inst.layout();
  for (int k = 0; k < inst.time_steps(); ++k) {
    const GroupAction& action = per_step_actions[k];
    // The action must touch only step k's wires.
    for (int g = 0; g < action.order(); ++g) {
      for (int s = 0; s < layout.subsystem_count(); ++s) {
        if (s == 2 * k || s == 2 * k + 1) continue;
        const Matrix& u = action.wire_unitary(g, s);
        const Complex tr = u.trace();
        if (std::abs(std::abs(tr) - u.rows()) > 1e-9 * u.rows()) {
          verdict.explanation = "step " + std::to_string(k) +
                                " action is not trivial on other wires";
          return verdict;
        }
      }
    }
    if (!check_covariance(inst, action)) {
      verdict.explanation = "ensemble is not covariant under the step-" + std::to_string(k) +
                            " action";
      return verdict;
    }
    if (!check_irreducibility(action, 2 * k + 1)) {
      verdict.explanation = "V_t representation reducible at step " + std::to_string(k);
      return verdict;
    }
  }
  verdict.ok = true;
  verdict.explanation = "covariant with irreducible input-wire representations";
  return verdict;
}

GlobalOptimality check_global_optimality(const DualCertificate& cert,
                                         const DiscriminationInstance& inst,
                                         const StrategyClass& cls, double tol) {
  GlobalOptimality result;

  // Membership in the unrestricted dual cone: chi >= p_m E_m for every m.
  double worst = 0.0;
  for (int m = 0; m < inst.count(); ++m) {
    HermitianMatrix deficit = cert.chi - inst.weighted(m);
    worst = std::min(worst, min_eigenvalue(deficit) / (1.0 + deficit.frobenius_norm()));
  }
  if (worst < -tol) {
    result.explanation = "chi is not feasible for unrestricted strategies (violation " +
                         std::to_string(worst) + ")";
    return result;
  }

  // Condition (3): chi proportional to a comb.
  const double lambda = cert.value;
  bool comb_proportional = false;
  if (lambda <= 1e-12) {
    comb_proportional = true;  // chi ~ 0 is trivially proportional
  } else {
    HermitianMatrix tau = cert.chi * (1.0 / lambda);
    CombTolerances ct{std::max(1e-8, tol) * (1.0 + tau.frobenius_norm()), 1e-7};
    auto [ok, witness] = is_comb(ChoiProcess(tau, cert.layout, ProcessRole::dual_variable),
                                 cert.time_steps, ct);
    comb_proportional = ok;
  }
  if (comb_proportional) {
    result.globally_optimal = true;
    result.condition = 3;
    result.explanation = "chi is feasible for unrestricted strategies and proportional to a comb";
    return result;
  }

  // Condition (4): the class sum-set value agrees with the dual-comb value.
  const double d_s = evaluate_D_S(cls, cert.chi, cert.layout, cert.time_steps);
  const double d_sg = dual_comb_set_value(cert.chi, cert.layout, cert.time_steps);
  if (std::abs(d_s - d_sg) <= tol * (1.0 + std::abs(d_sg))) {
    result.globally_optimal = true;
    result.condition = 4;
    result.explanation = "sum-set value matches the dual-comb value";
    return result;
  }
  result.explanation = "feasible but neither comb-proportional nor value-matching (D_S " +
                       std::to_string(d_s) + " vs " + std::to_string(d_sg) + ")";
  return result;
}

namespace {

Vector bloch_state(double theta, double phi) {
  Vector v(2);
  v(0) = std::cos(theta / 2.0);
  v(1) = std::exp(Complex(0.0, phi)) * std::sin(theta / 2.0);
  return v;
}

double fixed_input_dual_value(const DiscriminationInstance& inst, const Vector& phi) {
  DualOptions opt;
  opt.tol = 1e-8;
  return solve_dual(inst, StrategyClass::fixed_input(phi), opt).value;
}

}  // namespace

MaxMinReport check_separable_maxmin(const DiscriminationInstance& inst, const MaxMinOptions& opt) {
  if (inst.time_steps() != 1) {
    throw std::invalid_argument("check_separable_maxmin: single-use instances only");
  }
  MaxMinReport report;
  report.rhs = solve_global_dual(inst).value;

  const int nv = inst.layout().dim(1);
  if (nv == 1) {
    // Trivial input; the two sides coincide by construction.
    report.lhs = fixed_input_dual_value(inst, Vector::Ones(1));
    report.equality = report.lhs >= report.rhs - opt.tol;
    return report;
  }

  double best = -1.0;
  double best_theta = 0.0, best_phi = 0.0;
  if (nv == 2) {
    const double step = opt.grid_degrees * M_PI / 180.0;
    for (double theta = 0.0; theta <= M_PI + 1e-12; theta += step) {
      const int phi_count = std::max(1, static_cast<int>(std::ceil(2.0 * M_PI / step *
                                                                   std::max(0.05, std::sin(theta)))));
      for (int k = 0; k < phi_count; ++k) {
        const double phi = 2.0 * M_PI * k / phi_count;
        const double value = fixed_input_dual_value(inst, bloch_state(theta, phi));
        if (value > best) {
          best = value;
          best_theta = theta;
          best_phi = phi;
        }
      }
    }
    double span = step;
    for (int round = 0; round < opt.refinement_rounds; ++round) {
      span /= 3.0;
      for (int dt = -2; dt <= 2; ++dt) {
        for (int dp = -2; dp <= 2; ++dp) {
          const double theta = std::clamp(best_theta + dt * span, 0.0, M_PI);
          const double phi = best_phi + dp * span;
          const double value = fixed_input_dual_value(inst, bloch_state(theta, phi));
          if (value > best) {
            best = value;
            best_theta = theta;
            best_phi = phi;
          }
        }
      }
    }
  } else {
    // Multi-start random ascent for larger inputs; a certified lower bound.
    Rng rng(opt.seed);
    for (int start = 0; start < 24; ++start) {
      Vector v = rng.random_pure_state(nv);
      double value = fixed_input_dual_value(inst, v);
      double radius = 0.5;
      for (int it = 0; it < 60; ++it) {
        Vector cand = v + radius * rng.random_pure_state(nv);
        cand.normalize();
        const double cval = fixed_input_dual_value(inst, cand);
        if (cval > value) {
          value = cval;
          v = cand;
        } else {
          radius *= 0.85;
        }
      }
      best = std::max(best, value);
    }
  }

  report.lhs = best;
  report.equality = report.lhs >= report.rhs - opt.tol;
  return report;
}

}  // namespace qpd
