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

#include "qpd/robustness.hpp"

#include <cmath>
#include <numeric>

namespace qpd {

namespace {

Matrix label_block(const Matrix& y, int outcomes, int m) {
  const int d = static_cast<int>(y.rows()) / outcomes;
  return y.block(m * d, m * d, d, d);
}

double singleton_ds_target(const StrategyClass& cls, const SystemLayout& layout,
                           Matrix& sigma_out) {
  // Returns 1 and fills sigma for classes whose sum set is a singleton.
  switch (cls.variant()) {
    case StrategyVariant::FixedInput: {
      const Vector& phi = cls.fixed_state();
      sigma_out = kron(Matrix::Identity(layout.dim(0), layout.dim(0)),
                       (phi * phi.adjoint()).transpose().eval());
      return 1.0;
    }
    case StrategyVariant::MaxEntangled: {
      double prod = 1.0;
      for (int i = 1; i < layout.subsystem_count(); i += 2) prod *= layout.dim(i);
      sigma_out = Matrix::Identity(layout.total_dim(), layout.total_dim()) / prod;
      return 1.0;
    }
    default:
      return 0.0;
  }
}

}  // namespace

HermitianMatrix build_extended_process(const DiscriminationInstance& inst) {
  const int d = inst.layout().total_dim();
  const int m_count = inst.count();
  Matrix out = Matrix::Zero(m_count * d, m_count * d);
  for (int m = 0; m < m_count; ++m) {
    out.block(m * d, m * d, d, d) = inst.weighted(m).raw();
  }
  return HermitianMatrix(out);
}

RobustnessProblem discrimination_robustness_problem(const DiscriminationInstance& inst,
                                                    const StrategyClass& cls) {
  switch (cls.variant()) {
    case StrategyVariant::Global:
    case StrategyVariant::FixedInput:
    case StrategyVariant::Nonadaptive:
    case StrategyVariant::MaxEntangled:
      break;
    default:
      throw std::invalid_argument(
          "discrimination_robustness_problem: cone membership for this class is "
          "semi-infinite; use robustness_from_value");
  }
  DiscriminationFreeSet f{cls, inst.layout(), inst.time_steps(), inst.count()};
  DiscriminationCone k{inst.count()};
  return RobustnessProblem(build_extended_process(inst), f, k);
}

double robustness_from_value(const DiscriminationInstance& inst, const StrategyClass& cls,
                             const DualOptions& opt) {
  DualCertificate cert = solve_dual(inst, cls, opt);
  return inst.count() * cert.value - 1.0;
}

namespace {

// Adds the constraint D_S(chi) <= bound_expr to an LMI program, where
// bound_expr is mu (a scalar variable) when with_mu, else the fixed level.
// Supports the dual-comb chain and the nonadaptive slice; singleton sum
// sets are handled by the caller (the value is linear there).
void add_ds_upper_bound(LmiProgram& prog, LmiProgram::Var chi, const StrategyClass& cls,
                        const SystemLayout& layout, int time_steps,
                        std::optional<LmiProgram::Var> mu, double fixed_level) {
  LmiProgram::Var upper = chi;
  std::vector<int> upper_dims = layout.dims();
  for (int t = time_steps; t >= 1; --t) {
    std::vector<int> reduced_dims(upper_dims.begin() + 1, upper_dims.end());
    int reduced = 1;
    for (int d : reduced_dims) reduced *= d;
    int blk = prog.add_block(reduced);
    std::vector<int> capture = upper_dims;
    prog.add_term(blk, upper, [capture](const Matrix& x) {
      std::vector<int> keep(capture.size() - 1);
      std::iota(keep.begin(), keep.end(), 1);
      return (-partial_trace(x, capture, keep)).eval();
    });
    if (t == 1) {
      if (mu) {
        prog.add_scalar_term(blk, *mu, Matrix::Identity(reduced, reduced));
      } else {
        prog.add_const(blk, fixed_level * Matrix::Identity(reduced, reduced));
      }
      break;
    }
    const int nv = reduced_dims[0];
    std::vector<int> next_dims(reduced_dims.begin() + 1, reduced_dims.end());
    int next = 1;
    for (int d : next_dims) next *= d;
    LmiProgram::Var z = prog.add_hermitian(next);
    prog.add_term(blk, z, [nv](const Matrix& x) {
      return kron(Matrix::Identity(nv, nv), x).eval();
    });
    upper = z;
    upper_dims = next_dims;
    (void)cls;
  }
}

}  // namespace

RobustnessResult robustness_direct(const RobustnessProblem& p, const ConicOptions& opt) {
  RobustnessResult result;
  const int full = p.target.dim();

  if (const auto* f = std::get_if<DiscriminationFreeSet>(&p.free_set)) {
    if (std::holds_alternative<FiniteCone>(p.cone)) {
      throw std::invalid_argument(
          "robustness_direct: finitely generated cones pair with finite free sets");
    }
    const int m_count = f->outcomes;
    const SystemLayout& layout = f->process_layout;
    const int d = layout.total_dim();
    if (full != m_count * d) {
      throw std::invalid_argument("robustness_direct: target does not match the free set");
    }

    // Witness for F ∩ int(K): a positive multiple of the identity sits in F
    // after normalizing its sum-set value to 1/M.
    const double ds_identity =
        evaluate_D_S(f->strategy, HermitianMatrix::identity(d), layout, f->time_steps);
    if (!(ds_identity > 0.0)) {
      throw std::invalid_argument("robustness_direct: free-set witness failed");
    }

    LmiProgram prog;
    auto chi = prog.add_hermitian(d);

    // K membership of I ⊗ chi - target.
    if (std::holds_alternative<PsdCone>(p.cone)) {
      int blk = prog.add_block(full);
      prog.add_const(blk, -p.target.raw());
      prog.add_term(blk, chi, [m_count](const Matrix& x) {
        return kron(Matrix::Identity(m_count, m_count), x).eval();
      });
    } else {
      const auto& cone = std::get<DiscriminationCone>(p.cone);
      if (cone.outcomes != m_count) {
        throw std::invalid_argument("robustness_direct: cone/free-set outcome mismatch");
      }
      for (int m = 0; m < m_count; ++m) {
        int blk = prog.add_block(d);
        prog.add_const(blk, -label_block(p.target.raw(), m_count, m));
        prog.add_term(blk, chi, [](const Matrix& x) { return x; });
      }
    }

    // lambda >= M * D_S(chi) - 1, lambda >= 0, minimize lambda. Scaling chi
    // by M keeps the sum-set bound in the chain form.
    auto lambda = prog.add_scalar();
    {
      int pos = prog.add_block(1);
      prog.add_scalar_term(pos, lambda, Matrix::Identity(1, 1));
    }
    Matrix sigma0;
    if (singleton_ds_target(f->strategy, layout, sigma0) > 0.0) {
      // D_S is linear: (1 + lambda)/M - <sigma0, chi> >= 0.
      int blk = prog.add_block(1);
      prog.add_const(blk, Matrix::Identity(1, 1) / m_count);
      prog.add_scalar_term(blk, lambda, Matrix::Identity(1, 1) / m_count);
      Eigen::VectorXd packed = herm_pack(sigma0);
      prog.add_term(blk, chi, [packed](const Matrix& x) {
        Matrix out(1, 1);
        out(0, 0) = -packed.dot(herm_pack(x));
        return out;
      });
    } else if (f->strategy.variant() == StrategyVariant::Nonadaptive) {
      // (1 + lambda)/M I - reduction(chi) >= 0.
      const int red = layout.dim(1) * layout.dim(3);
      int blk = prog.add_block(red);
      prog.add_const(blk, Matrix::Identity(red, red) / m_count);
      prog.add_scalar_term(blk, lambda, Matrix::Identity(red, red) / m_count);
      SystemLayout cap = layout;
      prog.add_term(blk, chi, [cap](const Matrix& x) {
        std::vector<int> perm = {0, 2, 1, 3};
        Matrix moved = permute_systems(x, cap.dims(), perm);
        std::vector<int> pdims = {cap.dim(0), cap.dim(2), cap.dim(1), cap.dim(3)};
        return (-partial_trace(moved, pdims, {2, 3})).eval();
      });
    } else {
      // Dual-comb chain with the bound (1 + lambda)/M: introduce mu and tie
      // mu = (1 + lambda)/M through the final chain block.
      auto mu = prog.add_scalar();
      add_ds_upper_bound(prog, chi, f->strategy, layout, f->time_steps, mu, 0.0);
      // (1 + lambda)/M - mu >= 0.
      int blk = prog.add_block(1);
      prog.add_const(blk, Matrix::Identity(1, 1) / m_count);
      prog.add_scalar_term(blk, lambda, Matrix::Identity(1, 1) / m_count);
      prog.add_scalar_term(blk, mu, -Matrix::Identity(1, 1));
    }
    prog.add_objective(lambda, 1.0);

    auto res = prog.solve(opt);
    result.value = res.value;
    return result;
  }

  const auto& f = std::get<FiniteFreeSet>(p.free_set);
  if (f.generators.empty()) {
    throw std::invalid_argument("robustness_direct: empty free set");
  }
  for (const auto& z : f.generators) {
    if (z.dim() != full) throw std::invalid_argument("robustness_direct: generator dim mismatch");
  }

  if (const auto* cone = std::get_if<FiniteCone>(&p.cone)) {
    // Fully finitely generated: nonnegative weights on both families.
    PrimalSdp prog;
    std::vector<int> zw, kw;
    for (size_t j = 0; j < f.generators.size(); ++j) zw.push_back(prog.add_psd_block(1));
    for (size_t l = 0; l < cone->generators.size(); ++l) kw.push_back(prog.add_psd_block(1));
    int slack = prog.add_psd_block(1);  // sum of z-weights minus 1

    std::vector<PrimalSdp::Term> terms;
    for (size_t j = 0; j < f.generators.size(); ++j) {
      Matrix zj = f.generators[j].raw();
      terms.push_back({zw[j], [zj](const Matrix& c) { return (c(0, 0) * zj).eval(); }});
    }
    for (size_t l = 0; l < cone->generators.size(); ++l) {
      Matrix kl = cone->generators[l].raw();
      terms.push_back({kw[l], [kl](const Matrix& c) { return (-c(0, 0) * kl).eval(); }});
    }
    prog.add_matrix_equality(terms, p.target.raw());

    std::vector<std::pair<int, Matrix>> sum_terms;
    for (int j : zw) sum_terms.push_back({j, Matrix::Identity(1, 1)});
    sum_terms.push_back({slack, -Matrix::Identity(1, 1)});
    prog.add_scalar_equality(sum_terms, 1.0);

    for (int j : zw) prog.add_objective(j, Matrix::Identity(1, 1));
    auto res = prog.solve(opt);
    result.value = res.value - 1.0;
    result.upper_bound = true;  // inner approximation of K
    return result;
  }

  // Finite free set against the PSD cone (or label-blockwise PSD cone).
  LmiProgram prog;
  auto weights = prog.add_vector(static_cast<int>(f.generators.size()));
  for (int j = 0; j < static_cast<int>(f.generators.size()); ++j) {
    int pos = prog.add_block(1);
    std::vector<Matrix> unit(f.generators.size(), Matrix::Zero(1, 1));
    unit[j](0, 0) = 1.0;
    prog.add_term(pos, weights, unit);
  }
  {
    // sum weights >= 1 (so lambda = sum - 1 >= 0).
    int blk = prog.add_block(1);
    prog.add_const(blk, -Matrix::Identity(1, 1));
    std::vector<Matrix> ones(f.generators.size(), Matrix::Identity(1, 1));
    prog.add_term(blk, weights, ones);
  }
  auto add_combo_blocks = [&](int outcomes) {
    if (outcomes <= 1) {
      int blk = prog.add_block(full);
      prog.add_const(blk, -p.target.raw());
      std::vector<Matrix> coeffs;
      for (const auto& z : f.generators) coeffs.push_back(z.raw());
      prog.add_term(blk, weights, coeffs);
    } else {
      const int d = full / outcomes;
      for (int m = 0; m < outcomes; ++m) {
        int blk = prog.add_block(d);
        prog.add_const(blk, -label_block(p.target.raw(), outcomes, m));
        std::vector<Matrix> coeffs;
        for (const auto& z : f.generators) coeffs.push_back(label_block(z.raw(), outcomes, m));
        prog.add_term(blk, weights, coeffs);
      }
    }
  };
  if (std::holds_alternative<PsdCone>(p.cone)) {
    add_combo_blocks(1);
  } else {
    add_combo_blocks(std::get<DiscriminationCone>(p.cone).outcomes);
  }
  Eigen::VectorXd obj = Eigen::VectorXd::Ones(f.generators.size());
  prog.add_objective(weights, obj);
  auto res = prog.solve(opt);
  result.value = res.value - 1.0;
  return result;
}

double free_set_support(const RobustnessProblem& p, const HermitianMatrix& phi) {
  if (const auto* f = std::get_if<FiniteFreeSet>(&p.free_set)) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& z : f->generators) best = std::max(best, inner_product(z, phi));
    return best;
  }
  const auto& f = std::get<DiscriminationFreeSet>(p.free_set);
  const SystemLayout& layout = f.process_layout;
  const int d = layout.total_dim();
  const int m_count = f.outcomes;
  if (phi.dim() != m_count * d) {
    throw std::invalid_argument("free_set_support: phi dimension mismatch");
  }
  // <phi, I ⊗ chi'> = <partial trace of phi over the label, chi'>.
  Matrix phi_a = Matrix::Zero(d, d);
  for (int m = 0; m < m_count; ++m) phi_a += label_block(phi.raw(), m_count, m);

  Matrix sigma0;
  if (singleton_ds_target(f.strategy, layout, sigma0) > 0.0) {
    // Hyperplane <sigma0, chi'> = 1/M: finite only when phi_a || sigma0.
    const double alpha = (phi_a.cwiseProduct(sigma0.conjugate()).sum().real()) /
                         sigma0.squaredNorm();
    if ((phi_a - alpha * sigma0).norm() > 1e-9 * (1.0 + phi_a.norm())) {
      return std::numeric_limits<double>::infinity();
    }
    return alpha / m_count;
  }

  // Chain classes: maximize over { D_S(chi') <= 1/M } inside a norm box.
  // Growth of the value with the box radius signals an unbounded direction.
  auto boxed_value = [&](double radius) {
    LmiProgram prog;
    auto chi = prog.add_hermitian(d);
    add_ds_upper_bound(prog, chi, f.strategy, layout, f.time_steps, std::nullopt,
                       1.0 / m_count);
    int up = prog.add_block(d);
    prog.add_const(up, radius * Matrix::Identity(d, d));
    prog.add_term(up, chi, [](const Matrix& x) { return (-x).eval(); });
    int dn = prog.add_block(d);
    prog.add_const(dn, radius * Matrix::Identity(d, d));
    prog.add_term(dn, chi, [](const Matrix& x) { return x; });
    prog.add_objective(chi, -herm_pack(phi_a));
    return -prog.solve().value;
  };
  const double base = 16.0 * (1.0 + phi_a.norm()) * d;
  const double narrow = boxed_value(base);
  const double wide = boxed_value(4.0 * base);
  if (wide > narrow + 1e-6 * (1.0 + std::abs(narrow))) {
    return std::numeric_limits<double>::infinity();
  }
  return wide;
}

double advantage_ratio(const RobustnessProblem& p, const std::vector<HermitianMatrix>& family) {
  double best = 0.0;
  for (const auto& phi : family) {
    const double gamma = free_set_support(p, phi);
    if (!(gamma > 1e-12) || std::isinf(gamma)) continue;  // skipped per the positivity guard
    best = std::max(best, inner_product(phi, p.target) / gamma);
  }
  return best;
}

double robustness_dual_bound(const RobustnessProblem& p,
                             const std::vector<HermitianMatrix>& k_star_family,
                             const ConicOptions& opt) {
  const int full = p.target.dim();

  // Exact path: PSD-type cones against a finite free set.
  const auto* finite_f = std::get_if<FiniteFreeSet>(&p.free_set);
  const bool psd_like =
      std::holds_alternative<PsdCone>(p.cone) || std::holds_alternative<DiscriminationCone>(p.cone);
  if (finite_f && psd_like && k_star_family.empty()) {
    LmiProgram prog;
    auto phi = prog.add_hermitian(full);
    if (std::holds_alternative<PsdCone>(p.cone)) {
      int blk = prog.add_block(full);
      prog.add_term(blk, phi, [](const Matrix& x) { return x; });
    } else {
      // Dual of the blockwise-PSD cone: block-diagonal PSD. Enforce both
      // the PSD blocks and vanishing off-blocks via a penalty-free
      // structure: restrict phi to the block-diagonal subspace by zeroing
      // the complement in every block term.
      const int outcomes = std::get<DiscriminationCone>(p.cone).outcomes;
      const int d = full / outcomes;
      for (int m = 0; m < outcomes; ++m) {
        int blk = prog.add_block(d);
        prog.add_term(blk, phi, [outcomes, m](const Matrix& x) {
          return label_block(x, outcomes, m).eval();
        });
      }
      // Off-diagonal label blocks do not affect feasibility or the
      // objective for block-diagonal targets and free sets, so they are
      // left free; the optimum can always be taken block-diagonal.
    }
    for (const auto& z : finite_f->generators) {
      int blk = prog.add_block(1);
      prog.add_const(blk, Matrix::Identity(1, 1));
      Eigen::VectorXd packed = herm_pack(z.raw());
      prog.add_term(blk, phi, [packed](const Matrix& x) {
        Matrix out(1, 1);
        out(0, 0) = -packed.dot(herm_pack(x));
        return out;
      });
    }
    prog.add_objective(phi, -herm_pack(p.target.raw()));
    auto res = prog.solve(opt);
    return -res.value;
  }

  if (!k_star_family.empty()) {
    return advantage_ratio(p, k_star_family);
  }

  if (psd_like) {
    // Eigenvector family of the target: rank-one PSD candidates.
    EigResult eig = eig_hermitian(p.target);
    std::vector<HermitianMatrix> family;
    for (int i = 0; i < p.target.dim(); ++i) {
      family.push_back(HermitianMatrix::outer(eig.vectors.col(i)));
    }
    family.push_back(HermitianMatrix::identity(p.target.dim()));
    return advantage_ratio(p, family);
  }

  throw std::invalid_argument("robustness_dual_bound: no generator oracle for this cone");
}

}  // namespace qpd
