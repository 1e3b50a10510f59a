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

#include "qpd/primal.hpp"

#include <cmath>
#include <numeric>

namespace qpd {

double success_probability(const DiscriminationInstance& inst, const Tester& t) {
  if (t.outcomes() != inst.count()) {
    throw std::invalid_argument("success_probability: outcome count mismatch");
  }
  if (!(t.layout() == inst.layout())) {
    throw std::invalid_argument("success_probability: layout mismatch");
  }
  double p = 0.0;
  for (int m = 0; m < inst.count(); ++m) {
    p += inst.prior(m) * inner_product(t.element(m).matrix(), inst.comb(m).matrix());
  }
  return p;
}

std::pair<double, std::vector<HermitianMatrix>> helstrom_two_state(double p1,
                                                                   const HermitianMatrix& rho1,
                                                                   double p2,
                                                                   const HermitianMatrix& rho2) {
  if (std::abs(p1 + p2 - 1.0) > 1e-12) {
    throw std::invalid_argument("helstrom_two_state: priors must sum to 1");
  }
  for (const HermitianMatrix* rho : {&rho1, &rho2}) {
    if (std::abs(rho->trace() - 1.0) > 1e-9 || !is_psd(*rho, 1e-9)) {
      throw std::invalid_argument("helstrom_two_state: arguments must be density matrices");
    }
  }
  HermitianMatrix delta = rho1 * p1 - rho2 * p2;
  EigResult eig = eig_hermitian(delta);
  const int d = delta.dim();
  Matrix pi1 = Matrix::Zero(d, d);
  double trace_norm = 0.0;
  for (int i = 0; i < d; ++i) {
    trace_norm += std::abs(eig.values(i));
    if (eig.values(i) >= 0.0) pi1 += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
  }
  std::vector<HermitianMatrix> povm = {HermitianMatrix(pi1),
                                       HermitianMatrix(Matrix::Identity(d, d) - pi1)};
  return {0.5 * (1.0 + trace_norm), povm};
}

namespace {

std::vector<int> suffix_dims(const SystemLayout& layout, int from) {
  return std::vector<int>(layout.dims().begin() + from, layout.dims().end());
}

int dims_product(const std::vector<int>& dims) {
  int p = 1;
  for (int d : dims) p *= d;
  return p;
}

HermitianMatrix channel_output(const ChoiProcess& channel, const Vector& phi) {
  ChoiProcess state(HermitianMatrix::outer(phi), SystemLayout({static_cast<int>(phi.size())}));
  return link_product(state, channel, {{0, 1}}).matrix();
}

}  // namespace

PrimalResult optimize_global(const DiscriminationInstance& inst, const ConicOptions& opt) {
  const SystemLayout& layout = inst.layout();
  const int full = layout.total_dim();
  const int time_steps = inst.time_steps();

  PrimalSdp prog;
  std::vector<int> phi_blocks;
  for (int m = 0; m < inst.count(); ++m) phi_blocks.push_back(prog.add_psd_block(full));
  std::vector<int> tau_blocks(time_steps + 1, -1);
  for (int t = time_steps; t >= 1; --t) {
    tau_blocks[t] = prog.add_psd_block(dims_product(suffix_dims(layout, 2 * (time_steps - t) + 1)));
  }

  for (int m = 0; m < inst.count(); ++m) {
    prog.add_objective(phi_blocks[m], -inst.weighted(m).raw());
  }

  // sum_m Phi_m = I_{W_T} ⊗ tau^(T).
  {
    std::vector<PrimalSdp::Term> terms;
    for (int m = 0; m < inst.count(); ++m) {
      terms.push_back({phi_blocks[m], [](const Matrix& x) { return x; }});
    }
    const int nw = layout.dim(0);
    terms.push_back({tau_blocks[time_steps], [nw](const Matrix& x) {
                       return (-kron(Matrix::Identity(nw, nw), x)).eval();
                     }});
    prog.add_matrix_equality(terms, Matrix::Zero(full, full));
  }
  // Tr_{V_t} tau^(t) = I_{W_{t-1}} ⊗ tau^(t-1).
  for (int t = time_steps; t >= 2; --t) {
    std::vector<int> tdims = suffix_dims(layout, 2 * (time_steps - t) + 1);
    const int nw_prev = layout.dim(2 * (time_steps - t) + 2);
    const int reduced = dims_product(tdims) / tdims[0];
    prog.add_matrix_equality(
        {{tau_blocks[t],
          [tdims](const Matrix& x) {
            std::vector<int> keep(tdims.size() - 1);
            std::iota(keep.begin(), keep.end(), 1);
            return partial_trace(x, tdims, keep);
          }},
         {tau_blocks[t - 1],
          [nw_prev](const Matrix& x) {
            return (-kron(Matrix::Identity(nw_prev, nw_prev), x)).eval();
          }}},
        Matrix::Zero(reduced, reduced));
  }
  const int nv1 = layout.dim(2 * time_steps - 1);
  prog.add_scalar_equality({{tau_blocks[1], Matrix::Identity(nv1, nv1)}}, 1.0);

  auto res = prog.solve(opt);

  std::vector<ChoiProcess> elements;
  for (int m = 0; m < inst.count(); ++m) {
    elements.emplace_back(res.X[phi_blocks[m]], layout, ProcessRole::tester_element, 1e-7);
  }
  Tester tester(elements, StrategyClass::global());

  PrimalResult out;
  out.tester = tester;
  out.value = success_probability(inst, tester);
  out.method = PrimalMethod::exact;
  out.certified_optimal = true;
  return out;
}

PrimalResult optimize_fixed_input(const DiscriminationInstance& inst, const Vector& phi,
                                  const ConicOptions& opt) {
  if (inst.time_steps() != 1) {
    throw std::invalid_argument("optimize_fixed_input: single-use instances only");
  }
  const SystemLayout& layout = inst.layout();
  if (phi.size() != layout.dim(1)) {
    throw std::invalid_argument("optimize_fixed_input: input state has wrong dimension");
  }
  const int nw = layout.dim(0);

  std::vector<HermitianMatrix> outputs;
  for (int m = 0; m < inst.count(); ++m) outputs.push_back(channel_output(inst.comb(m), phi));

  std::vector<HermitianMatrix> povm;
  if (inst.count() == 2) {
    auto [value, measurement] =
        helstrom_two_state(inst.prior(0), outputs[0], inst.prior(1), outputs[1]);
    povm = measurement;
  } else {
    PrimalSdp prog;
    std::vector<int> blocks;
    for (int m = 0; m < inst.count(); ++m) blocks.push_back(prog.add_psd_block(nw));
    std::vector<PrimalSdp::Term> terms;
    for (int m = 0; m < inst.count(); ++m) {
      prog.add_objective(blocks[m], -inst.prior(m) * outputs[m].raw());
      terms.push_back({blocks[m], [](const Matrix& x) { return x; }});
    }
    prog.add_matrix_equality(terms, Matrix::Identity(nw, nw));
    auto res = prog.solve(opt);
    for (int m = 0; m < inst.count(); ++m) povm.push_back(res.X[blocks[m]]);
  }

  Matrix phit = (phi * phi.adjoint()).transpose();
  std::vector<ChoiProcess> elements;
  for (int m = 0; m < inst.count(); ++m) {
    elements.emplace_back(HermitianMatrix(kron(povm[m].raw(), phit)), layout,
                          ProcessRole::tester_element, 1e-7);
  }
  Tester tester(elements, StrategyClass::fixed_input(phi));

  PrimalResult out;
  out.tester = tester;
  out.value = success_probability(inst, tester);
  out.method = PrimalMethod::exact;
  out.certified_optimal = true;
  return out;
}

namespace {

Vector bloch_state(double theta, double phi) {
  Vector v(2);
  v(0) = std::cos(theta / 2.0);
  v(1) = std::exp(Complex(0.0, phi)) * std::sin(theta / 2.0);
  return v;
}

}  // namespace

PrimalResult optimize_separable_input(const DiscriminationInstance& inst,
                                      const SeparableSearchOptions& opt) {
  if (inst.time_steps() != 1) {
    throw std::invalid_argument("optimize_separable_input: single-use instances only");
  }
  const int nv = inst.layout().dim(1);

  PrimalResult best;
  best.value = -1.0;
  best.method = PrimalMethod::grid;

  auto consider = [&](const Vector& phi) {
    PrimalResult cand = optimize_fixed_input(inst, phi);
    if (cand.value > best.value) {
      best.value = cand.value;
      best.tester = cand.tester;
      return true;
    }
    return false;
  };

  if (nv == 1) {
    consider(Vector::Ones(1));
    best.certified_optimal = true;
    return best;
  }

  if (nv == 2) {
    const double step = opt.grid_degrees * M_PI / 180.0;
    double best_theta = 0.0, best_phi = 0.0;
    for (double theta = 0.0; theta <= M_PI + 1e-12; theta += step) {
      const int phi_count = std::max(
          1, static_cast<int>(std::ceil(2.0 * M_PI / step * std::max(0.05, std::sin(theta)))));
      for (int k = 0; k < phi_count; ++k) {
        const double phi = 2.0 * M_PI * k / phi_count;
        if (consider(bloch_state(theta, phi))) {
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
          if (consider(bloch_state(theta, phi))) {
            best_theta = theta;
            best_phi = phi;
          }
        }
      }
    }
    best.certified_optimal = opt.grid_degrees <= 1.0;
    return best;
  }

  Rng rng(opt.seed);
  for (int start = 0; start < opt.starts; ++start) {
    Vector v = rng.random_pure_state(nv);
    consider(v);
    double radius = 0.5;
    double current = optimize_fixed_input(inst, v).value;
    for (int it = 0; it < 60; ++it) {
      Vector cand = v + radius * rng.random_pure_state(nv);
      cand.normalize();
      const double cval = optimize_fixed_input(inst, cand).value;
      if (cval > current) {
        current = cval;
        v = cand;
        consider(v);
      } else {
        radius *= 0.85;
      }
    }
  }
  best.certified_optimal = false;
  return best;
}

PrimalResult seesaw_sequential(const DiscriminationInstance& inst, const SeesawOptions& opt) {
  if (inst.time_steps() != 2) {
    throw std::invalid_argument("seesaw_sequential: two-step instances only");
  }
  const SystemLayout& layout = inst.layout();
  const int nw2 = layout.dim(0), nv2 = layout.dim(1), nw1 = layout.dim(2), nv1 = layout.dim(3);
  const int d_up = nw2 * nv2, d_low = nw1 * nv1;
  const int m_count = inst.count();
  const int branches = opt.branching;

  std::vector<HermitianMatrix> weighted;
  for (int m = 0; m < m_count; ++m) weighted.push_back(inst.weighted(m));

  double best_value = -1.0;
  SequentialParts best_parts;
  Rng base(opt.seed);

  for (int r = 0; r < opt.restarts; ++r) {
    Rng rng = base.spawn(r);
    // Random first-step tester.
    HermitianMatrix rho = rng.random_density(nv1);
    HermitianMatrix sig(kron(Matrix::Identity(nw1, nw1), rho.raw()));
    HermitianMatrix root = psd_sqrt(sig);
    std::vector<HermitianMatrix> povm = rng.random_povm(d_low, branches);
    std::vector<HermitianMatrix> a;
    for (int j = 0; j < branches; ++j) {
      a.push_back(HermitianMatrix(root.raw() * povm[j].raw() * root.raw()));
    }

    std::vector<std::vector<HermitianMatrix>> b(branches);
    double value = 0.0;
    std::vector<double> history;
    for (int it = 0; it < opt.max_iterations; ++it) {
      // Second-step testers: exact optimization per branch.
      value = 0.0;
      for (int j = 0; j < branches; ++j) {
        std::vector<HermitianMatrix> h;
        std::vector<int> meta = {d_up, d_low};
        for (int m = 0; m < m_count; ++m) {
          Matrix prod = kron(Matrix::Identity(d_up, d_up), a[j].raw()) * weighted[m].raw();
          Matrix hm = partial_trace(prod, meta, {0});
          h.push_back(HermitianMatrix(0.5 * (hm + hm.adjoint().eval())));
        }
        auto [bval, bj] = optimize_sub_tester(h, nw2, nv2, true, opt.conic_tol);
        b[j] = bj;
        value += bval;
      }

      // First-step tester: exact optimization against the contracted combs.
      std::vector<HermitianMatrix> s;
      for (int j = 0; j < branches; ++j) {
        s.push_back(contract_upper_tester(b[j], weighted, layout));
      }
      auto [aval, astep] = optimize_sub_tester(s, nw1, nv1, true, opt.conic_tol);
      a = astep;
      value = aval;

      history.push_back(value);
      if (opt.objective_trace) opt.objective_trace->push_back(value);
      if (history.size() >= 4 && value - history[history.size() - 4] < opt.stall_tol) break;
    }

    if (value > best_value) {
      best_value = value;
      best_parts.a = a;
      best_parts.b = b;
    }
  }

  std::vector<ChoiProcess> elements;
  for (int m = 0; m < m_count; ++m) {
    Matrix phi = Matrix::Zero(layout.total_dim(), layout.total_dim());
    for (int j = 0; j < branches; ++j) {
      phi += kron(best_parts.b[j][m].raw(), best_parts.a[j].raw());
    }
    elements.emplace_back(HermitianMatrix(phi), layout, ProcessRole::tester_element, 1e-7);
  }
  Tester tester(elements, StrategyClass::sequential_two_step(branches));
  tester.set_sequential_parts(best_parts);

  PrimalResult out;
  out.tester = tester;
  out.value = success_probability(inst, tester);
  out.method = PrimalMethod::seesaw;
  out.restarts_used = opt.restarts;
  out.certified_optimal = false;
  return out;
}

}  // namespace qpd
