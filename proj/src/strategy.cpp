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

#include "qpd/strategy.hpp"

#include <cmath>

#include "qpd/conic.hpp"

namespace qpd {

std::string to_string(StrategyVariant v) {
  switch (v) {
    case StrategyVariant::Global: return "global";
    case StrategyVariant::FixedInput: return "fixed-input";
    case StrategyVariant::SeparableInput: return "separable-input";
    case StrategyVariant::Nonadaptive: return "nonadaptive";
    case StrategyVariant::SequentialTwoStep: return "sequential";
    case StrategyVariant::OneWayAB: return "one-way-ab";
    case StrategyVariant::MaxEntangled: return "max-entangled";
    case StrategyVariant::Custom: return "custom";
  }
  return "unknown";
}

StrategyClass StrategyClass::global() { return StrategyClass(StrategyVariant::Global); }

StrategyClass StrategyClass::fixed_input(const Vector& phi) {
  StrategyClass c(StrategyVariant::FixedInput);
  if (std::abs(phi.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("fixed_input: state must be normalized");
  }
  c.fixed_state_ = phi;
  return c;
}

StrategyClass StrategyClass::separable_input() {
  return StrategyClass(StrategyVariant::SeparableInput);
}

StrategyClass StrategyClass::nonadaptive() { return StrategyClass(StrategyVariant::Nonadaptive); }

StrategyClass StrategyClass::sequential_two_step(int default_branching) {
  StrategyClass c(StrategyVariant::SequentialTwoStep);
  c.branching_ = default_branching;
  return c;
}

StrategyClass StrategyClass::one_way_ab() { return StrategyClass(StrategyVariant::OneWayAB); }

StrategyClass StrategyClass::max_entangled() {
  return StrategyClass(StrategyVariant::MaxEntangled);
}

StrategyClass StrategyClass::custom(CustomOracles oracles) {
  StrategyClass c(StrategyVariant::Custom);
  c.oracles_ = std::make_shared<CustomOracles>(std::move(oracles));
  return c;
}

const Vector& StrategyClass::fixed_state() const {
  if (variant_ != StrategyVariant::FixedInput) {
    throw std::logic_error("fixed_state: not a fixed-input class");
  }
  return fixed_state_;
}

const CustomOracles& StrategyClass::oracles() const {
  if (!oracles_) throw std::logic_error("oracles: not a custom class");
  return *oracles_;
}

Tester::Tester(std::vector<ChoiProcess> elements, StrategyClass cls)
    : elements_(std::move(elements)), class_(std::move(cls)) {
  if (elements_.size() < 2) throw std::invalid_argument("Tester: need at least 2 outcomes");
  const SystemLayout& base = elements_.front().layout();
  for (const auto& e : elements_) {
    if (!(e.layout() == base)) throw std::invalid_argument("Tester: elements on different layouts");
  }
}

HermitianMatrix Tester::sum() const {
  HermitianMatrix s = elements_.front().matrix();
  for (size_t i = 1; i < elements_.size(); ++i) s = s + elements_[i].matrix();
  return s;
}

namespace {

// Swap taking [V2, W1, W2, V1] ordering into the canonical [W2, V2, W1, V1].
const std::vector<int> kOneWaySwap = {2, 0, 1, 3};
// Nonadaptive sum structure: [W2, W1, V2, V1] ordering into canonical.
const std::vector<int> kNonadaptiveSwap = {0, 2, 1, 3};

double scale_of(const std::vector<HermitianMatrix>& mats) {
  double s = 1.0;
  for (const auto& m : mats) s = std::max(s, m.frobenius_norm());
  return s;
}

// min ||sum_j c_j Z_j - target||_F over the probability simplex, by
// projected gradient on packed coordinates. Small hulls only.
double hull_distance(const std::vector<HermitianMatrix>& hull, const HermitianMatrix& target) {
  const int r = static_cast<int>(hull.size());
  const int n = target.dim();
  Eigen::MatrixXd a(n * n, r);
  for (int j = 0; j < r; ++j) a.col(j) = herm_pack(hull[j].raw());
  Eigen::VectorXd b = herm_pack(target.raw());

  auto project_simplex = [](Eigen::VectorXd v) {
    const int d = static_cast<int>(v.size());
    Eigen::VectorXd u = v;
    std::sort(u.data(), u.data() + d, std::greater<double>());
    double css = 0.0, theta = 0.0;
    int rho = 0;
    for (int i = 0; i < d; ++i) {
      css += u(i);
      const double t = (css - 1.0) / (i + 1);
      if (u(i) - t > 0) {
        rho = i + 1;
        theta = t;
      }
    }
    for (int i = 0; i < d; ++i) v(i) = std::max(0.0, v(i) - theta);
    return v;
  };

  Eigen::VectorXd c = Eigen::VectorXd::Constant(r, 1.0 / r);
  const double lip = std::max(1e-12, (a.transpose() * a).norm());
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXd grad = a.transpose() * (a * c - b);
    Eigen::VectorXd next = project_simplex(c - (1.0 / lip) * grad);
    if ((next - c).norm() < 1e-14) {
      c = next;
      break;
    }
    c = next;
  }
  return (a * c - b).norm();
}

ValidationReport fail(const std::string& why) { return {false, why}; }

// Haar-style random channel Choi on [out, in] via a Stinespring isometry.
HermitianMatrix random_channel_choi(Rng& rng, int in, int out) {
  const int anc = in;
  Matrix v = rng.haar_isometry(out * anc, in);
  std::vector<Matrix> kraus;
  for (int a = 0; a < anc; ++a) {
    Matrix k(out, in);
    for (int o = 0; o < out; ++o) k.row(o) = v.row(o * anc + a);
    kraus.push_back(k);
  }
  return choi_from_kraus(kraus, in, out).matrix();
}

}  // namespace

ValidationReport validate_tester(const Tester& t, const StrategyClass& c, double tol) {
  if (t.outcomes() < 2) return fail("tester has fewer than 2 outcomes");
  const SystemLayout& layout = t.layout();
  const int systems = layout.subsystem_count();
  if (systems % 2 != 0) return fail("layout must pair outputs with inputs");
  const int time_steps = systems / 2;

  const double scale = 1.0 + t.sum().frobenius_norm();
  for (int m = 0; m < t.outcomes(); ++m) {
    const double lam = min_eigenvalue(t.element(m).matrix());
    if (lam < -tol * scale) {
      return fail("element " + std::to_string(m) + " is not PSD (min eig " + std::to_string(lam) +
                  ")");
    }
  }

  HermitianMatrix sum = t.sum();
  CombTolerances ct{std::max(tol, 1e-10) * scale, tol};

  switch (c.variant()) {
    case StrategyVariant::Global:
      if (!is_dual_comb(ChoiProcess(sum, layout, ProcessRole::dual_variable), time_steps, ct)) {
        return fail("element sum is not in the dual-comb set");
      }
      break;
    case StrategyVariant::FixedInput: {
      if (time_steps != 1) return fail("fixed-input testers are single-step");
      const Vector& phi = c.fixed_state();
      if (phi.size() != layout.dim(1)) return fail("fixed input state has wrong dimension");
      Matrix target = kron(Matrix::Identity(layout.dim(0), layout.dim(0)),
                           (phi * phi.adjoint()).transpose().eval());
      if ((sum.raw() - target).norm() > tol * scale) {
        return fail("element sum differs from I ⊗ phi^T");
      }
      break;
    }
    case StrategyVariant::SeparableInput: {
      if (time_steps != 1) return fail("separable-input testers are single-step");
      const int nw = layout.dim(0);
      Matrix red = partial_trace(sum.raw(), layout.dims(), {1}) / static_cast<double>(nw);
      if ((sum.raw() - kron(Matrix::Identity(nw, nw), red)).norm() > tol * scale) {
        return fail("element sum is not of the form I ⊗ state");
      }
      HermitianMatrix rho((Matrix(red)));
      if (std::abs(rho.trace() - 1.0) > tol * scale) return fail("input state is not normalized");
      if (max_eigenvalue(rho) < 1.0 - std::sqrt(tol) * scale) {
        return fail("input state is not pure");
      }
      break;
    }
    case StrategyVariant::Nonadaptive: {
      if (time_steps != 2) return fail("nonadaptive class here covers two-step testers");
      HermitianMatrix perm = permute_systems(sum, layout, kNonadaptiveSwap);
      // perm should be I_{W2 W1} ⊗ rho' on [W2, W1, V2, V1].
      const int nw = layout.dim(0) * layout.dim(2);
      std::vector<int> pdims = {layout.dim(0), layout.dim(2), layout.dim(1), layout.dim(3)};
      Matrix rho = partial_trace(perm.raw(), pdims, {2, 3}) / static_cast<double>(nw);
      Matrix target = kron(Matrix::Identity(nw, nw), rho);
      if ((perm.raw() - target).norm() > tol * scale) {
        return fail("element sum is not I ⊗ rho' after the wire swap");
      }
      if (std::abs(rho.trace().real() - 1.0) > tol * scale) {
        return fail("rho' is not normalized");
      }
      if (min_eigenvalue(HermitianMatrix(rho)) < -tol * scale) return fail("rho' is not PSD");
      break;
    }
    case StrategyVariant::SequentialTwoStep: {
      if (time_steps != 2) return fail("sequential testers here have two steps");
      if (!t.sequential_parts()) return fail("sequential decomposition not provided");
      const auto& parts = *t.sequential_parts();
      if (parts.b.size() != parts.a.size()) return fail("decomposition arity mismatch");
      const int nw2 = layout.dim(0), nv2 = layout.dim(1);
      for (size_t j = 0; j < parts.a.size(); ++j) {
        if (min_eigenvalue(parts.a[j]) < -tol * scale) {
          return fail("A part " + std::to_string(j) + " is not PSD");
        }
        if (static_cast<int>(parts.b[j].size()) != t.outcomes()) {
          return fail("B tester " + std::to_string(j) + " has wrong outcome count");
        }
        Matrix bsum = Matrix::Zero(nw2 * nv2, nw2 * nv2);
        for (const auto& b : parts.b[j]) {
          if (min_eigenvalue(b) < -tol * scale) {
            return fail("B part in branch " + std::to_string(j) + " is not PSD");
          }
          bsum += b.raw();
        }
        Matrix rho = partial_trace(bsum, {nw2, nv2}, {1}) / static_cast<double>(nw2);
        if ((bsum - kron(Matrix::Identity(nw2, nw2), rho)).norm() > tol * scale ||
            std::abs(rho.trace().real() - 1.0) > tol * scale) {
          return fail("B parts in branch " + std::to_string(j) + " do not form a tester");
        }
      }
      for (int m = 0; m < t.outcomes(); ++m) {
        Matrix rebuilt = Matrix::Zero(layout.total_dim(), layout.total_dim());
        for (size_t j = 0; j < parts.a.size(); ++j) {
          rebuilt += kron(parts.b[j][m].raw(), parts.a[j].raw());
        }
        if ((rebuilt - t.element(m).matrix().raw()).norm() > tol * scale) {
          return fail("decomposition does not rebuild element " + std::to_string(m));
        }
      }
      if (!is_dual_comb(ChoiProcess(sum, layout, ProcessRole::dual_variable), time_steps, ct)) {
        return fail("element sum is not in the dual-comb set");
      }
      break;
    }
    case StrategyVariant::OneWayAB: {
      if (time_steps != 2) return fail("one-way testers here have two steps");
      if (!t.one_way_parts()) return fail("one-way decomposition not provided");
      const auto& parts = *t.one_way_parts();
      if (parts.a.size() != parts.sigma.size()) return fail("decomposition arity mismatch");
      const int nv2 = layout.dim(1), nw1 = layout.dim(2);
      for (size_t i = 0; i < parts.sigma.size(); ++i) {
        if (min_eigenvalue(parts.sigma[i]) < -tol * scale) {
          return fail("sigma " + std::to_string(i) + " is not PSD");
        }
        Matrix marginal = partial_trace(parts.sigma[i].raw(), {nv2, nw1}, {1});
        const double c0 = marginal.trace().real() / nw1;
        if ((marginal - c0 * Matrix::Identity(nw1, nw1)).norm() > tol * scale) {
          return fail("sigma " + std::to_string(i) + " is not proportional to a channel Choi");
        }
        for (const auto& a : parts.a[i]) {
          if (min_eigenvalue(a) < -tol * scale) return fail("A part is not PSD");
        }
      }
      for (int m = 0; m < t.outcomes(); ++m) {
        Matrix rebuilt = Matrix::Zero(layout.total_dim(), layout.total_dim());
        for (size_t i = 0; i < parts.sigma.size(); ++i) {
          Matrix term = kron(parts.sigma[i].raw(), parts.a[i][m].raw());
          std::vector<int> tdims = {nv2, nw1, layout.dim(0), layout.dim(3)};
          rebuilt += permute_systems(term, tdims, kOneWaySwap);
        }
        if ((rebuilt - t.element(m).matrix().raw()).norm() > tol * scale) {
          return fail("decomposition does not rebuild element " + std::to_string(m));
        }
      }
      if (!is_dual_comb(ChoiProcess(sum, layout, ProcessRole::dual_variable), time_steps, ct)) {
        return fail("element sum is not in the dual-comb set");
      }
      break;
    }
    case StrategyVariant::MaxEntangled: {
      double prod = 1.0;
      for (int i = 1; i < systems; i += 2) prod *= layout.dim(i);
      Matrix target = Matrix::Identity(layout.total_dim(), layout.total_dim()) / prod;
      if ((sum.raw() - target).norm() > tol * scale) {
        return fail("sum not maximally mixed: expected I / " + std::to_string(prod));
      }
      break;
    }
    case StrategyVariant::Custom: {
      const auto& oracles = c.oracles();
      std::vector<HermitianMatrix> mats;
      for (const auto& e : t.elements()) mats.push_back(e.matrix());
      if (oracles.cone_membership && !oracles.cone_membership(mats, tol)) {
        return fail("custom cone membership failed");
      }
      switch (oracles.sum_set.kind) {
        case CustomSumSet::Kind::DualCombSet:
          if (!is_dual_comb(ChoiProcess(sum, layout, ProcessRole::dual_variable), time_steps,
                            ct)) {
            return fail("element sum is not in the dual-comb set");
          }
          break;
        case CustomSumSet::Kind::Singleton:
          if ((sum.raw() - oracles.sum_set.singleton->raw()).norm() > tol * scale) {
            return fail("element sum differs from the singleton target");
          }
          break;
        case CustomSumSet::Kind::FiniteHull:
          if (hull_distance(oracles.sum_set.hull, sum) > std::sqrt(tol) * scale) {
            return fail("element sum is outside the finite hull");
          }
          break;
      }
      break;
    }
  }
  return {true, "ok"};
}

Tester sample_tester(const StrategyClass& c, const SystemLayout& layout, int time_steps,
                     int outcomes, uint64_t seed, int branching) {
  if (outcomes < 2) throw std::invalid_argument("sample_tester: need at least 2 outcomes");
  if (layout.subsystem_count() != 2 * time_steps) {
    throw std::invalid_argument("sample_tester: layout must have 2T subsystems");
  }
  Rng rng(seed);
  const int dim = layout.total_dim();

  auto split_by_povm = [&](const HermitianMatrix& sigma) {
    HermitianMatrix root = psd_sqrt(sigma);
    std::vector<HermitianMatrix> povm = rng.random_povm(dim, outcomes);
    std::vector<ChoiProcess> elements;
    for (int m = 0; m < outcomes; ++m) {
      elements.emplace_back(HermitianMatrix(root.raw() * povm[m].raw() * root.raw()), layout,
                            ProcessRole::tester_element);
    }
    return elements;
  };

  switch (c.variant()) {
    case StrategyVariant::Global: {
      ChoiProcess sigma = random_dual_comb(layout, time_steps, rng.spawn(1).uniform_int(1 << 30));
      return Tester(split_by_povm(sigma.matrix()), c);
    }
    case StrategyVariant::FixedInput:
    case StrategyVariant::SeparableInput: {
      if (time_steps != 1) {
        throw std::invalid_argument("sample_tester: fixed/separable input needs T = 1");
      }
      Vector phi = c.variant() == StrategyVariant::FixedInput ? c.fixed_state()
                                                              : rng.random_pure_state(layout.dim(1));
      Matrix phit = (phi * phi.adjoint()).transpose();
      std::vector<HermitianMatrix> povm = rng.random_povm(layout.dim(0), outcomes);
      std::vector<ChoiProcess> elements;
      for (int m = 0; m < outcomes; ++m) {
        elements.emplace_back(HermitianMatrix(kron(povm[m].raw(), phit)), layout,
                              ProcessRole::tester_element);
      }
      Tester t(elements, c);
      return t;
    }
    case StrategyVariant::Nonadaptive: {
      if (time_steps != 2) throw std::invalid_argument("sample_tester: nonadaptive needs T = 2");
      HermitianMatrix rho = rng.random_density(layout.dim(1) * layout.dim(3));
      const int nw = layout.dim(0) * layout.dim(2);
      Matrix sum = kron(Matrix::Identity(nw, nw), rho.raw());
      std::vector<int> pdims = {layout.dim(0), layout.dim(2), layout.dim(1), layout.dim(3)};
      HermitianMatrix sigma = HermitianMatrix(permute_systems(sum, pdims, kNonadaptiveSwap));
      return Tester(split_by_povm(sigma), c);
    }
    case StrategyVariant::MaxEntangled: {
      double prod = 1.0;
      for (int i = 1; i < layout.subsystem_count(); i += 2) prod *= layout.dim(i);
      HermitianMatrix sigma = HermitianMatrix::identity(dim) * (1.0 / prod);
      return Tester(split_by_povm(sigma), c);
    }
    case StrategyVariant::SequentialTwoStep: {
      if (time_steps != 2) throw std::invalid_argument("sample_tester: sequential needs T = 2");
      const int branches = branching > 0 ? branching : c.default_branching();
      const int nw1 = layout.dim(2), nv1 = layout.dim(3);
      const int nw2 = layout.dim(0), nv2 = layout.dim(1);

      HermitianMatrix rho_a = rng.random_density(nv1);
      HermitianMatrix sig_a(kron(Matrix::Identity(nw1, nw1), rho_a.raw()));
      HermitianMatrix root_a = psd_sqrt(sig_a);
      std::vector<HermitianMatrix> q = rng.random_povm(nw1 * nv1, branches);
      SequentialParts parts;
      for (int j = 0; j < branches; ++j) {
        parts.a.push_back(HermitianMatrix(root_a.raw() * q[j].raw() * root_a.raw()));
        HermitianMatrix rho_b = rng.random_density(nv2);
        HermitianMatrix sig_b(kron(Matrix::Identity(nw2, nw2), rho_b.raw()));
        HermitianMatrix root_b = psd_sqrt(sig_b);
        std::vector<HermitianMatrix> qb = rng.random_povm(nw2 * nv2, outcomes);
        std::vector<HermitianMatrix> row;
        for (int m = 0; m < outcomes; ++m) {
          row.push_back(HermitianMatrix(root_b.raw() * qb[m].raw() * root_b.raw()));
        }
        parts.b.push_back(std::move(row));
      }
      std::vector<ChoiProcess> elements;
      for (int m = 0; m < outcomes; ++m) {
        Matrix phi = Matrix::Zero(dim, dim);
        for (int j = 0; j < branches; ++j) phi += kron(parts.b[j][m].raw(), parts.a[j].raw());
        elements.emplace_back(HermitianMatrix(phi), layout, ProcessRole::tester_element);
      }
      Tester t(elements, c);
      t.set_sequential_parts(std::move(parts));
      return t;
    }
    case StrategyVariant::OneWayAB: {
      if (time_steps != 2) throw std::invalid_argument("sample_tester: one-way needs T = 2");
      const int branches = std::max(2, branching > 0 ? branching : 2);
      const int nw2 = layout.dim(0), nv2 = layout.dim(1), nw1 = layout.dim(2), nv1 = layout.dim(3);
      std::vector<double> q = rng.random_priors(branches);
      OneWayParts parts;
      for (int i = 0; i < branches; ++i) {
        parts.sigma.push_back(random_channel_choi(rng, nw1, nv2));
        HermitianMatrix rho = rng.random_density(nv1);
        HermitianMatrix base(kron(Matrix::Identity(nw2, nw2), rho.raw()));
        HermitianMatrix root = psd_sqrt(base);
        std::vector<HermitianMatrix> povm = rng.random_povm(nw2 * nv1, outcomes);
        std::vector<HermitianMatrix> row;
        for (int m = 0; m < outcomes; ++m) {
          row.push_back(HermitianMatrix(q[i] * root.raw() * povm[m].raw() * root.raw()));
        }
        parts.a.push_back(std::move(row));
      }
      std::vector<ChoiProcess> elements;
      std::vector<int> tdims = {nv2, nw1, nw2, nv1};
      for (int m = 0; m < outcomes; ++m) {
        Matrix phi = Matrix::Zero(dim, dim);
        for (int i = 0; i < branches; ++i) {
          phi += permute_systems(kron(parts.sigma[i].raw(), parts.a[i][m].raw()), tdims,
                                 kOneWaySwap);
        }
        elements.emplace_back(HermitianMatrix(phi), layout, ProcessRole::tester_element);
      }
      Tester t(elements, c);
      t.set_one_way_parts(std::move(parts));
      return t;
    }
    case StrategyVariant::Custom: {
      const auto& oracles = c.oracles();
      if (!oracles.sampler) {
        throw std::invalid_argument("sample_tester: custom class has no sampler");
      }
      return oracles.sampler(layout, time_steps, outcomes, seed);
    }
  }
  throw std::logic_error("sample_tester: unreachable");
}

HermitianMatrix contract_upper_tester(const std::vector<HermitianMatrix>& b,
                                      const std::vector<HermitianMatrix>& deficit,
                                      const SystemLayout& layout) {
  if (b.size() != deficit.size()) {
    throw std::invalid_argument("contract_upper_tester: size mismatch");
  }
  const int d_up = layout.dim(0) * layout.dim(1);
  const int d_low = layout.dim(2) * layout.dim(3);
  std::vector<int> meta_dims = {d_up, d_low};
  Matrix acc = Matrix::Zero(d_low, d_low);
  for (size_t m = 0; m < b.size(); ++m) {
    Matrix prod = kron(b[m].raw(), Matrix::Identity(d_low, d_low)) * deficit[m].raw();
    acc += partial_trace(prod, meta_dims, {1});
  }
  return HermitianMatrix(0.5 * (acc + acc.adjoint().eval()));
}

HermitianMatrix contract_oneway_channel(const HermitianMatrix& sigma,
                                        const HermitianMatrix& deficit_m,
                                        const SystemLayout& layout) {
  const int nw2 = layout.dim(0), nv2 = layout.dim(1), nw1 = layout.dim(2), nv1 = layout.dim(3);
  // Reorder the deficit to [V2, W1, W2, V1]:
  Matrix moved = permute_systems(deficit_m.raw(), layout.dims(), {1, 2, 0, 3});
  std::vector<int> meta_dims = {nv2 * nw1, nw2 * nv1};
  Matrix prod = kron(sigma.raw(), Matrix::Identity(nw2 * nv1, nw2 * nv1)) * moved;
  Matrix out = partial_trace(prod, meta_dims, {1});
  return HermitianMatrix(0.5 * (out + out.adjoint().eval()));
}

std::vector<HermitianMatrix> uniform_sub_tester(int nw, int nv, int outcomes) {
  std::vector<HermitianMatrix> b;
  for (int m = 0; m < outcomes; ++m) {
    b.push_back(HermitianMatrix::identity(nw * nv) * (1.0 / (outcomes * nv)));
  }
  return b;
}

std::pair<double, std::vector<HermitianMatrix>> optimize_sub_tester(
    const std::vector<HermitianMatrix>& h, int nw, int nv, bool maximize, double conic_tol) {
  const int m_count = static_cast<int>(h.size());
  const double sign = maximize ? -1.0 : 1.0;
  PrimalSdp prog;
  std::vector<int> b_blocks;
  for (int m = 0; m < m_count; ++m) b_blocks.push_back(prog.add_psd_block(nw * nv));
  int rho = prog.add_psd_block(nv);
  for (int m = 0; m < m_count; ++m) prog.add_objective(b_blocks[m], sign * h[m].raw());
  std::vector<PrimalSdp::Term> terms;
  for (int m = 0; m < m_count; ++m) {
    terms.push_back({b_blocks[m], [](const Matrix& x) { return x; }});
  }
  terms.push_back({rho, [nw](const Matrix& r) {
                     return (-kron(Matrix::Identity(nw, nw), r)).eval();
                   }});
  prog.add_matrix_equality(terms, Matrix::Zero(nw * nv, nw * nv));
  prog.add_scalar_equality({{rho, Matrix::Identity(nv, nv)}}, 1.0);

  ConicOptions opt;
  opt.tol = conic_tol;
  auto res = prog.solve(opt);
  std::vector<HermitianMatrix> b;
  for (int m = 0; m < m_count; ++m) b.push_back(res.X[b_blocks[m]]);
  return {sign * res.value, b};
}

std::optional<SequentialCut> sequential_separation(
    const std::vector<HermitianMatrix>& deficit, const SystemLayout& layout,
    const SeparationOptions& opt,
    const std::vector<std::vector<HermitianMatrix>>& warm_sub_testers) {
  if (layout.subsystem_count() != 4) {
    throw std::invalid_argument("sequential_separation: expected a two-step layout");
  }
  const int nw2 = layout.dim(0), nv2 = layout.dim(1);
  const int d_up = nw2 * nv2, d_low = layout.dim(2) * layout.dim(3);
  const int m_count = static_cast<int>(deficit.size());

  auto a_step = [&](const std::vector<HermitianMatrix>& b, HermitianMatrix& a) {
    HermitianMatrix g = contract_upper_tester(b, deficit, layout);
    EigResult eig = eig_hermitian(g);
    a = HermitianMatrix::outer(eig.vectors.col(eig.values.size() - 1));
    return eig.values(eig.values.size() - 1);
  };
  auto b_step = [&](const HermitianMatrix& a) {
    std::vector<HermitianMatrix> h;
    std::vector<int> meta_dims = {d_up, d_low};
    for (int m = 0; m < m_count; ++m) {
      Matrix prod = kron(Matrix::Identity(d_up, d_up), a.raw()) * deficit[m].raw();
      Matrix hm = partial_trace(prod, meta_dims, {0});
      h.push_back(HermitianMatrix(0.5 * (hm + hm.adjoint().eval())));
    }
    return optimize_sub_tester(h, nw2, nv2, false, opt.conic_tol).second;
  };

  SequentialCut best;
  best.violation = 0.0;
  Rng base(opt.seed);

  auto run_from_a = [&](HermitianMatrix a) {
    double val = 0.0, prev = 1e300;
    std::vector<HermitianMatrix> b;
    for (int it = 0; it < opt.max_iterations; ++it) {
      b = b_step(a);
      val = a_step(b, a);
      if (prev - val < 1e-13 * (1.0 + std::abs(val))) break;
      prev = val;
    }
    if (val < best.violation) {
      best.violation = val;
      best.b = b;
    }
  };

  // Warm starts: polish previously useful sub-testers against this deficit.
  for (const auto& b0 : warm_sub_testers) {
    HermitianMatrix a = HermitianMatrix::identity(d_low) * (1.0 / d_low);
    a_step(b0, a);
    run_from_a(a);
  }

  for (int r = 0; r < opt.restarts; ++r) {
    Rng rng = base.spawn(r);
    HermitianMatrix a = HermitianMatrix::zero(d_low);
    if (r == 0) {
      a = HermitianMatrix::identity(d_low) * (1.0 / d_low);
    } else if (r == 1) {
      // Deterministic start: best direction against the uniform sub-tester.
      a_step(uniform_sub_tester(nw2, nv2, m_count), a);
    } else {
      a = HermitianMatrix::outer(rng.random_pure_state(d_low));
    }
    run_from_a(a);
  }

  if (best.violation < -opt.tol) return best;
  return std::nullopt;
}

std::optional<OneWayCut> one_way_separation(const std::vector<HermitianMatrix>& deficit,
                                            const SystemLayout& layout,
                                            const SeparationOptions& opt,
                                            const std::vector<HermitianMatrix>& warm_channels) {
  if (layout.subsystem_count() != 4) {
    throw std::invalid_argument("one_way_separation: expected a two-step layout");
  }
  const int nw2 = layout.dim(0), nv2 = layout.dim(1), nw1 = layout.dim(2), nv1 = layout.dim(3);
  const int m_count = static_cast<int>(deficit.size());

  OneWayCut best;
  best.violation = 0.0;
  Rng base(opt.seed);

  std::vector<HermitianMatrix> starts = warm_channels;
  starts.push_back(
      HermitianMatrix(kron(Matrix::Identity(nv2, nv2) / nv2, Matrix::Identity(nw1, nw1))));
  for (int r = 1; r < opt.restarts; ++r) {
    Rng rng = base.spawn(r);
    starts.push_back(random_channel_choi(rng, nw1, nv2));
  }

  for (HermitianMatrix sigma : starts) {
    double val = 0.0, prev = 1e300;
    int best_m = 0;
    for (int it = 0; it < opt.max_iterations; ++it) {
      // Outcome step: most negative eigendirection over m.
      double worst = 1e300;
      Vector v;
      for (int m = 0; m < m_count; ++m) {
        HermitianMatrix g = contract_oneway_channel(sigma, deficit[m], layout);
        EigResult eig = eig_hermitian(g);
        const double lam = eig.values(eig.values.size() - 1);
        if (lam < worst) {
          worst = lam;
          v = eig.vectors.col(eig.values.size() - 1);
          best_m = m;
        }
      }
      val = worst;

      // Channel step: exact Choi optimization for the fixed outcome direction.
      Matrix moved = permute_systems(deficit[best_m].raw(), layout.dims(), {1, 2, 0, 3});
      std::vector<int> meta = {nv2 * nw1, nw2 * nv1};
      Matrix prod = kron(Matrix::Identity(nv2 * nw1, nv2 * nw1), (v * v.adjoint()).eval()) * moved;
      Matrix hm = partial_trace(prod, meta, {0});
      HermitianMatrix h(0.5 * (hm + hm.adjoint().eval()));

      PrimalSdp prog;
      int s = prog.add_psd_block(nv2 * nw1);
      prog.add_objective(s, h.raw());
      prog.add_matrix_equality({{s, [nv2, nw1](const Matrix& x) {
                                   return partial_trace(x, {nv2, nw1}, {1});
                                 }}},
                               Matrix::Identity(nw1, nw1));
      ConicOptions copt;
      copt.tol = opt.conic_tol;
      auto res = prog.solve(copt);
      sigma = res.X[s];
      if (prev - val < 1e-12 * (1.0 + std::abs(val))) break;
      prev = val;
    }
    if (val < best.violation) {
      best.violation = val;
      best.sigma = sigma;
      best.outcome = best_m;
    }
  }

  if (best.violation < -opt.tol) return best;
  return std::nullopt;
}

std::optional<ConeViolator> cone_separation(const StrategyClass& c,
                                            const std::vector<HermitianMatrix>& deficit,
                                            const SystemLayout& layout, int time_steps,
                                            const SeparationOptions& opt) {
  if (deficit.empty()) throw std::invalid_argument("cone_separation: empty deficit");

  switch (c.variant()) {
    case StrategyVariant::Global:
    case StrategyVariant::FixedInput:
    case StrategyVariant::SeparableInput:
    case StrategyVariant::Nonadaptive:
    case StrategyVariant::MaxEntangled: {
      // The cone is the full PSD product: the most violated normalized
      // element is a minimum-eigenvector projector in a single slot.
      int worst_m = -1;
      double worst = -opt.tol;
      Vector vec;
      for (size_t m = 0; m < deficit.size(); ++m) {
        const double norm_scale = 1.0 + deficit[m].frobenius_norm();
        EigResult eig = eig_hermitian(deficit[m]);
        const double lam = eig.values(eig.values.size() - 1);
        if (lam < worst * norm_scale) {
          worst = lam / norm_scale;
          worst_m = static_cast<int>(m);
          vec = eig.vectors.col(eig.values.size() - 1);
        }
      }
      if (worst_m < 0) return std::nullopt;
      ConeViolator out;
      for (size_t m = 0; m < deficit.size(); ++m) {
        out.phi.push_back(static_cast<int>(m) == worst_m
                              ? HermitianMatrix::outer(vec)
                              : HermitianMatrix::zero(deficit[m].dim()));
      }
      out.violation = inner_product(out.phi[worst_m], deficit[worst_m]);
      out.identity_pairing = 1.0;
      return out;
    }
    case StrategyVariant::SequentialTwoStep: {
      auto cut = sequential_separation(deficit, layout, opt);
      if (!cut) return std::nullopt;
      HermitianMatrix g = contract_upper_tester(cut->b, deficit, layout);
      EigResult eig = eig_hermitian(g);
      Vector v = eig.vectors.col(eig.values.size() - 1);
      ConeViolator out;
      for (size_t m = 0; m < deficit.size(); ++m) {
        out.phi.push_back(kron(cut->b[m], HermitianMatrix::outer(v)));
      }
      out.violation = eig.values(eig.values.size() - 1);
      out.identity_pairing = layout.dim(0);  // tr(I_W2 ⊗ rho) * tr(vv†)
      return out;
    }
    case StrategyVariant::OneWayAB: {
      auto cut = one_way_separation(deficit, layout, opt);
      if (!cut) return std::nullopt;
      HermitianMatrix g = contract_oneway_channel(cut->sigma, deficit[cut->outcome], layout);
      EigResult eig = eig_hermitian(g);
      Vector v = eig.vectors.col(eig.values.size() - 1);
      std::vector<int> tdims = {layout.dim(1), layout.dim(2), layout.dim(0), layout.dim(3)};
      ConeViolator out;
      for (size_t m = 0; m < deficit.size(); ++m) {
        if (static_cast<int>(m) == cut->outcome) {
          Matrix term = kron(cut->sigma.raw(), (v * v.adjoint()).eval());
          out.phi.push_back(HermitianMatrix(permute_systems(term, tdims, kOneWaySwap)));
        } else {
          out.phi.push_back(HermitianMatrix::zero(deficit[m].dim()));
        }
      }
      out.violation = eig.values(eig.values.size() - 1);
      out.identity_pairing = cut->sigma.trace();
      return out;
    }
    case StrategyVariant::Custom: {
      const auto& oracles = c.oracles();
      if (!oracles.separation) {
        throw std::invalid_argument("cone_separation: custom class has no separation oracle");
      }
      return oracles.separation(deficit, opt.tol);
    }
  }
  throw std::logic_error("cone_separation: unreachable");
}

}  // namespace qpd
