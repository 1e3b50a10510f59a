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

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "qpd/certify.hpp"
#include "qpd/io.hpp"
#include "qpd/presets.hpp"
#include "qpd/robustness.hpp"

namespace {

using namespace qpd;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool verbose() {
  const char* env = std::getenv("QPD_VERBOSE");
  return env != nullptr && env[0] != '\0' && env[0] != '0';
}

struct CliOptions {
  std::string input;
  std::string format = "json";
  double tol = -1.0;
  int64_t seed = -1;
  int restarts = -1;
  int branching = -1;
  int max_cuts = -1;
};

void apply_overrides(ProblemFile& problem, const CliOptions& cli) {
  if (cli.tol > 0) problem.options.tol = cli.tol;
  if (cli.seed >= 0) problem.options.seed = static_cast<uint64_t>(cli.seed);
  if (cli.restarts > 0) problem.options.restarts = cli.restarts;
  if (cli.branching > 0) problem.options.branching = cli.branching;
  if (cli.max_cuts > 0) problem.options.max_cuts = cli.max_cuts;
}

DualOptions dual_options(const SolverSettings& s) {
  DualOptions opt;
  opt.tol = s.tol;
  opt.violation_tol = s.violation_tol;
  opt.max_cuts = s.max_cuts;
  opt.restarts = std::max(4, s.restarts / 2);
  opt.seed = s.seed;
  opt.trace = verbose();
  return opt;
}

Report base_report(const std::string& command, const ProblemFile& problem) {
  Report r;
  r.command = command;
  r.seed = problem.options.seed;
  r.config_echo = problem_to_json(problem);
  r.config_echo.erase("combs");  // echo the settings, not the payload
  return r;
}

void check(Report& r, bool ok, const std::string& what) {
  r.assertion_log.push_back((ok ? "pass: " : "FAIL: ") + what);
  r.assertions_passed = r.assertions_passed && ok;
}

int run_solve_primal(const ProblemFile& problem, const std::string& format) {
  DiscriminationInstance inst = problem.instance();
  StrategyClass cls = problem.strategy();
  Report r = base_report("solve-primal", problem);
  auto start = Clock::now();

  PrimalResult res;
  switch (cls.variant()) {
    case StrategyVariant::Global:
      res = optimize_global(inst);
      break;
    case StrategyVariant::FixedInput:
      res = optimize_fixed_input(inst, cls.fixed_state());
      break;
    case StrategyVariant::SeparableInput: {
      SeparableSearchOptions sopt;
      sopt.grid_degrees = problem.options.grid_degrees;
      sopt.seed = problem.options.seed;
      res = optimize_separable_input(inst, sopt);
      break;
    }
    case StrategyVariant::SequentialTwoStep: {
      SeesawOptions sopt;
      sopt.branching = problem.options.branching;
      sopt.restarts = problem.options.restarts;
      sopt.seed = problem.options.seed;
      res = seesaw_sequential(inst, sopt);
      break;
    }
    default:
      throw std::invalid_argument("solve-primal: no primal optimizer for class '" +
                                  to_string(cls.variant()) + "'; solve-dual gives the bound");
  }

  r.primal_value = res.value;
  r.primal_method = res.method == PrimalMethod::exact    ? "exact"
                    : res.method == PrimalMethod::seesaw ? "seesaw"
                                                         : "grid";
  r.restarts_used = res.restarts_used;
  if (res.tester) {
    auto validation = validate_tester(*res.tester, cls, 1e-6);
    check(r, validation.ok, "returned tester validates in its class");
  }
  r.timings_seconds["solve"] = seconds_since(start);
  std::fputs(emit_report(r, format).c_str(), stdout);
  return r.assertions_passed ? 0 : 1;
}

int run_solve_dual(const ProblemFile& problem, const std::string& format) {
  DiscriminationInstance inst = problem.instance();
  StrategyClass cls = problem.strategy();
  Report r = base_report("solve-dual", problem);
  auto start = Clock::now();

  DualCertificate cert = solve_dual(inst, cls, dual_options(problem.options));
  r.dual_value = cert.value;
  r.bound_kind = cert.bound_kind == DualCertificate::BoundKind::exact ? "exact" : "upper";
  r.iterations = cert.iterations;
  r.cuts = cert.cuts;
  r.residual = cert.residual;
  r.certificate = certificate_to_json(cert);

  // Cheap feasible primal side for the bracket.
  double best_primal = 0.0;
  for (uint64_t s = 0; s < 8; ++s) {
    try {
      Tester t = sample_tester(cls, inst.layout(), inst.time_steps(), inst.count(),
                               problem.options.seed + s, problem.options.branching);
      best_primal = std::max(best_primal, success_probability(inst, t));
    } catch (const std::exception&) {
      break;  // class without a sampler
    }
  }
  if (best_primal > 0.0) {
    r.primal_value = best_primal;
    r.primal_method = "grid";
    check(r, best_primal <= cert.value + 1e-6, "sampled primal respects the dual bound");
  }
  r.timings_seconds["solve"] = seconds_since(start);
  std::fputs(emit_report(r, format).c_str(), stdout);
  return r.assertions_passed ? 0 : 1;
}

int run_certify(const ProblemFile& problem, const std::string& format) {
  DiscriminationInstance inst = problem.instance();
  StrategyClass cls = problem.strategy();
  Report r = base_report("certify", problem);
  auto start = Clock::now();

  DualCertificate cert = solve_dual(inst, cls, dual_options(problem.options));
  r.dual_value = cert.value;
  r.bound_kind = cert.bound_kind == DualCertificate::BoundKind::exact ? "exact" : "upper";
  r.certificate = certificate_to_json(cert);

  GlobalOptimality verdict = check_global_optimality(cert, inst, cls);
  r.globally_optimal = verdict.globally_optimal;
  r.optimality_condition = verdict.condition;
  r.optimality_explanation = verdict.explanation;

  CertificateReplay replay = verify_certificate(cert, inst, cls);
  check(r, replay.feasible, "certificate is feasible for its class cone");
  check(r, replay.value_matches, "certificate value re-evaluates");
  r.timings_seconds["solve"] = seconds_since(start);
  std::fputs(emit_report(r, format).c_str(), stdout);
  return r.assertions_passed ? 0 : 1;
}

int run_robustness(const ProblemFile& problem, const std::string& format) {
  DiscriminationInstance inst = problem.instance();
  StrategyClass cls = problem.strategy();
  Report r = base_report("robustness", problem);
  auto start = Clock::now();

  r.robustness_from_value = robustness_from_value(inst, cls, dual_options(problem.options));
  try {
    RobustnessProblem p = discrimination_robustness_problem(inst, cls);
    RobustnessResult direct = robustness_direct(p);
    r.robustness_direct_value = direct.value;
    check(r, std::abs(*r.robustness_from_value - direct.value) <= 1e-4 * (1.0 + direct.value),
          "value route and mixing route agree");
  } catch (const std::invalid_argument&) {
    // Classes with semi-infinite cone membership only report the value route.
  }
  r.timings_seconds["solve"] = seconds_since(start);
  std::fputs(emit_report(r, format).c_str(), stdout);
  return r.assertions_passed ? 0 : 1;
}

int run_paper_example(const CliOptions& cli) {
  ProblemFile problem;
  problem.dims = {2, 2, 2, 2};
  problem.time_steps = 2;
  problem.strategy_name = "sequential";
  apply_overrides(problem, cli);
  DiscriminationInstance inst = phase_trine_instance();
  for (int m = 0; m < inst.count(); ++m) {
    problem.combs.push_back(inst.comb(m).matrix().raw());
    problem.priors.push_back(inst.prior(m));
  }
  Report r = base_report("paper-example", problem);

  auto start = Clock::now();
  DualCertificate global = solve_global_dual(inst, dual_options(problem.options));
  r.timings_seconds["global_dual"] = seconds_since(start);
  r.global_value = global.value;
  check(r, std::abs(global.value - 1.0) <= 1e-6, "unrestricted dual value is 1");
  check(r, global.comb_factor.has_value(), "unrestricted certificate factors through a comb");

  start = Clock::now();
  std::vector<HermitianMatrix> states = phase_trine_network_states();
  double worst_overlap = 0.0;
  for (size_t i = 0; i < states.size(); ++i) {
    for (size_t j = i + 1; j < states.size(); ++j) {
      worst_overlap = std::max(worst_overlap, std::abs(inner_product(states[i], states[j])));
    }
  }
  r.timings_seconds["orthogonal_network"] = seconds_since(start);
  check(r, worst_overlap <= 1e-9, "network states are pairwise orthogonal");

  start = Clock::now();
  DualCertificate seq =
      solve_dual(inst, StrategyClass::sequential_two_step(), dual_options(problem.options));
  r.timings_seconds["sequential_dual"] = seconds_since(start);
  r.dual_value = seq.value;
  r.bound_kind = "exact";
  r.iterations = seq.iterations;
  r.cuts = seq.cuts;
  r.residual = seq.residual;
  r.certificate = certificate_to_json(seq);
  check(r, std::abs(seq.value - 0.933) <= 5e-3, "sequential dual value is about 0.933");

  start = Clock::now();
  SeesawOptions sopt;
  sopt.branching = problem.options.branching;
  sopt.restarts = problem.options.restarts;
  sopt.seed = problem.options.seed;
  PrimalResult seesaw = seesaw_sequential(inst, sopt);
  r.timings_seconds["sequential_seesaw"] = seconds_since(start);
  r.primal_value = seesaw.value;
  r.primal_method = "seesaw";
  r.restarts_used = seesaw.restarts_used;
  check(r, seesaw.value <= seq.value + 1e-6, "seesaw value respects the dual bound");
  check(r, seq.value - seesaw.value <= 5e-3, "seesaw reaches the dual value");

  start = Clock::now();
  GlobalOptimality seq_verdict =
      check_global_optimality(seq, inst, StrategyClass::sequential_two_step());
  r.globally_optimal = seq_verdict.globally_optimal;
  r.optimality_condition = seq_verdict.condition;
  r.optimality_explanation = seq_verdict.explanation;
  check(r, !seq_verdict.globally_optimal, "sequential strategies fall short of the optimum");

  const double rob_global = 3.0 * global.value - 1.0;
  const double rob_seq = 3.0 * seq.value - 1.0;
  r.robustness_from_value = rob_global;
  check(r, std::abs(rob_global - 2.0) <= 1e-4, "unrestricted robustness is 2");
  check(r, std::abs(rob_seq - 1.799) <= 1.5e-2, "sequential robustness is about 1.8");
  r.timings_seconds["certify"] = seconds_since(start);

  std::fputs(emit_report(r, cli.format).c_str(), stdout);
  return r.assertions_passed ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal discrimination of quantum processes under restricted strategies"};
  app.require_subcommand(1);

  CliOptions cli;
  auto add_common = [&](CLI::App* cmd, bool needs_input) {
    if (needs_input) {
      cmd->add_option("--input", cli.input, "problem file (JSON)")->required();
    }
    cmd->add_option("--tol", cli.tol, "objective tolerance override");
    cmd->add_option("--seed", cli.seed, "seed override");
    cmd->add_option("--format", cli.format, "output format: json or text");
    cmd->add_option("--restarts", cli.restarts, "restart budget override");
    cmd->add_option("--J", cli.branching, "first-step outcome count for sequential search");
    cmd->add_option("--max-cuts", cli.max_cuts, "cutting-plane budget override");
  };

  CLI::App* primal = app.add_subcommand("solve-primal", "maximize over the strategy class");
  CLI::App* dual_cmd = app.add_subcommand("solve-dual", "solve the dual with a certificate");
  CLI::App* certify = app.add_subcommand("certify", "test the certificate for global optimality");
  CLI::App* robust = app.add_subcommand("robustness", "robustness numbers for the instance");
  CLI::App* example =
      app.add_subcommand("paper-example", "reproduce the bundled three-channel example");
  for (CLI::App* cmd : {primal, dual_cmd, certify, robust}) add_common(cmd, true);
  add_common(example, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (example->parsed()) return run_paper_example(cli);
    ProblemFile problem = parse_problem(cli.input);
    apply_overrides(problem, cli);
    if (primal->parsed()) return run_solve_primal(problem, cli.format);
    if (dual_cmd->parsed()) return run_solve_dual(problem, cli.format);
    if (certify->parsed()) return run_certify(problem, cli.format);
    if (robust->parsed()) return run_robustness(problem, cli.format);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
