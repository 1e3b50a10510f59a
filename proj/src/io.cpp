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

#include "qpd/io.hpp"

#include <fstream>
#include <sstream>

namespace qpd {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

[[noreturn]] void parse_fail(const std::string& path, const std::string& why) {
  throw std::invalid_argument(path + ": " + why);
}

const json& expect_field(const json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key)) parse_fail(path + "." + key, "missing field");
  return j.at(key);
}

Complex complex_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    parse_fail(path, "complex entries must be [re, im] pairs");
  }
  return Complex(j[0].get<double>(), j[1].get<double>());
}

}  // namespace

ordered_json matrix_to_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(row);
  }
  return rows;
}

Matrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) parse_fail(path, "expected a non-empty array of rows");
  const int rows = static_cast<int>(j.size());
  Matrix m(rows, rows);
  for (int r = 0; r < rows; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != rows) {
      parse_fail(path + "[" + std::to_string(r) + "]", "matrix must be square");
    }
    for (int c = 0; c < rows; ++c) {
      m(r, c) = complex_from_json(row[c], path + "[" + std::to_string(r) + "][" +
                                              std::to_string(c) + "]");
    }
  }
  return m;
}

DiscriminationInstance ProblemFile::instance() const {
  SystemLayout lay = layout();
  std::vector<ChoiProcess> processes;
  for (size_t m = 0; m < combs.size(); ++m) {
    try {
      processes.emplace_back(HermitianMatrix(combs[m]), lay, ProcessRole::comb_candidate);
    } catch (const std::exception& e) {
      throw std::invalid_argument("$.combs[" + std::to_string(m) + "]: " + e.what());
    }
  }
  try {
    return DiscriminationInstance(processes, priors, time_steps);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("$.combs: ") + e.what());
  }
}

StrategyClass ProblemFile::strategy() const {
  if (strategy_name == "global") return StrategyClass::global();
  if (strategy_name == "fixed-input") {
    if (!fixed_state) {
      throw std::invalid_argument("$.strategy.fixed_state: required for fixed-input");
    }
    return StrategyClass::fixed_input(*fixed_state);
  }
  if (strategy_name == "separable-input") return StrategyClass::separable_input();
  if (strategy_name == "nonadaptive") return StrategyClass::nonadaptive();
  if (strategy_name == "sequential") return StrategyClass::sequential_two_step(options.branching);
  if (strategy_name == "one-way-ab") return StrategyClass::one_way_ab();
  if (strategy_name == "max-entangled") return StrategyClass::max_entangled();
  throw std::invalid_argument("$.strategy.class: unknown class '" + strategy_name + "'");
}

ProblemFile parse_problem_text(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("$: not valid JSON: ") + e.what());
  }
  ProblemFile p;

  const json& schema = expect_field(j, "schema", "$");
  if (!schema.is_number_integer() || schema.get<int>() != 1) {
    parse_fail("$.schema", "unsupported schema version");
  }

  const json& layout = expect_field(j, "layout", "$");
  const json& dims = expect_field(layout, "dims", "$.layout");
  if (!dims.is_array() || dims.empty()) parse_fail("$.layout.dims", "expected an array");
  for (size_t i = 0; i < dims.size(); ++i) {
    if (!dims[i].is_number_integer() || dims[i].get<int>() < 1) {
      parse_fail("$.layout.dims[" + std::to_string(i) + "]", "dims must be positive integers");
    }
    p.dims.push_back(dims[i].get<int>());
  }
  if (layout.contains("labels")) {
    for (const auto& l : layout.at("labels")) p.labels.push_back(l.get<std::string>());
    if (p.labels.size() != p.dims.size()) parse_fail("$.layout.labels", "labels/dims mismatch");
  }

  const json& steps = expect_field(j, "time_steps", "$");
  if (!steps.is_number_integer() || steps.get<int>() < 1) {
    parse_fail("$.time_steps", "must be a positive integer");
  }
  p.time_steps = steps.get<int>();
  if (static_cast<int>(p.dims.size()) != 2 * p.time_steps) {
    parse_fail("$.layout.dims", "need exactly 2 * time_steps subsystems");
  }

  const json& combs = expect_field(j, "combs", "$");
  if (!combs.is_array() || combs.size() < 2) parse_fail("$.combs", "need at least two processes");
  int expected_dim = 1;
  for (int d : p.dims) expected_dim *= d;
  for (size_t m = 0; m < combs.size(); ++m) {
    Matrix cm = matrix_from_json(combs[m], "$.combs[" + std::to_string(m) + "]");
    if (cm.rows() != expected_dim) {
      parse_fail("$.combs[" + std::to_string(m) + "]", "matrix dim does not match layout");
    }
    p.combs.push_back(cm);
  }

  const json& priors = expect_field(j, "priors", "$");
  if (!priors.is_array() || priors.size() != combs.size()) {
    parse_fail("$.priors", "must list one prior per process");
  }
  double total = 0.0;
  for (size_t m = 0; m < priors.size(); ++m) {
    if (!priors[m].is_number()) parse_fail("$.priors[" + std::to_string(m) + "]", "not a number");
    const double v = priors[m].get<double>();
    if (v < 0.0) parse_fail("$.priors[" + std::to_string(m) + "]", "priors must be nonnegative");
    p.priors.push_back(v);
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) parse_fail("$.priors", "priors must sum to 1");

  if (j.contains("strategy")) {
    const json& strategy = j.at("strategy");
    p.strategy_name = expect_field(strategy, "class", "$.strategy").get<std::string>();
    if (strategy.contains("fixed_state")) {
      const json& fs = strategy.at("fixed_state");
      Vector v(fs.size());
      for (size_t i = 0; i < fs.size(); ++i) {
        v(static_cast<int>(i)) =
            complex_from_json(fs[i], "$.strategy.fixed_state[" + std::to_string(i) + "]");
      }
      const double norm = v.norm();
      if (norm < 1e-12) parse_fail("$.strategy.fixed_state", "state must be nonzero");
      p.fixed_state = v / norm;
    }
  }

  if (j.contains("options")) {
    const json& o = j.at("options");
    if (o.contains("tol")) p.options.tol = o.at("tol").get<double>();
    if (o.contains("violation_tol")) p.options.violation_tol = o.at("violation_tol").get<double>();
    if (o.contains("seed")) p.options.seed = o.at("seed").get<uint64_t>();
    if (o.contains("restarts")) p.options.restarts = o.at("restarts").get<int>();
    if (o.contains("branching")) p.options.branching = o.at("branching").get<int>();
    if (o.contains("max_cuts")) p.options.max_cuts = o.at("max_cuts").get<int>();
    if (o.contains("grid_degrees")) p.options.grid_degrees = o.at("grid_degrees").get<double>();
  }

  // Validate the full instance and class eagerly so errors surface here.
  p.instance();
  p.strategy();
  return p;
}

ProblemFile parse_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open problem file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_problem_text(buffer.str());
}

ordered_json problem_to_json(const ProblemFile& p) {
  ordered_json j;
  j["schema"] = p.schema;
  j["layout"]["dims"] = p.dims;
  if (!p.labels.empty()) j["layout"]["labels"] = p.labels;
  j["time_steps"] = p.time_steps;
  ordered_json combs = ordered_json::array();
  for (const Matrix& c : p.combs) combs.push_back(matrix_to_json(c));
  j["combs"] = combs;
  j["priors"] = p.priors;
  j["strategy"]["class"] = p.strategy_name;
  if (p.fixed_state) {
    ordered_json fs = ordered_json::array();
    for (int i = 0; i < p.fixed_state->size(); ++i) {
      fs.push_back({(*p.fixed_state)(i).real(), (*p.fixed_state)(i).imag()});
    }
    j["strategy"]["fixed_state"] = fs;
  }
  j["options"] = {{"tol", p.options.tol},
                  {"violation_tol", p.options.violation_tol},
                  {"seed", p.options.seed},
                  {"restarts", p.options.restarts},
                  {"branching", p.options.branching},
                  {"max_cuts", p.options.max_cuts},
                  {"grid_degrees", p.options.grid_degrees}};
  return j;
}

ordered_json certificate_to_json(const DualCertificate& cert) {
  ordered_json j;
  j["chi"] = matrix_to_json(cert.chi.raw());
  j["layout"] = cert.layout.dims();
  j["time_steps"] = cert.time_steps;
  j["value"] = cert.value;
  j["class"] = to_string(cert.class_variant);
  j["bound_kind"] = cert.bound_kind == DualCertificate::BoundKind::exact ? "exact" : "upper";
  if (cert.comb_factor) j["comb_factor_lambda"] = cert.comb_factor->first;
  j["iterations"] = cert.iterations;
  j["cuts"] = cert.cuts;
  j["residual"] = cert.residual;
  j["bracket"] = {cert.lower_bracket, cert.upper_bracket};
  return j;
}

DualCertificate certificate_from_json(const json& j) {
  Matrix chi = matrix_from_json(j.at("chi"), "$.chi");
  std::vector<int> dims = j.at("layout").get<std::vector<int>>();
  DualCertificate cert{HermitianMatrix(chi), SystemLayout(dims)};
  cert.time_steps = j.at("time_steps").get<int>();
  cert.value = j.at("value").get<double>();
  const std::string cls = j.at("class").get<std::string>();
  if (cls == "global") cert.class_variant = StrategyVariant::Global;
  else if (cls == "fixed-input") cert.class_variant = StrategyVariant::FixedInput;
  else if (cls == "separable-input") cert.class_variant = StrategyVariant::SeparableInput;
  else if (cls == "nonadaptive") cert.class_variant = StrategyVariant::Nonadaptive;
  else if (cls == "sequential") cert.class_variant = StrategyVariant::SequentialTwoStep;
  else if (cls == "one-way-ab") cert.class_variant = StrategyVariant::OneWayAB;
  else if (cls == "max-entangled") cert.class_variant = StrategyVariant::MaxEntangled;
  else cert.class_variant = StrategyVariant::Custom;
  cert.bound_kind = j.at("bound_kind").get<std::string>() == "upper"
                        ? DualCertificate::BoundKind::upper
                        : DualCertificate::BoundKind::exact;
  if (j.contains("iterations")) cert.iterations = j.at("iterations").get<int>();
  if (j.contains("cuts")) cert.cuts = j.at("cuts").get<int>();
  if (j.contains("residual")) cert.residual = j.at("residual").get<double>();
  if (j.contains("bracket")) {
    cert.lower_bracket = j.at("bracket")[0].get<double>();
    cert.upper_bracket = j.at("bracket")[1].get<double>();
  }
  return cert;
}

ordered_json report_to_json(const Report& r) {
  ordered_json j;
  j["schema"] = 1;
  j["command"] = r.command;
  j["tool_version"] = kToolVersion;
  j["seed"] = r.seed;
  j["config"] = r.config_echo;
  if (r.primal_value) {
    j["primal"] = {{"value", *r.primal_value},
                   {"method", r.primal_method},
                   {"restarts", r.restarts_used}};
  }
  if (r.dual_value) {
    j["dual"] = {{"value", *r.dual_value},
                 {"bound_kind", r.bound_kind},
                 {"iterations", r.iterations},
                 {"cuts", r.cuts},
                 {"residual", r.residual}};
  }
  if (r.primal_value && r.dual_value) {
    j["duality_bracket"] = {*r.primal_value, *r.dual_value};
  }
  if (r.certificate) j["certificate"] = *r.certificate;
  if (r.globally_optimal) {
    j["global_optimality"] = {{"verdict", *r.globally_optimal},
                              {"condition", r.optimality_condition},
                              {"explanation", r.optimality_explanation}};
  }
  if (r.robustness_from_value || r.robustness_direct_value) {
    ordered_json rob;
    if (r.robustness_from_value) rob["from_value"] = *r.robustness_from_value;
    if (r.robustness_direct_value) rob["direct"] = *r.robustness_direct_value;
    j["robustness"] = rob;
  }
  if (r.global_value) j["global_value"] = *r.global_value;
  j["assertions_passed"] = r.assertions_passed;
  if (!r.assertion_log.empty()) j["assertions"] = r.assertion_log;
  if (!r.timings_seconds.empty()) j["timings"] = r.timings_seconds;
  return j;
}

Report report_from_json(const json& j) {
  Report r;
  r.command = j.at("command").get<std::string>();
  r.seed = j.at("seed").get<uint64_t>();
  if (j.contains("config")) r.config_echo = j.at("config");
  if (j.contains("primal")) {
    r.primal_value = j.at("primal").at("value").get<double>();
    r.primal_method = j.at("primal").at("method").get<std::string>();
    r.restarts_used = j.at("primal").at("restarts").get<int>();
  }
  if (j.contains("dual")) {
    r.dual_value = j.at("dual").at("value").get<double>();
    r.bound_kind = j.at("dual").at("bound_kind").get<std::string>();
    r.iterations = j.at("dual").at("iterations").get<int>();
    r.cuts = j.at("dual").at("cuts").get<int>();
    r.residual = j.at("dual").at("residual").get<double>();
  }
  if (j.contains("certificate")) r.certificate = j.at("certificate");
  if (j.contains("global_optimality")) {
    r.globally_optimal = j.at("global_optimality").at("verdict").get<bool>();
    r.optimality_condition = j.at("global_optimality").at("condition").get<int>();
    r.optimality_explanation = j.at("global_optimality").at("explanation").get<std::string>();
  }
  if (j.contains("robustness")) {
    if (j.at("robustness").contains("from_value")) {
      r.robustness_from_value = j.at("robustness").at("from_value").get<double>();
    }
    if (j.at("robustness").contains("direct")) {
      r.robustness_direct_value = j.at("robustness").at("direct").get<double>();
    }
  }
  if (j.contains("global_value")) r.global_value = j.at("global_value").get<double>();
  r.assertions_passed = j.at("assertions_passed").get<bool>();
  if (j.contains("assertions")) {
    for (const auto& a : j.at("assertions")) r.assertion_log.push_back(a.get<std::string>());
  }
  if (j.contains("timings")) {
    for (auto it = j.at("timings").begin(); it != j.at("timings").end(); ++it) {
      r.timings_seconds[it.key()] = it.value().get<double>();
    }
  }
  return r;
}

std::string emit_report(const Report& r, const std::string& format) {
  if (format == "json") {
    return report_to_json(r).dump(2) + "\n";
  }
  if (format != "text") throw std::invalid_argument("emit_report: format must be json or text");

  std::ostringstream out;
  out.precision(17);
  out << "command: " << r.command << " (qpd " << kToolVersion << ", seed " << r.seed << ")\n";
  if (r.primal_value) {
    out << "primal value: " << *r.primal_value << " (" << r.primal_method << ")\n";
  }
  if (r.dual_value) {
    out << "dual value: " << *r.dual_value << " (" << r.bound_kind << ", " << r.iterations
        << " iterations, " << r.cuts << " cuts)\n";
  }
  if (r.primal_value && r.dual_value) {
    out << "duality bracket: [" << *r.primal_value << ", " << *r.dual_value << "]\n";
  }
  if (r.globally_optimal) {
    out << "globally optimal: " << (*r.globally_optimal ? "yes" : "no");
    if (*r.globally_optimal) out << " (condition " << r.optimality_condition << ")";
    out << " - " << r.optimality_explanation << "\n";
  }
  if (r.robustness_from_value) out << "robustness (from value): " << *r.robustness_from_value << "\n";
  if (r.robustness_direct_value) out << "robustness (direct): " << *r.robustness_direct_value << "\n";
  if (r.global_value) out << "global value: " << *r.global_value << "\n";
  for (const auto& line : r.assertion_log) out << "check: " << line << "\n";
  out << "assertions passed: " << (r.assertions_passed ? "yes" : "no") << "\n";
  for (const auto& [k, v] : r.timings_seconds) out << "time " << k << ": " << v << " s\n";
  return out.str();
}

}  // namespace qpd
