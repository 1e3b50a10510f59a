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

#include <json.hpp>
#include <map>
#include <optional>
#include <string>

#include "qpd/dual.hpp"
#include "qpd/primal.hpp"

namespace qpd {

inline constexpr const char* kToolVersion = "0.1.0";

struct SolverSettings {
  double tol = 1e-7;
  double violation_tol = 1e-6;
  uint64_t seed = 1;
  int restarts = 32;
  int branching = 8;
  int max_cuts = 500;
  double grid_degrees = 3.0;
};

/// Parsed problem file: layout, ensemble, strategy class, solver options.
/// Complex entries are [re, im] pairs, matrices row-major nested arrays,
/// dims ordered with the final output wire leftmost.
struct ProblemFile {
  int schema = 1;
  std::vector<int> dims;
  std::vector<std::string> labels;
  int time_steps = 1;
  std::vector<Matrix> combs;
  std::vector<double> priors;
  std::string strategy_name = "global";
  std::optional<Vector> fixed_state;
  SolverSettings options;

  SystemLayout layout() const { return SystemLayout(dims, labels); }
  DiscriminationInstance instance() const;
  StrategyClass strategy() const;
};

ProblemFile parse_problem(const std::string& path);
ProblemFile parse_problem_text(const std::string& json_text);
nlohmann::ordered_json problem_to_json(const ProblemFile& p);

nlohmann::ordered_json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::ordered_json certificate_to_json(const DualCertificate& cert);
DualCertificate certificate_from_json(const nlohmann::json& j);

struct Report {
  std::string command;
  uint64_t seed = 0;
  nlohmann::ordered_json config_echo;

  std::optional<double> primal_value;
  std::string primal_method;
  int restarts_used = 0;

  std::optional<double> dual_value;
  std::string bound_kind;
  int iterations = 0;
  int cuts = 0;
  double residual = 0.0;

  std::optional<nlohmann::ordered_json> certificate;
  std::optional<bool> globally_optimal;
  int optimality_condition = 0;
  std::string optimality_explanation;

  std::optional<double> robustness_from_value;
  std::optional<double> robustness_direct_value;

  std::optional<double> global_value;  // unrestricted reference value when computed
  bool assertions_passed = true;
  std::vector<std::string> assertion_log;
  std::map<std::string, double> timings_seconds;
};

nlohmann::ordered_json report_to_json(const Report& r);
Report report_from_json(const nlohmann::json& j);

/// format is "json" or "text".
std::string emit_report(const Report& r, const std::string& format);

}  // namespace qpd
