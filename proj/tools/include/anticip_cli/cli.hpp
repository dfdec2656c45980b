/*
 Copyright 2026 The anticip_smp Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace anticip::cli {

enum ExitCode : int { ok = 0, validation_error = 2, solver_error = 3, check_failure = 4 };

/// A config problem; the message names the offending field.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string example = "consumption";
  nlohmann::json params = nlohmann::json::object();
  std::size_t n_steps = 200;
  std::size_t n_paths = 1;
  std::uint64_t seed = 0;
  std::string estimator = "deterministic";
  int degree = 2;
  std::size_t inner_paths = 32;
  double picard_tol = 1e-12;
  std::size_t picard_max_iter = 60;
  std::optional<double> stationarity_tol;  // default 10 h scale
  double gradient_eps = 1e-4;
  double gradient_shift = 0.1;
  double gradient_tol = 1e-2;
  double duality_tol = 1e-12;
  std::size_t halvings = 4;
  std::size_t probe_count = 50;
  double probe_magnitude = 0.1;
  std::string out_dir = ".";
  std::string csv_name = "nodes.csv";
  std::string summary_name = "summary.json";
};

/// Applies a JSON document on top of the defaults and validates the result.
RunConfig parse_config(const nlohmann::json& doc);
void validate(const RunConfig& config);

/// Keys of the JSON summary, in output order.
const std::vector<std::string>& summary_keys();

/// 17 significant digits, locale independent.
std::string format_number(double x);

int run_command(const std::string& command, const RunConfig& config, std::ostream& log);

/// Entry point shared by the binary and the tests.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace anticip::cli
