/*
 * Copyright 2026 The knotpf Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Experiment configuration documents. Every document is a JSON object with
// "schema_version" and "kind"; the remaining fields depend on the kind.
// Validation errors name the offending field path.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace knotpf::cli {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { binary_sweep, binary_nc_sweep, student_nc, verify, simulate_student };

std::string_view to_string(ExperimentKind kind);
/// Throws ConfigError for unknown names.
ExperimentKind parse_kind(std::string_view name);

struct BinarySweepParams {
  std::vector<double> epsilons;
  std::vector<double> deltas;
  int y0 = 0;
  int y1 = 1;
  /// Test function values on states {0, 1}; unused by the normalizing-constant sweep.
  std::vector<double> phi{0.0, 1.0};
  std::size_t particles = 10000;
  std::size_t replications = 10000;
  bool empirical = true;
  std::vector<std::string> filters;
};

struct StudentParams {
  std::vector<std::size_t> dimensions;
  std::size_t horizon = 10;
  double dof = 4.0;
  std::size_t particles = 1024;
  std::size_t replications = 200;
  double kappa = 0.5;
  /// Directory of d<dim>.csv datasets; observations are simulated when absent.
  std::optional<std::filesystem::path> data_dir;
  std::map<std::size_t, std::uint64_t> data_seeds;
  std::vector<std::string> filters;
};

struct VerifyParams {
  std::size_t instances = 100;
  std::vector<std::string> checks;
  bool corrupt_knot = false;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::verify;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;
  std::size_t jobs = 0;
  std::variant<BinarySweepParams, StudentParams, VerifyParams> params;
  /// The validated document with command-line overrides folded in.
  nlohmann::json document;
};

struct Overrides {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::size_t> jobs;
  std::optional<std::uint64_t> seed;
  bool corrupt_knot = false;
};

/// Parses and validates a document for `expected`. Relative data paths
/// resolve against `base_dir`.
ExperimentConfig parse_config(std::string_view text, ExperimentKind expected,
                              const std::filesystem::path& base_dir);

/// Reads the file and parses it; relative data paths resolve against its directory.
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentKind expected);

void apply_overrides(ExperimentConfig& config, const Overrides& overrides);

/// Filter names accepted by each kind, in output order.
const std::vector<std::string>& known_filters(ExperimentKind kind);

}  // namespace knotpf::cli
