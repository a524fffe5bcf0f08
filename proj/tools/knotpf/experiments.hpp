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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace knotpf::cli {

struct RunOutcome {
  /// Files written, relative to the output directory, in creation order.
  std::vector<std::filesystem::path> files;
  /// False only for a verification run with failing checks.
  bool passed = true;
  std::string summary;
};

/// Seed of one (grid point, filter) task; filters at the same grid point share it.
std::uint64_t task_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

RunOutcome run_binary_sweep(const ExperimentConfig& config);
RunOutcome run_binary_nc_sweep(const ExperimentConfig& config);
RunOutcome run_student_nc(const ExperimentConfig& config);
RunOutcome run_verify(const ExperimentConfig& config);
RunOutcome run_simulate_student(const ExperimentConfig& config);

RunOutcome run_experiment(const ExperimentConfig& config);

}  // namespace knotpf::cli
