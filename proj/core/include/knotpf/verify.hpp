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

// Seeded random-ensemble checks of the identities that knots, extensions and
// terminal knots must satisfy on finite models. Each check draws its own
// instances from (seed, check, instance), so checks can be run in isolation.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace knotpf {

struct VerifyOptions {
  std::uint64_t seed = 0x6b6e6f74ULL;
  std::size_t instances = 100;
  /// Replaces one knot of the first instance with a factorization of the wrong kernel.
  bool corrupt_knot = false;
  /// Runs only the named checks when non-empty.
  std::vector<std::string> only;
};

struct CheckResult {
  std::string name;
  std::string description;
  double tolerance = 0.0;
  std::size_t instances = 0;
  std::size_t failures = 0;
  /// Largest error metric seen over instances that completed.
  double worst_error = 0.0;
  std::optional<std::size_t> first_failure;
  std::string failure_message;
  /// JSON document (model, knots, phi) of the first failure, when model-based.
  std::string failure_case;

  bool passed() const { return failures == 0; }
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::size_t instances = 0;
  std::vector<CheckResult> checks;

  bool passed() const;
};

/// Names of every check in execution order.
std::vector<std::string> verification_checks();

/// Throws DomainError if `only` names an unknown check.
VerifyReport run_verification(const VerifyOptions& options);

}  // namespace knotpf
