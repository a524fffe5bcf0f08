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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace knotpf {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not line up (kernel columns vs. function length, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A value is outside the domain of the operation (negative weight, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A normalising constant vanished, so normalised quantities are undefined.
class DegenerateModelError : public Error {
 public:
  using Error::Error;
};

/// A knot does not factor the kernel it is meant to replace.
class CompatibilityError : public Error {
 public:
  CompatibilityError(const std::string& what, std::optional<std::size_t> time = {})
      : Error(what), time_(time) {}

  /// Time index of the offending knot, when one is known.
  std::optional<std::size_t> time() const { return time_; }

 private:
  std::optional<std::size_t> time_;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Every particle carries zero weight. Carries the filter step and, when
/// raised from a replicated harness, the replication index.
class DegenerateWeightsError : public Error {
 public:
  explicit DegenerateWeightsError(const std::string& what,
                                  std::optional<std::size_t> step = {},
                                  std::optional<std::size_t> replication = {})
      : Error(what), step_(step), replication_(replication) {}

  std::optional<std::size_t> step() const { return step_; }
  std::optional<std::size_t> replication() const { return replication_; }

  DegenerateWeightsError with_replication(std::size_t r) const {
    return DegenerateWeightsError(
        std::string(what()) + " (replication " + std::to_string(r) + ")", step_, r);
  }

 private:
  std::optional<std::size_t> step_;
  std::optional<std::size_t> replication_;
};

/// Floating point breakdown, e.g. a covariance that lost positive definiteness.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class FileError : public Error {
 public:
  using Error::Error;
};

}  // namespace knotpf
