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
#include <vector>

#include "knotpf/fk_model.hpp"
#include "knotpf/rng.hpp"

namespace knotpf {

/// Samples a finite model row by row through cumulative tables.
class FiniteGenerativeModel {
 public:
  using state_type = std::int32_t;

  explicit FiniteGenerativeModel(const FKModel& model);

  std::size_t horizon() const { return transitions_.size() - 1; }
  state_type sample_initial(RngStream& rng) const { return draw(transitions_[0], 0, rng); }
  state_type sample_transition(std::size_t p, state_type x, RngStream& rng) const {
    return draw(transitions_[p], x, rng);
  }
  double log_potential(std::size_t p, state_type x) const { return log_potentials_[p][x]; }
  double potential(std::size_t p, state_type x) const { return potentials_[p][x]; }

 private:
  /// Row-major cumulative sums; the last positive column of a row is +inf.
  struct Table {
    std::vector<double> cumulative;
    Index cols = 0;
  };

  static state_type draw(const Table& t, state_type row, RngStream& rng);

  std::vector<Table> transitions_;
  std::vector<std::vector<double>> potentials_;
  std::vector<std::vector<double>> log_potentials_;
};

inline FiniteGenerativeModel finite_to_generative(const FKModel& model) {
  return FiniteGenerativeModel(model);
}

}  // namespace knotpf
