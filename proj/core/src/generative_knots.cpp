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

#include "knotpf/generative_knots.hpp"

#include <cmath>

namespace knotpf {

FiniteKnotCapability::FiniteKnotCapability(const FKModel& model, const TerminalKnotset& knots)
    : horizon_(model.horizon()) {
  // Validates every factorization.
  (void)nc_knotset_model(model, knots);
  for (std::size_t p = 0; p <= horizon_; ++p) {
    retained_.push_back(knots[p].retained.matrix());
    twisted_.push_back(twist_kernel(knots[p].absorbed, model.potential(p)).matrix());
    log_expected_.push_back(
        kernel_apply(knots[p].absorbed, model.potential(p).values()).array().log().matrix());
  }
}

std::int32_t FiniteKnotCapability::draw_row(const Matrix& m, Index row, RngStream& rng) {
  const double u = rng.uniform();
  double running = 0.0;
  Index last = 0;
  for (Index c = 0; c < m.cols(); ++c) {
    if (m(row, c) <= 0.0) continue;
    running += m(row, c);
    last = c;
    if (u < running) return static_cast<std::int32_t>(c);
  }
  return static_cast<std::int32_t>(last);
}

FiniteKnotCapability::intermediate_type FiniteKnotCapability::sample_initial_retained(
    RngStream& rng) const {
  return draw_row(retained_[0], 0, rng);
}

FiniteKnotCapability::intermediate_type FiniteKnotCapability::sample_retained(
    std::size_t p, source_type x, RngStream& rng) const {
  return draw_row(retained_[p], x, rng);
}

double FiniteKnotCapability::log_expected_potential(std::size_t p, intermediate_type y) const {
  return log_expected_[p][y];
}

FiniteKnotCapability::source_type FiniteKnotCapability::sample_twisted(std::size_t p,
                                                                      intermediate_type y,
                                                                      RngStream& rng) const {
  return draw_row(twisted_[p], y, rng);
}

}  // namespace knotpf
