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

#include "knotpf/knots.hpp"

namespace knotpf {

/// Two states, horizon one: uniform start, flip probability `delta`, and
/// potential 1 - epsilon where the state equals the observation, epsilon otherwise.
struct BinaryModelParams {
  double epsilon = 0.25;
  double delta = 0.5;
  int y0 = 0;
  int y1 = 1;
};

FKModel binary_model(const BinaryModelParams& params);

/// Twists every kernel by its own potential, including the terminal one:
/// M_p -> M_p^{G_p}, G_0 -> M_0(G_0) M_1(G_1), G_p -> M_{p+1}(G_{p+1}), G_n -> 1.
/// Requires horizon >= 1.
FKModel full_adaptation_model(const FKModel& model);

FKModel adapted_knotset_model(const FKModel& model);

/// Normalizing-constant model from the adapted knots at times 0..n.
FKModel adapted_terminal_knotset_model(const FKModel& model);

struct MarginalisedExample {
  Knot knot;
  FKModel knotted;
  /// Row (y1, y2) of the conditional kernel twisted by z2 -> G_t(y1, z2).
  FiniteKernel twisted_conditional;
};

/// Applies the marginalisation knot built from (marginal, conditional) at time
/// t. Throws CompatibilityError unless M_t is their conditional product.
MarginalisedExample marginalised_example_model(const FKModel& model, std::size_t t,
                                               const FiniteKernel& marginal,
                                               const FiniteKernel& conditional);

}  // namespace knotpf
