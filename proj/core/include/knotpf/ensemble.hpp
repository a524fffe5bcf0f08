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

// Seeded random finite models and knots for property checks.

#include <cstddef>
#include <utility>

#include "knotpf/knots.hpp"
#include "knotpf/rng.hpp"

namespace knotpf {

struct EnsembleShape {
  std::size_t min_states = 2;
  std::size_t max_states = 5;
  std::size_t min_horizon = 1;
  std::size_t max_horizon = 4;
  /// Probability that a kernel entry is forced to zero (at least one entry per row survives).
  double kernel_zero_probability = 0.15;
};

/// Random Markov kernel with positive row sums; entries are zeroed with probability zero_prob.
FiniteKernel random_markov_kernel(Index rows, Index cols, RngStream& rng, double zero_prob = 0.0);

/// Non-negative vector with at least one positive entry; entries are zero with probability zero_prob.
Vector random_nonnegative(Index size, RngStream& rng, double zero_prob = 0.0);

/// Entries uniform on [lo, hi).
Vector random_uniform(Index size, RngStream& rng, double lo, double hi);

/// Model with strictly positive potentials, so every marginal has positive mass.
FKModel random_model(RngStream& rng, const EnsembleShape& shape = {});

/// Markov factors (R, K) with R K equal to the kernel up to rounding.
/// The intermediate space mixes three blocks: a copy of the source space
/// (adapted part), a copy of the target space (trivial part), and pairs
/// (x, j) that split each row of the kernel into two random pieces.
std::pair<FiniteKernel, FiniteKernel> random_factorization(const FiniteKernel& kernel,
                                                           RngStream& rng);

/// A knot at time t (t <= n) built from random_factorization of the time-t transition.
Knot random_compatible_knot(const FKModel& model, std::size_t t, RngStream& rng);

/// Terminal knot built from random_factorization of the lead terminal factor.
TerminalKnot random_terminal_knot(const ExtendedModel& model, RngStream& rng);

Knotset random_knotset(const FKModel& model, RngStream& rng);

/// Knots for times 0..n.
TerminalKnotset random_terminal_knotset(const FKModel& model, RngStream& rng);

}  // namespace knotpf
