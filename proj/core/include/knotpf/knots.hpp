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

// Knots (t, R, K) factor the time-t transition as M_t = R K. Applying one
// moves K into the potential at time t and its twisted form into M_{t+1};
// terminal measures are preserved and asymptotic variances can only shrink.

#include <cstddef>
#include <memory>
#include <vector>

#include "knotpf/fk_model.hpp"

namespace knotpf {

inline constexpr double kCompatibilityTolerance = 1e-10;

/// A time-t knot. At t = 0 the retained part is a 1 x m kernel out of a
/// singleton, standing in for a probability measure.
struct Knot {
  std::size_t time = 0;
  FiniteKernel retained;  // R
  FiniteKernel absorbed;  // K

  Knot() = default;
  Knot(std::size_t time, FiniteKernel retained, FiniteKernel absorbed);
};

/// Knots for times 0..n-1 in time order.
class Knotset {
 public:
  Knotset() = default;
  explicit Knotset(std::vector<Knot> knots);

  std::size_t size() const { return knots_.size(); }
  const Knot& operator[](std::size_t t) const { return knots_.at(t); }
  const std::vector<Knot>& knots() const { return knots_; }
  auto begin() const { return knots_.begin(); }
  auto end() const { return knots_.end(); }

 private:
  std::vector<Knot> knots_;
};

/// Terminal-time knot acting on the first factor of a factored terminal kernel.
struct TerminalKnot {
  FiniteKernel retained;
  FiniteKernel absorbed;

  TerminalKnot() = default;
  TerminalKnot(FiniteKernel retained, FiniteKernel absorbed);
};

/// R K == M_t within tol. Throws IndexError for t >= n and DimensionError on shape mismatch.
bool knot_is_compatible(const Knot& knot, const FKModel& model,
                        double tol = kCompatibilityTolerance);

FKModel apply_knot(const Knot& knot, const FKModel& model);

/// Closed form of applying knots n-1, ..., 0 in turn.
FKModel apply_knotset(const Knotset& knots, const FKModel& model);

/// Descending-time sequential application; agrees with apply_knotset.
FKModel apply_knotset_sequentially(const Knotset& knots, const FKModel& model);

Knot trivial_knot(const FKModel& model, std::size_t t);
Knot adapted_knot(const FKModel& model, std::size_t t);
Knotset trivial_knotset(const FKModel& model);
Knotset adapted_knotset(const FKModel& model);

/// Knotset for ks * model whose application yields adapted_knotset(model) * model.
Knotset complete_knotset(const Knotset& knots, const FKModel& model);

/// Models M_0 = model, M_{t+1} = adapted_knot(M_t, t) * M_t for t < n.
std::vector<FKModel> adapted_knot_sequence(const FKModel& model);

/// Terminal kernel M_n = lead (x) trail over A x B and terminal potential
/// G_n = weight (x) target^{-1}, where target^{-1} vanishes on the zeros of target.
struct TerminalFactors {
  FiniteKernel lead;   // X_{n-1} -> A
  FiniteKernel trail;  // A -> B
  Vector weight;       // on A
  Vector target;       // on B

  FiniteKernel kernel() const { return tensor(lead, trail); }
  Vector potential() const;
};

/// A model whose terminal transition carries TerminalFactors, tied to the
/// reference model it was extended from.
class ExtendedModel {
 public:
  ExtendedModel(FKModel model, TerminalFactors factors, std::shared_ptr<const FKModel> reference);

  const FKModel& model() const { return model_; }
  const TerminalFactors& factors() const { return factors_; }
  const FKModel& reference() const { return *reference_; }
  const std::shared_ptr<const FKModel>& reference_ptr() const { return reference_; }

  /// 1 (x) psi on the terminal product space.
  Vector lift(const Vector& psi) const;

 private:
  FKModel model_;
  TerminalFactors factors_;
  std::shared_ptr<const FKModel> reference_;
};

/// Duplicates the terminal coordinate with lead = M_n, trail = Id, weight = G_n * target.
/// Requires n >= 1, target >= 0 and target > 0 wherever gamma_hat_n charges.
ExtendedModel phi_extend(const FKModel& model, const Vector& target);

/// Standard knots keep the terminal factorization; a knot at n-1 twists it into lead.
ExtendedModel apply_knot(const Knot& knot, const ExtendedModel& model);
ExtendedModel apply_knotset(const Knotset& knots, const ExtendedModel& model);

/// Applies adapted_knot(current, t) for t = 0..n-1 in turn, collapsing every
/// state space before n to a singleton.
ExtendedModel adapt_sequentially(const ExtendedModel& model);

bool terminal_knot_is_compatible(const TerminalKnot& knot, const ExtendedModel& model,
                                 double tol = kCompatibilityTolerance);
ExtendedModel apply_terminal_knot(const TerminalKnot& knot, const ExtendedModel& model);

TerminalKnot adapted_terminal_knot(const ExtendedModel& model);
TerminalKnot trivial_terminal_knot(const ExtendedModel& model);

/// Knots for times 0..n, the last with R_n K_n = M_n.
class TerminalKnotset {
 public:
  TerminalKnotset() = default;
  explicit TerminalKnotset(std::vector<Knot> knots);

  std::size_t size() const { return knots_.size(); }
  const Knot& operator[](std::size_t t) const { return knots_.at(t); }
  const std::vector<Knot>& knots() const { return knots_; }

 private:
  std::vector<Knot> knots_;
};

TerminalKnotset adapted_terminal_knotset(const FKModel& model);
TerminalKnotset trivial_terminal_knotset(const FKModel& model);

/// Normalizing-constant model: M_0 = R_0, M_p = K_{p-1}^{G_{p-1}} R_p, G_p = K_p(G_p).
/// Its gamma_hat_n(1) equals that of the input model.
FKModel nc_knotset_model(const FKModel& model, const TerminalKnotset& knots);

/// Product kernel x -> (z1, z2) with first(x, z1) * second((z1, x), z2), index z1 * |Z2| + z2.
/// Rows of `second` are indexed z1 * |X| + x.
FiniteKernel conditional_product(const FiniteKernel& first, const FiniteKernel& second);

/// R(x, (y1, y2)) = U(x, y1) [y2 = x], K((y1, y2), (z1, z2)) = [z1 = y1] V((y1, y2), z2).
/// Intermediate states are indexed y1 * |X| + y2.
Knot marginalisation_knot(const FiniteKernel& marginal, const FiniteKernel& conditional,
                          std::size_t t);

}  // namespace knotpf
