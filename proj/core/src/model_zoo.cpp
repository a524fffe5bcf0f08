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

#include "knotpf/model_zoo.hpp"

#include <string>
#include <vector>

namespace knotpf {
namespace {

PotentialFn positive_expectation(const FiniteKernel& kernel, const PotentialFn& g,
                                 std::size_t p) {
  Vector v = kernel_apply(kernel, g.values());
  if (!(v.maxCoeff() > 0.0)) {
    throw DegenerateModelError("expected potential at time " + std::to_string(p) +
                               " vanishes everywhere");
  }
  return PotentialFn(std::move(v));
}

}  // namespace

FKModel binary_model(const BinaryModelParams& params) {
  const double eps = params.epsilon;
  const double delta = params.delta;
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0, 1)");
  for (int y : {params.y0, params.y1}) {
    if (y != 0 && y != 1) throw DomainError("observations must be 0 or 1");
  }
  auto potential = [eps](int y) {
    Vector g(2);
    g[y] = 1.0 - eps;
    g[1 - y] = eps;
    return PotentialFn(std::move(g));
  };
  Matrix flip(2, 2);
  flip << 1.0 - delta, delta, delta, 1.0 - delta;
  return FKModel(FiniteMeasure::uniform(2), {FiniteKernel(std::move(flip))},
                 {potential(params.y0), potential(params.y1)});
}

FKModel full_adaptation_model(const FKModel& model) {
  const std::size_t n = model.horizon();
  if (n < 1) throw DomainError("full adaptation needs horizon at least one");
  std::vector<FiniteKernel> kernels;
  std::vector<PotentialFn> potentials;
  const FiniteMeasure initial = twist_measure(model.initial(), model.potential(0));
  const double initial_mass = model.initial().integrate(model.potential(0).values());
  if (!(initial_mass > 0.0)) throw DegenerateModelError("initial potential has zero mean");

  for (std::size_t p = 0; p <= n; ++p) {
    if (p > 0) kernels.push_back(twist_kernel(model.kernel(p), model.potential(p)));
    if (p < n) {
      PotentialFn next = positive_expectation(model.kernel(p + 1), model.potential(p + 1), p + 1);
      potentials.emplace_back(p == 0 ? Vector(initial_mass * next.values()) : next.values());
    } else {
      potentials.push_back(PotentialFn::constant(model.state_size(n), 1.0));
    }
  }
  return FKModel(initial, std::move(kernels), std::move(potentials));
}

FKModel adapted_knotset_model(const FKModel& model) {
  return apply_knotset(adapted_knotset(model), model);
}

FKModel adapted_terminal_knotset_model(const FKModel& model) {
  return nc_knotset_model(model, adapted_terminal_knotset(model));
}

MarginalisedExample marginalised_example_model(const FKModel& model, std::size_t t,
                                               const FiniteKernel& marginal,
                                               const FiniteKernel& conditional) {
  Knot knot = marginalisation_knot(marginal, conditional, t);
  if (!knot_is_compatible(knot, model)) {
    throw CompatibilityError("time-" + std::to_string(t) +
                                 " kernel is not the product of the supplied parts",
                             t);
  }
  const Vector& g = model.potential(t).values();
  const Index z2_size = conditional.cols();
  const Index x_size = marginal.rows();
  Matrix twisted = conditional.matrix();
  for (Index y = 0; y < twisted.rows(); ++y) {
    const Index y1 = y / x_size;
    const Vector slice = g.segment(y1 * z2_size, z2_size);
    const double total = conditional.matrix().row(y).dot(slice);
    if (total > 0.0) twisted.row(y) = conditional.matrix().row(y).cwiseProduct(slice.transpose()) / total;
  }
  FKModel knotted = apply_knot(knot, model);
  return MarginalisedExample{std::move(knot), std::move(knotted), FiniteKernel(std::move(twisted))};
}

}  // namespace knotpf
