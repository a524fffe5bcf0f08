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

#include "knotpf/fk_model.hpp"

#include <string>
#include <utility>

namespace knotpf {

FKModel::FKModel(FiniteMeasure initial, std::vector<FiniteKernel> kernels,
                 std::vector<PotentialFn> potentials)
    : initial_(std::move(initial)),
      kernels_(std::move(kernels)),
      potentials_(std::move(potentials)) {
  validate();
}

void FKModel::validate() const {
  if (!initial_.is_normalized()) throw DomainError("initial law must be a probability measure");
  if (initial_.size() < 1) throw DimensionError("initial state space is empty");
  if (potentials_.size() != kernels_.size() + 1) {
    throw DimensionError("expected " + std::to_string(kernels_.size() + 1) +
                         " potentials, got " + std::to_string(potentials_.size()));
  }
  Index previous = initial_.size();
  for (std::size_t p = 0; p <= kernels_.size(); ++p) {
    if (p > 0) {
      const FiniteKernel& m = kernels_[p - 1];
      if (!m.is_markov()) throw DomainError("kernel " + std::to_string(p) + " is not Markov");
      if (m.rows() != previous) {
        throw DimensionError("kernel " + std::to_string(p) + " has " +
                             std::to_string(m.rows()) + " rows, expected " +
                             std::to_string(previous));
      }
      previous = m.cols();
    }
    if (potentials_[p].size() != previous) {
      throw DimensionError("potential " + std::to_string(p) + " has size " +
                           std::to_string(potentials_[p].size()) + ", expected " +
                           std::to_string(previous));
    }
  }
}

const FiniteKernel& FKModel::kernel(std::size_t p) const {
  if (p < 1 || p > kernels_.size()) throw IndexError("kernel index " + std::to_string(p));
  return kernels_[p - 1];
}

const PotentialFn& FKModel::potential(std::size_t p) const {
  if (p >= potentials_.size()) throw IndexError("potential index " + std::to_string(p));
  return potentials_[p];
}

Index FKModel::state_size(std::size_t p) const { return potential(p).size(); }

FiniteKernel FKModel::transition(std::size_t p) const {
  return p == 0 ? FiniteKernel::from_measure(initial_) : kernel(p);
}

FKModel FKModel::with_initial(FiniteMeasure initial) const {
  return FKModel(std::move(initial), kernels_, potentials_);
}

FKModel FKModel::with_kernel(std::size_t p, FiniteKernel kernel) const {
  if (p < 1 || p > kernels_.size()) throw IndexError("kernel index " + std::to_string(p));
  auto kernels = kernels_;
  kernels[p - 1] = std::move(kernel);
  return FKModel(initial_, std::move(kernels), potentials_);
}

FKModel FKModel::with_potential(std::size_t p, PotentialFn potential) const {
  if (p >= potentials_.size()) throw IndexError("potential index " + std::to_string(p));
  auto potentials = potentials_;
  potentials[p] = std::move(potential);
  return FKModel(initial_, kernels_, std::move(potentials));
}

FKModel FKModel::with_transition(std::size_t p, const FiniteKernel& kernel) const {
  if (p > 0) return with_kernel(p, kernel);
  if (kernel.rows() != 1) throw DimensionError("initial transition must have a single row");
  return with_initial(kernel.row(0));
}

bool FKModel::operator==(const FKModel& other) const {
  return initial_ == other.initial_ && kernels_ == other.kernels_ &&
         potentials_ == other.potentials_;
}

Marginals predictive_measures(const FKModel& model) {
  const std::size_t n = model.horizon();
  Marginals out;
  out.gamma.reserve(n + 1);
  out.gamma_hat.reserve(n + 1);
  out.eta.reserve(n + 1);
  out.eta_hat.reserve(n + 1);

  FiniteMeasure gamma(model.initial().weights(), false);
  for (std::size_t p = 0; p <= n; ++p) {
    if (p > 0) gamma = measure_apply(out.gamma_hat.back(), model.kernel(p));
    if (!(gamma.mass() > 0.0)) {
      throw DegenerateModelError("predictive measure at time " + std::to_string(p) +
                                 " has zero mass");
    }
    FiniteMeasure gamma_hat = gamma.reweighted(model.potential(p).values());
    out.eta.push_back(gamma.normalized());
    out.gamma.push_back(std::move(gamma));
    if (!(gamma_hat.mass() > 0.0)) {
      throw DegenerateModelError("updated measure at time " + std::to_string(p) +
                                 " has zero mass");
    }
    out.eta_hat.push_back(gamma_hat.normalized());
    out.gamma_hat.push_back(std::move(gamma_hat));
  }
  return out;
}

std::vector<FiniteKernel> q_kernels(const FKModel& model) {
  const std::size_t n = model.horizon();
  std::vector<FiniteKernel> q(n + 1);
  q[n] = FiniteKernel::identity(model.state_size(n));
  for (std::size_t p = n; p-- > 0;) {
    Matrix step = model.potential(p).values().asDiagonal() * model.kernel(p + 1).matrix();
    q[p] = FiniteKernel(step * q[p + 1].matrix(), KernelKind::nonnegative);
  }
  return q;
}

}  // namespace knotpf
