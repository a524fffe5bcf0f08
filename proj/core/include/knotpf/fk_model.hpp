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
#include <vector>

#include "knotpf/finite.hpp"

namespace knotpf {

/// Initial law, Markov kernels for times 1..n and potentials for times 0..n.
/// State spaces may change size from one time to the next.
class FKModel {
 public:
  FKModel(FiniteMeasure initial, std::vector<FiniteKernel> kernels,
          std::vector<PotentialFn> potentials);

  std::size_t horizon() const { return kernels_.size(); }

  const FiniteMeasure& initial() const { return initial_; }
  /// Kernel into time p, for 1 <= p <= n.
  const FiniteKernel& kernel(std::size_t p) const;
  const PotentialFn& potential(std::size_t p) const;
  const std::vector<FiniteKernel>& kernels() const { return kernels_; }
  const std::vector<PotentialFn>& potentials() const { return potentials_; }

  Index state_size(std::size_t p) const;

  /// Time-p transition as a kernel; time 0 yields a 1 x d_0 kernel out of a singleton.
  FiniteKernel transition(std::size_t p) const;

  FKModel with_initial(FiniteMeasure initial) const;
  FKModel with_kernel(std::size_t p, FiniteKernel kernel) const;
  FKModel with_potential(std::size_t p, PotentialFn potential) const;
  /// Replaces the time-p transition; a 1 x m kernel at p = 0 becomes the initial law.
  FKModel with_transition(std::size_t p, const FiniteKernel& kernel) const;

  bool operator==(const FKModel& other) const;

 private:
  void validate() const;

  FiniteMeasure initial_;
  std::vector<FiniteKernel> kernels_;
  std::vector<PotentialFn> potentials_;
};

/// Predictive and updated marginals, unnormalized and normalized, for times 0..n.
struct Marginals {
  std::vector<FiniteMeasure> gamma;
  std::vector<FiniteMeasure> gamma_hat;
  std::vector<FiniteMeasure> eta;
  std::vector<FiniteMeasure> eta_hat;

  /// gamma_hat_n(1).
  double normalizing_constant() const { return gamma_hat.back().mass(); }
};

/// Throws DegenerateModelError when some gamma_p or gamma_hat_n has zero mass.
Marginals predictive_measures(const FKModel& model);

/// Q_{p,n} for p = 0..n, with Q_{n,n} = Id.
std::vector<FiniteKernel> q_kernels(const FKModel& model);

}  // namespace knotpf
