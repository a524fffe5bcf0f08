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

// Knots on simulation-only models. A model can be knotted when it exposes the
// three operations below; the normalizing-constant model is then assembled
// generically and never simulates the terminal twisted kernel.

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "knotpf/knots.hpp"
#include "knotpf/rng.hpp"
#include "knotpf/smc.hpp"

namespace knotpf {

/// For knots (p, R_p, K_p), p = 0..n, with source states X and intermediate states Y:
///   sample_retained(p, x, rng)        draws from R_p(x, .), p >= 1
///   sample_initial_retained(rng)      draws from R_0
///   log_expected_potential(p, y)      log K_p(G_p)(y)
///   sample_twisted(p, y, rng)         draws from K_p^{G_p}(y, .)
template <typename C>
concept KnotCapability = requires(const C& c, std::size_t p, const typename C::source_type& x,
                                  const typename C::intermediate_type& y, RngStream& rng) {
  typename C::source_type;
  typename C::intermediate_type;
  { c.horizon() } -> std::convertible_to<std::size_t>;
  { c.sample_initial_retained(rng) } -> std::same_as<typename C::intermediate_type>;
  { c.sample_retained(p, x, rng) } -> std::same_as<typename C::intermediate_type>;
  { c.log_expected_potential(p, y) } -> std::convertible_to<double>;
  { c.sample_twisted(p, y, rng) } -> std::same_as<typename C::source_type>;
};

/// M_0 = R_0, M_p = K_{p-1}^{G_{p-1}} R_p, G_p = K_p(G_p).
template <KnotCapability C>
class TerminalKnotsetModel {
 public:
  using state_type = typename C::intermediate_type;

  explicit TerminalKnotsetModel(C capability) : capability_(std::move(capability)) {}

  std::size_t horizon() const { return capability_.horizon(); }
  state_type sample_initial(RngStream& rng) const {
    return capability_.sample_initial_retained(rng);
  }
  state_type sample_transition(std::size_t p, const state_type& y, RngStream& rng) const {
    const auto x = capability_.sample_twisted(p - 1, y, rng);
    return capability_.sample_retained(p, x, rng);
  }
  double log_potential(std::size_t p, const state_type& y) const {
    return capability_.log_expected_potential(p, y);
  }

  const C& capability() const { return capability_; }

 private:
  C capability_;
};

/// Finite-engine capability for an explicit terminal knotset.
class FiniteKnotCapability {
 public:
  using source_type = std::int32_t;
  using intermediate_type = std::int32_t;

  FiniteKnotCapability(const FKModel& model, const TerminalKnotset& knots);

  std::size_t horizon() const { return horizon_; }
  intermediate_type sample_initial_retained(RngStream& rng) const;
  intermediate_type sample_retained(std::size_t p, source_type x, RngStream& rng) const;
  double log_expected_potential(std::size_t p, intermediate_type y) const;
  source_type sample_twisted(std::size_t p, intermediate_type y, RngStream& rng) const;

 private:
  static std::int32_t draw_row(const Matrix& m, Index row, RngStream& rng);

  std::size_t horizon_;
  std::vector<Matrix> retained_;
  std::vector<Matrix> twisted_;
  std::vector<Vector> log_expected_;
};

}  // namespace knotpf
