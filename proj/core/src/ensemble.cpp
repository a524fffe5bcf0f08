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

#include "knotpf/ensemble.hpp"

#include <array>
#include <utility>
#include <vector>

namespace knotpf {
namespace {

Index draw_size(RngStream& rng, std::size_t lo, std::size_t hi) {
  return static_cast<Index>(lo + rng.below(hi - lo + 1));
}

// Dirichlet(1, 1, 1) weights with one block dropped a quarter of the time.
std::array<double, 3> block_weights(RngStream& rng) {
  std::array<double, 3> w{};
  double total = 0.0;
  for (double& x : w) {
    x = rng.gamma(1.0);
    total += x;
  }
  if (rng.uniform() < 0.25) {
    const std::size_t drop = rng.below(3);
    total -= w[drop];
    w[drop] = 0.0;
  }
  for (double& x : w) x /= total;
  return w;
}

}  // namespace

FiniteKernel random_markov_kernel(Index rows, Index cols, RngStream& rng, double zero_prob) {
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const Index keep = static_cast<Index>(rng.below(static_cast<std::size_t>(cols)));
    for (Index c = 0; c < cols; ++c) {
      const bool zero = c != keep && rng.uniform() < zero_prob;
      m(r, c) = zero ? 0.0 : rng.gamma(1.0) + 1e-3;
    }
    m.row(r) /= m.row(r).sum();
    // Absorb rounding so the row sums to one as closely as doubles allow.
    m(r, keep) += 1.0 - m.row(r).sum();
  }
  return FiniteKernel(std::move(m));
}

Vector random_nonnegative(Index size, RngStream& rng, double zero_prob) {
  Vector v(size);
  const Index keep = static_cast<Index>(rng.below(static_cast<std::size_t>(size)));
  for (Index i = 0; i < size; ++i) {
    v[i] = (i != keep && rng.uniform() < zero_prob) ? 0.0 : 0.05 + rng.uniform();
  }
  return v;
}

Vector random_uniform(Index size, RngStream& rng, double lo, double hi) {
  Vector v(size);
  for (Index i = 0; i < size; ++i) v[i] = lo + (hi - lo) * rng.uniform();
  return v;
}

FKModel random_model(RngStream& rng, const EnsembleShape& shape) {
  const std::size_t n =
      shape.min_horizon + rng.below(shape.max_horizon - shape.min_horizon + 1);
  std::vector<Index> sizes;
  for (std::size_t p = 0; p <= n; ++p) sizes.push_back(draw_size(rng, shape.min_states, shape.max_states));
  const FiniteKernel start = random_markov_kernel(1, sizes[0], rng, shape.kernel_zero_probability);
  std::vector<FiniteKernel> kernels;
  for (std::size_t p = 1; p <= n; ++p) {
    kernels.push_back(
        random_markov_kernel(sizes[p - 1], sizes[p], rng, shape.kernel_zero_probability));
  }
  std::vector<PotentialFn> potentials;
  for (std::size_t p = 0; p <= n; ++p) potentials.emplace_back(random_nonnegative(sizes[p], rng));
  return FKModel(start.row(0), std::move(kernels), std::move(potentials));
}

std::pair<FiniteKernel, FiniteKernel> random_factorization(const FiniteKernel& kernel,
                                                           RngStream& rng) {
  const Matrix& m = kernel.matrix();
  const Index src = m.rows();
  const Index dst = m.cols();
  // Intermediate layout: [0, src) adapted, [src, src + dst) trivial, then 2 * src split states.
  const Index mid = src + dst + 2 * src;
  Matrix retained = Matrix::Zero(src, mid);
  Matrix absorbed = Matrix::Zero(mid, dst);
  for (Index x = 0; x < src; ++x) {
    const auto w = block_weights(rng);
    retained(x, x) = w[0];
    absorbed.row(x) = m.row(x);
    retained.row(x).segment(src, dst) = w[1] * m.row(x);

    Vector share(dst);
    for (Index z = 0; z < dst; ++z) share[z] = rng.uniform();
    const Vector first = share.cwiseProduct(m.row(x).transpose());
    const Vector second = m.row(x).transpose() - first;
    const double first_mass = first.sum();
    const double second_mass = second.sum();
    const Index a = src + dst + 2 * x;
    retained(x, a) = w[2] * first_mass;
    retained(x, a + 1) = w[2] * second_mass;
    const Vector own = m.row(x).transpose();
    absorbed.row(a) = (first_mass > 0.0 ? Vector(first / first_mass) : own).transpose();
    absorbed.row(a + 1) = (second_mass > 0.0 ? Vector(second / second_mass) : own).transpose();
  }
  for (Index y = src; y < src + dst; ++y) absorbed(y, y - src) = 1.0;
  for (Index x = 0; x < src; ++x) {
    // Absorb rounding in the largest entry so the row is Markov to within an ulp.
    Index big = 0;
    retained.row(x).maxCoeff(&big);
    retained(x, big) += 1.0 - retained.row(x).sum();
  }
  for (Index y = 0; y < mid; ++y) {
    Index big = 0;
    absorbed.row(y).maxCoeff(&big);
    absorbed(y, big) += 1.0 - absorbed.row(y).sum();
  }
  return {FiniteKernel(std::move(retained)), FiniteKernel(std::move(absorbed))};
}

Knot random_compatible_knot(const FKModel& model, std::size_t t, RngStream& rng) {
  auto [retained, absorbed] = random_factorization(model.transition(t), rng);
  return Knot(t, std::move(retained), std::move(absorbed));
}

TerminalKnot random_terminal_knot(const ExtendedModel& model, RngStream& rng) {
  auto [retained, absorbed] = random_factorization(model.factors().lead, rng);
  return TerminalKnot(std::move(retained), std::move(absorbed));
}

Knotset random_knotset(const FKModel& model, RngStream& rng) {
  std::vector<Knot> knots;
  for (std::size_t t = 0; t < model.horizon(); ++t) knots.push_back(random_compatible_knot(model, t, rng));
  return Knotset(std::move(knots));
}

TerminalKnotset random_terminal_knotset(const FKModel& model, RngStream& rng) {
  std::vector<Knot> knots;
  for (std::size_t t = 0; t <= model.horizon(); ++t) {
    knots.push_back(random_compatible_knot(model, t, rng));
  }
  return TerminalKnotset(std::move(knots));
}

}  // namespace knotpf
