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

// Dense measures, kernels and functions over enumerated finite state spaces.

#include <Eigen/Dense>

#include "knotpf/errors.hpp"

namespace knotpf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Row sums of Markov kernels and masses of probability measures.
inline constexpr double kStructuralTolerance = 1e-12;

/// Non-negative weights over states. A normalized measure sums to one.
class FiniteMeasure {
 public:
  FiniteMeasure() = default;
  explicit FiniteMeasure(Vector weights, bool normalized = false);

  static FiniteMeasure point_mass(Index size, Index at);
  static FiniteMeasure uniform(Index size);

  const Vector& weights() const { return weights_; }
  Index size() const { return weights_.size(); }
  bool is_normalized() const { return normalized_; }
  double mass() const { return weights_.sum(); }

  /// mu(f).
  double integrate(const Vector& f) const;

  /// mu / mu(1). Throws DegenerateModelError on zero mass.
  FiniteMeasure normalized() const;

  /// The unnormalized measure mu * g.
  FiniteMeasure reweighted(const Vector& g) const;

  bool operator==(const FiniteMeasure& other) const;

 private:
  Vector weights_;
  bool normalized_ = false;
};

enum class KernelKind { markov, nonnegative };

/// Non-negative matrix: rows index source states, columns destinations.
class FiniteKernel {
 public:
  FiniteKernel() = default;
  explicit FiniteKernel(Matrix matrix, KernelKind kind = KernelKind::markov);

  static FiniteKernel identity(Index size);
  /// 1 x m kernel out of a singleton whose only row is mu.
  static FiniteKernel from_measure(const FiniteMeasure& mu);

  const Matrix& matrix() const { return matrix_; }
  Index rows() const { return matrix_.rows(); }
  Index cols() const { return matrix_.cols(); }
  bool is_markov() const { return kind_ == KernelKind::markov; }
  KernelKind kind() const { return kind_; }

  /// Row x as a measure over destinations.
  FiniteMeasure row(Index x) const;

  bool operator==(const FiniteKernel& other) const;

 private:
  Matrix matrix_;
  KernelKind kind_ = KernelKind::markov;
};

/// Non-negative weight function with at least one positive entry.
class PotentialFn {
 public:
  PotentialFn() = default;
  explicit PotentialFn(Vector values);

  static PotentialFn constant(Index size, double value);

  const Vector& values() const { return values_; }
  Index size() const { return values_.size(); }
  double operator[](Index x) const { return values_[x]; }

  bool operator==(const PotentialFn& other) const { return values_ == other.values_; }

 private:
  Vector values_;
};

/// Real-valued function with finite entries.
class TestFunction {
 public:
  TestFunction() = default;
  explicit TestFunction(Vector values);

  static TestFunction constant(Index size, double value);
  /// f(x) = x over {0, ..., size-1}.
  static TestFunction identity(Index size);

  const Vector& values() const { return values_; }
  Index size() const { return values_.size(); }

 private:
  Vector values_;
};

/// K(f)(x) = sum_y K(x,y) f(y).
Vector kernel_apply(const FiniteKernel& kernel, const Vector& f);

/// (mu K)(y) = sum_x mu(x) K(x,y). Normalization is inherited when K is Markov.
FiniteMeasure measure_apply(const FiniteMeasure& mu, const FiniteKernel& kernel);

/// Matrix product; Markov iff both factors are.
FiniteKernel compose(const FiniteKernel& first, const FiniteKernel& second);

/// K^H. Rows with K(H)(x) = 0 are copied from K. Requires K Markov, H >= 0.
FiniteKernel twist_kernel(const FiniteKernel& kernel, const Vector& weight);
FiniteKernel twist_kernel(const FiniteKernel& kernel, const PotentialFn& weight);

/// mu^H, normalized. Equals mu / mu(1) when mu(H) = 0.
FiniteMeasure twist_measure(const FiniteMeasure& mu, const Vector& weight);
FiniteMeasure twist_measure(const FiniteMeasure& mu, const PotentialFn& weight);

/// (first (x) second)(w, a * |B| + b) = first(w, a) second(a, b).
FiniteKernel tensor(const FiniteKernel& first, const FiniteKernel& second);

/// f (x) g as a function on A x B, index a * |B| + b.
Vector outer_product(const Vector& f, const Vector& g);

/// x -> K(f^2)(x) - K(f)(x)^2.
Vector kernel_variance(const FiniteKernel& kernel, const Vector& f);

/// x -> K(fg)(x) - K(f)(x) K(g)(x).
Vector kernel_covariance(const FiniteKernel& kernel, const Vector& f, const Vector& g);

/// Largest absolute entrywise difference; throws DimensionError on shape mismatch.
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace knotpf
