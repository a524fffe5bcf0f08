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

#include "knotpf/finite.hpp"

#include <cmath>
#include <string>

namespace knotpf {
namespace {

std::string shape(Index r, Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

void require_non_negative(const Vector& v, const char* what) {
  for (Index i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0) || !std::isfinite(v[i])) {
      throw DomainError(std::string(what) + ": entry " + std::to_string(i) +
                        " is negative or not finite");
    }
  }
}

}  // namespace

FiniteMeasure::FiniteMeasure(Vector weights, bool normalized)
    : weights_(std::move(weights)), normalized_(normalized) {
  require_non_negative(weights_, "measure weight");
  if (normalized_ && std::abs(weights_.sum() - 1.0) > kStructuralTolerance) {
    throw DomainError("normalized measure has mass " + std::to_string(weights_.sum()));
  }
}

FiniteMeasure FiniteMeasure::point_mass(Index size, Index at) {
  if (at < 0 || at >= size) throw IndexError("point mass outside state space");
  Vector w = Vector::Zero(size);
  w[at] = 1.0;
  return FiniteMeasure(std::move(w), true);
}

FiniteMeasure FiniteMeasure::uniform(Index size) {
  if (size < 1) throw DimensionError("uniform measure needs at least one state");
  return FiniteMeasure(Vector::Constant(size, 1.0 / static_cast<double>(size)), true);
}

double FiniteMeasure::integrate(const Vector& f) const {
  if (f.size() != weights_.size()) {
    throw DimensionError("measure of size " + std::to_string(weights_.size()) +
                         " applied to function of size " + std::to_string(f.size()));
  }
  return weights_.dot(f);
}

FiniteMeasure FiniteMeasure::normalized() const {
  const double m = mass();
  if (!(m > 0.0)) throw DegenerateModelError("cannot normalize a measure of zero mass");
  if (normalized_) return *this;
  return FiniteMeasure(weights_ / m, true);
}

FiniteMeasure FiniteMeasure::reweighted(const Vector& g) const {
  if (g.size() != weights_.size()) throw DimensionError("reweighting with mismatched function");
  return FiniteMeasure(weights_.cwiseProduct(g), false);
}

bool FiniteMeasure::operator==(const FiniteMeasure& other) const {
  return normalized_ == other.normalized_ && weights_ == other.weights_;
}

FiniteKernel::FiniteKernel(Matrix matrix, KernelKind kind)
    : matrix_(std::move(matrix)), kind_(kind) {
  for (Index i = 0; i < matrix_.rows(); ++i) {
    for (Index j = 0; j < matrix_.cols(); ++j) {
      const double v = matrix_(i, j);
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw DomainError("kernel entry (" + std::to_string(i) + "," + std::to_string(j) +
                          ") is negative or not finite");
      }
    }
  }
  if (kind_ == KernelKind::markov) {
    for (Index i = 0; i < matrix_.rows(); ++i) {
      const double s = matrix_.row(i).sum();
      if (std::abs(s - 1.0) > kStructuralTolerance) {
        throw DomainError("Markov kernel row " + std::to_string(i) + " sums to " +
                          std::to_string(s));
      }
    }
  }
}

FiniteKernel FiniteKernel::identity(Index size) {
  return FiniteKernel(Matrix::Identity(size, size), KernelKind::markov);
}

FiniteKernel FiniteKernel::from_measure(const FiniteMeasure& mu) {
  return FiniteKernel(mu.weights().transpose(),
                      mu.is_normalized() ? KernelKind::markov : KernelKind::nonnegative);
}

FiniteMeasure FiniteKernel::row(Index x) const {
  if (x < 0 || x >= rows()) throw IndexError("kernel row out of range");
  return FiniteMeasure(matrix_.row(x).transpose(), is_markov());
}

bool FiniteKernel::operator==(const FiniteKernel& other) const {
  return kind_ == other.kind_ && matrix_.rows() == other.matrix_.rows() &&
         matrix_.cols() == other.matrix_.cols() && matrix_ == other.matrix_;
}

PotentialFn::PotentialFn(Vector values) : values_(std::move(values)) {
  require_non_negative(values_, "potential value");
  if (!(values_.size() > 0 && values_.maxCoeff() > 0.0)) {
    throw DomainError("potential has no positive value");
  }
}

PotentialFn PotentialFn::constant(Index size, double value) {
  return PotentialFn(Vector::Constant(size, value));
}

TestFunction::TestFunction(Vector values) : values_(std::move(values)) {
  if (!values_.allFinite()) throw DomainError("test function has a non-finite entry");
}

TestFunction TestFunction::constant(Index size, double value) {
  return TestFunction(Vector::Constant(size, value));
}

TestFunction TestFunction::identity(Index size) {
  return TestFunction(Vector::LinSpaced(size, 0.0, static_cast<double>(size - 1)));
}

Vector kernel_apply(const FiniteKernel& kernel, const Vector& f) {
  if (f.size() != kernel.cols()) {
    throw DimensionError("kernel " + shape(kernel.rows(), kernel.cols()) +
                         " applied to function of size " + std::to_string(f.size()));
  }
  return kernel.matrix() * f;
}

FiniteMeasure measure_apply(const FiniteMeasure& mu, const FiniteKernel& kernel) {
  if (mu.size() != kernel.rows()) {
    throw DimensionError("measure of size " + std::to_string(mu.size()) + " against kernel " +
                         shape(kernel.rows(), kernel.cols()));
  }
  Vector w = kernel.matrix().transpose() * mu.weights();
  if (mu.is_normalized() && kernel.is_markov()) {
    return FiniteMeasure(std::move(w), true);
  }
  return FiniteMeasure(std::move(w), false);
}

FiniteKernel compose(const FiniteKernel& first, const FiniteKernel& second) {
  if (first.cols() != second.rows()) {
    throw DimensionError("cannot compose " + shape(first.rows(), first.cols()) + " with " +
                         shape(second.rows(), second.cols()));
  }
  const bool markov = first.is_markov() && second.is_markov();
  return FiniteKernel(first.matrix() * second.matrix(),
                      markov ? KernelKind::markov : KernelKind::nonnegative);
}

FiniteKernel twist_kernel(const FiniteKernel& kernel, const Vector& weight) {
  if (weight.size() != kernel.cols()) {
    throw DimensionError("twisting function of size " + std::to_string(weight.size()) +
                         " against kernel " + shape(kernel.rows(), kernel.cols()));
  }
  if (!kernel.is_markov()) throw DomainError("only Markov kernels can be twisted");
  require_non_negative(weight, "twisting function");
  Matrix out = kernel.matrix();
  for (Index x = 0; x < out.rows(); ++x) {
    const double total = kernel.matrix().row(x).dot(weight);
    if (total > 0.0) {
      out.row(x) = kernel.matrix().row(x).cwiseProduct(weight.transpose()) / total;
    }
  }
  return FiniteKernel(std::move(out), KernelKind::markov);
}

FiniteKernel twist_kernel(const FiniteKernel& kernel, const PotentialFn& weight) {
  return twist_kernel(kernel, weight.values());
}

FiniteMeasure twist_measure(const FiniteMeasure& mu, const Vector& weight) {
  if (weight.size() != mu.size()) throw DimensionError("twisting measure with mismatched function");
  require_non_negative(weight, "twisting function");
  const double total = mu.weights().dot(weight);
  if (total > 0.0) return FiniteMeasure(mu.weights().cwiseProduct(weight) / total, true);
  return mu.normalized();
}

FiniteMeasure twist_measure(const FiniteMeasure& mu, const PotentialFn& weight) {
  return twist_measure(mu, weight.values());
}

FiniteKernel tensor(const FiniteKernel& first, const FiniteKernel& second) {
  if (first.cols() != second.rows()) {
    throw DimensionError("tensor factors " + shape(first.rows(), first.cols()) + " and " +
                         shape(second.rows(), second.cols()) + " are not composable");
  }
  const Index a_size = first.cols();
  const Index b_size = second.cols();
  Matrix out(first.rows(), a_size * b_size);
  for (Index w = 0; w < first.rows(); ++w) {
    for (Index a = 0; a < a_size; ++a) {
      out.row(w).segment(a * b_size, b_size) = first.matrix()(w, a) * second.matrix().row(a);
    }
  }
  const bool markov = first.is_markov() && second.is_markov();
  return FiniteKernel(std::move(out), markov ? KernelKind::markov : KernelKind::nonnegative);
}

Vector outer_product(const Vector& f, const Vector& g) {
  Vector out(f.size() * g.size());
  for (Index a = 0; a < f.size(); ++a) out.segment(a * g.size(), g.size()) = f[a] * g;
  return out;
}

Vector kernel_variance(const FiniteKernel& kernel, const Vector& f) {
  const Vector mean = kernel_apply(kernel, f);
  return kernel_apply(kernel, f.cwiseProduct(f)) - mean.cwiseProduct(mean);
}

Vector kernel_covariance(const FiniteKernel& kernel, const Vector& f, const Vector& g) {
  if (f.size() != g.size()) throw DimensionError("covariance of functions of unequal size");
  return kernel_apply(kernel, f.cwiseProduct(g)) -
         kernel_apply(kernel, f).cwiseProduct(kernel_apply(kernel, g));
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("comparing " + shape(a.rows(), a.cols()) + " with " +
                         shape(b.rows(), b.cols()));
  }
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace knotpf
