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

#include <cstdint>

#include <gtest/gtest.h>

#include "knotpf/ensemble.hpp"
#include "knotpf/finite.hpp"
#include "knotpf/fk_model.hpp"
#include "knotpf/model_zoo.hpp"

namespace knotpf::testing {

inline ::testing::AssertionResult matrices_near(const Matrix& a, const Matrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return ::testing::AssertionFailure() << "shape " << a.rows() << "x" << a.cols() << " vs "
                                         << b.rows() << "x" << b.cols();
  }
  const double diff = (a - b).cwiseAbs().maxCoeff();
  if (diff <= tol) return ::testing::AssertionSuccess();
  return ::testing::AssertionFailure() << "max abs diff " << diff << " exceeds " << tol << "\n"
                                       << a << "\nvs\n" << b;
}

inline Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline Matrix mat(Index rows, Index cols, std::initializer_list<double> values) {
  Matrix m(rows, cols);
  auto it = values.begin();
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = *it++;
  }
  return m;
}

/// Stream for instance i of a named property.
inline RngStream instance_rng(std::uint64_t property, std::size_t i) {
  return RngStream::derive(0x7465737473ULL ^ property, i);
}

inline FKModel binary(double epsilon, double delta) { return binary_model({epsilon, delta, 0, 1}); }

inline Vector identity_phi(Index size) { return TestFunction::identity(size).values(); }

}  // namespace knotpf::testing

namespace knotpf::testing {

inline ::testing::AssertionResult models_near(const FKModel& a, const FKModel& b, double tol) {
  if (a.horizon() != b.horizon()) {
    return ::testing::AssertionFailure() << "horizons " << a.horizon() << " and " << b.horizon();
  }
  if (auto r = matrices_near(a.initial().weights(), b.initial().weights(), tol); !r) {
    return r << " (initial law)";
  }
  for (std::size_t p = 1; p <= a.horizon(); ++p) {
    if (auto r = matrices_near(a.kernel(p).matrix(), b.kernel(p).matrix(), tol); !r) {
      return r << " (kernel " << p << ")";
    }
  }
  for (std::size_t p = 0; p <= a.horizon(); ++p) {
    if (auto r = matrices_near(a.potential(p).values(), b.potential(p).values(), tol); !r) {
      return r << " (potential " << p << ")";
    }
  }
  return ::testing::AssertionSuccess();
}

}  // namespace knotpf::testing
