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

#include "knotpf/finite_generative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace knotpf {

FiniteGenerativeModel::FiniteGenerativeModel(const FKModel& model) {
  const std::size_t n = model.horizon();
  transitions_.reserve(n + 1);
  for (std::size_t p = 0; p <= n; ++p) {
    const FiniteKernel transition = model.transition(p);
    const Matrix& m = transition.matrix();
    Table t;
    t.cols = m.cols();
    t.cumulative.resize(static_cast<std::size_t>(m.rows() * m.cols()));
    for (Index r = 0; r < m.rows(); ++r) {
      double running = 0.0;
      Index last_positive = 0;
      for (Index c = 0; c < m.cols(); ++c) {
        running += m(r, c);
        if (m(r, c) > 0.0) last_positive = c;
        t.cumulative[static_cast<std::size_t>(r * m.cols() + c)] = running;
      }
      for (Index c = last_positive; c < m.cols(); ++c) {
        t.cumulative[static_cast<std::size_t>(r * m.cols() + c)] =
            std::numeric_limits<double>::infinity();
      }
    }
    transitions_.push_back(std::move(t));

    const Vector& g = model.potential(p).values();
    std::vector<double> lg(static_cast<std::size_t>(g.size()));
    for (Index x = 0; x < g.size(); ++x) lg[static_cast<std::size_t>(x)] = std::log(g[x]);
    log_potentials_.push_back(std::move(lg));
    potentials_.emplace_back(g.data(), g.data() + g.size());
  }
}

FiniteGenerativeModel::state_type FiniteGenerativeModel::draw(const Table& t, state_type row,
                                                              RngStream& rng) {
  const double u = rng.uniform();
  const auto first = t.cumulative.begin() + static_cast<std::ptrdiff_t>(row) * t.cols;
  const auto last = first + t.cols;
  auto it = first;
  while (it != last && *it <= u) ++it;
  return static_cast<state_type>(it - first);
}

}  // namespace knotpf
