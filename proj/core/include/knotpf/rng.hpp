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

// Reproducible random streams. Every stream is keyed by (master seed, stream id)
// and owns its engine, so results do not depend on thread scheduling.

#include <cstddef>
#include <cstdint>
#include <random>

#include <boost/random/chi_squared_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace knotpf {

/// SplitMix64 finalizer: a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class RngStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RngStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Independent stream for (master, id); distinct ids give unrelated seeds.
  static RngStream derive(std::uint64_t master, std::uint64_t id) {
    return RngStream(splitmix64(master) ^ splitmix64(id + 0x632be59bd9b4e019ULL));
  }

  /// Child stream of this one; consumes one draw.
  RngStream split() { return RngStream(next()); }

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n).
  std::size_t below(std::size_t n) {
    return boost::random::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

  double normal() { return normal_(engine_); }

  double chi_squared(double dof) {
    return boost::random::chi_squared_distribution<double>(dof)(engine_);
  }

  double gamma(double shape, double scale = 1.0) {
    return boost::random::gamma_distribution<double>(shape, scale)(engine_);
  }

  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
  boost::random::normal_distribution<double> normal_;
};

}  // namespace knotpf
