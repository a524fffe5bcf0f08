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

#include <benchmark/benchmark.h>

#include "knotpf/ensemble.hpp"
#include "knotpf/finite_generative.hpp"
#include "knotpf/model_zoo.hpp"
#include "knotpf/smc.hpp"
#include "knotpf/student_ssm.hpp"
#include "knotpf/variance.hpp"
#include "knotpf/verify.hpp"

namespace knotpf {
namespace {

void BM_BinaryParticleFilter(benchmark::State& state) {
  const FKModel model = binary_model({0.25, 0.3, 0, 1});
  const FiniteGenerativeModel generative = finite_to_generative(model);
  const auto particles = static_cast<std::size_t>(state.range(0));
  RngStream rng(1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_particle_filter(generative, particles, ResamplingPolicy::always(), rng));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BinaryParticleFilter)->Arg(1 << 10)->Arg(1 << 14);

void BM_StudentKnotsetFilter(benchmark::State& state) {
  const StudentSSMParams params = StudentSSMParams::standard(static_cast<std::size_t>(state.range(0)), 3);
  const ObservationRecord obs = simulate_observations(params);
  const auto model = student_knot_model(params, obs);
  RngStream rng(2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_particle_filter(model, 1024, ResamplingPolicy::adaptive(0.5), rng));
  }
}
BENCHMARK(BM_StudentKnotsetFilter)->Arg(1)->Arg(5);

void BM_ExactVariance(benchmark::State& state) {
  RngStream rng(3);
  EnsembleShape shape;
  shape.min_states = shape.max_states = static_cast<std::size_t>(state.range(0));
  shape.min_horizon = shape.max_horizon = 8;
  const FKModel model = random_model(rng, shape);
  const Vector phi = random_uniform(model.state_size(model.horizon()), rng, -1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(asymptotic_variance(model, phi, Variant::updated_centered));
  }
}
BENCHMARK(BM_ExactVariance)->Arg(4)->Arg(32);

void BM_VerifyEnsemble(benchmark::State& state) {
  VerifyOptions options;
  options.instances = 10;
  for (auto _ : state) benchmark::DoNotOptimize(run_verification(options));
}
BENCHMARK(BM_VerifyEnsemble)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace knotpf
BENCHMARK_MAIN();
