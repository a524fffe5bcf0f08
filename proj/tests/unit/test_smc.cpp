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

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "knotpf/empirical.hpp"
#include "knotpf/finite_generative.hpp"
#include "knotpf/smc.hpp"
#include "knotpf/variance.hpp"
#include "oracles/path_enumeration.hpp"
#include "support.hpp"

namespace knotpf {
namespace {

using testing::instance_rng;
using testing::vec;

// Gaussian random walk whose potential vanishes at one chosen step.
struct VanishingModel {
  using state_type = double;
  std::size_t dead_step = 1;

  std::size_t horizon() const { return 3; }
  double sample_initial(RngStream& rng) const { return rng.normal(); }
  double sample_transition(std::size_t, double x, RngStream& rng) const { return x + rng.normal(); }
  double log_potential(std::size_t p, double x) const {
    return p == dead_step ? -std::numeric_limits<double>::infinity() : -0.5 * x * x;
  }
};
static_assert(GenerativeModel<VanishingModel>);

TEST(CategoricalSample, ZeroWeightIsNeverDrawn) {
  RngStream rng(1);
  const std::vector<double> w{1.0, 0.0};
  for (std::size_t i : categorical_sample(w, 10000, rng)) EXPECT_EQ(i, 0u);
}

TEST(CategoricalSample, FrequenciesWithinBinomialError) {
  RngStream rng(2);
  const std::size_t n = 100000;
  for (const auto& [w, p] : {std::pair{std::vector<double>{2.0, 2.0}, 0.5},
                             std::pair{std::vector<double>{3.0, 1.0}, 0.75}}) {
    const auto draws = categorical_sample(w, n, rng);
    const double freq = static_cast<double>(std::count(draws.begin(), draws.end(), 0u)) / n;
    EXPECT_NEAR(freq, p, 3.0 * std::sqrt(p * (1 - p) / n));
  }
}

TEST(CategoricalSample, AllZeroWeightsThrow) {
  RngStream rng(3);
  const std::vector<double> w{0.0, 0.0};
  EXPECT_THROW(categorical_sample(w, 1, rng), DegenerateWeightsError);
}

TEST(Ess, KnownValues) {
  EXPECT_NEAR(ess(std::vector<double>(100, -3.0)), 100.0, 1e-12);
  std::vector<double> one(50, -std::numeric_limits<double>::infinity());
  one[7] = 0.0;
  EXPECT_DOUBLE_EQ(ess(one), 1.0);
  EXPECT_NEAR(ess(std::vector<double>{0.0, 0.0, std::log(2.0)}), 16.0 / 6.0, 1e-14);
}

TEST(LogSumExp, StableAndEmpty) {
  EXPECT_NEAR(log_sum_exp(std::vector<double>{1000.0, 1000.0}), 1000.0 + std::log(2.0), 1e-12);
  EXPECT_EQ(log_sum_exp(std::vector<double>{}), -std::numeric_limits<double>::infinity());
}

TEST(ResamplingPolicy, ThresholdRange) {
  EXPECT_THROW(ResamplingPolicy::adaptive(0.0), DomainError);
  EXPECT_THROW(ResamplingPolicy::adaptive(1.5), DomainError);
  EXPECT_TRUE(ResamplingPolicy::adaptive(0.5).should_resample(49.0, 100));
  EXPECT_FALSE(ResamplingPolicy::adaptive(0.5).should_resample(51.0, 100));
  EXPECT_TRUE(ResamplingPolicy::always().should_resample(100.0, 100));
}

TEST(ParticleFilter, ConstantPotentialAtTimeZeroIsExact) {
  const FKModel m(FiniteMeasure(vec({0.3, 0.7}), true), {}, {PotentialFn::constant(2, 0.37)});
  for (std::uint64_t seed : {1u, 2u}) {
    for (std::size_t n : {1u, 17u}) {
      const auto ps = run_particle_filter(finite_to_generative(m), n, ResamplingPolicy::always(), seed);
      const auto est = estimate_terminal(ps, [](std::int32_t) { return 1.0; });
      EXPECT_DOUBLE_EQ(est.gamma_hat_mass, 0.37);
      EXPECT_EQ(est.eta, 1.0);
    }
  }
}

TEST(ParticleFilter, BinaryNormalizingConstantAndFilterMean) {
  const FKModel m = testing::binary(0.25, 0.5);
  const std::size_t n = 100000;
  const auto ps = run_particle_filter(finite_to_generative(m), n, ResamplingPolicy::always(), 11);
  const auto est = estimate_terminal(ps, [](std::int32_t x) { return static_cast<double>(x); });
  const double nc_se = 0.25 * std::sqrt(asymptotic_variance(m, Vector::Ones(2), Variant::updated).total / n);
  EXPECT_NEAR(est.gamma_hat_mass, 0.25, 3 * nc_se);
  const double eta_se =
      std::sqrt(asymptotic_variance(m, testing::identity_phi(2), Variant::updated_centered).total / n);
  EXPECT_NEAR(est.eta_hat, 0.75, 3 * eta_se);
}

TEST(ParticleFilter, EmpiricalPredictiveLawConverges) {
  const FKModel m = testing::binary(0.25, 0.3);
  const std::size_t n = 100000;
  const auto ps = run_particle_filter(finite_to_generative(m), n, ResamplingPolicy::always(), 12);
  Vector counts = Vector::Zero(2);
  for (std::int32_t x : ps.positions) counts[x] += 1.0;
  const Vector exact = oracle::gamma(m, 1) / oracle::gamma(m, 1).sum();
  EXPECT_LT(0.5 * (counts / n - exact).cwiseAbs().sum(), 0.01);
}

TEST(ParticleFilter, PointMassInitialLaw) {
  const FKModel m(FiniteMeasure::point_mass(3, 2), {FiniteKernel::identity(3)},
                  {PotentialFn::constant(3, 1), PotentialFn::constant(3, 1)});
  RngStream rng(4);
  const FiniteGenerativeModel g(m);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(g.sample_initial(rng), 2);
  const auto ps = run_particle_filter(g, 50, ResamplingPolicy::always(), 5);
  for (std::int32_t x : ps.positions) EXPECT_EQ(x, 2);
}

TEST(ParticleFilter, SameSeedIsBitIdentical) {
  RngStream rng = instance_rng(40, 0);
  const FKModel m = random_model(rng);
  const auto g = finite_to_generative(m);
  for (const auto& policy : {ResamplingPolicy::always(), ResamplingPolicy::adaptive(0.5)}) {
    const auto a = run_particle_filter(g, 200, policy, 99);
    const auto b = run_particle_filter(g, 200, policy, 99);
    EXPECT_EQ(a.positions, b.positions);
    EXPECT_EQ(a.log_weights, b.log_weights);
    EXPECT_EQ(a.log_nc, b.log_nc);
  }
}

TEST(ParticleFilter, AlwaysResamplingKeepsUniformWeights) {
  const FKModel m = testing::binary(0.25, 0.3);
  const auto g = finite_to_generative(m);
  const std::size_t n = 500;
  const auto ps = run_particle_filter(g, n, ResamplingPolicy::always(), 21);
  for (double w : ps.log_weights) EXPECT_EQ(w, 0.0);
  // Replay the initial draws: the first increment is the log mean of G_0.
  RngStream replay(21);
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += m.potential(0)[g.sample_initial(replay)];
  ASSERT_EQ(ps.diagnostics.size(), 1u);
  EXPECT_NEAR(ps.diagnostics[0].log_nc, std::log(mean / n), 1e-13);
  EXPECT_TRUE(ps.diagnostics[0].resampled);
}

TEST(ParticleFilter, EssStaysInRange) {
  RngStream rng = instance_rng(41, 0);
  EnsembleShape shape;
  shape.min_horizon = shape.max_horizon = 4;
  const FKModel m = random_model(rng, shape);
  const auto ps = run_particle_filter(finite_to_generative(m), 64, ResamplingPolicy::adaptive(0.3), 8);
  for (const auto& d : ps.diagnostics) {
    EXPECT_GE(d.ess, 1.0);
    EXPECT_LE(d.ess, 64.0);
  }
}

TEST(ParticleFilter, AncestorsAreRecorded) {
  const FKModel m = testing::binary(0.25, 0.3);
  FilterOptions options;
  options.record_ancestors = true;
  RngStream rng(6);
  const auto ps = run_particle_filter(finite_to_generative(m), 30, ResamplingPolicy::always(), rng, options);
  ASSERT_EQ(ps.ancestors.size(), 1u);
  EXPECT_EQ(ps.ancestors[0].size(), 30u);
  for (auto a : ps.ancestors[0]) EXPECT_LT(a, 30u);
}

TEST(ParticleFilter, VanishingPotentialRaisesWithStep) {
  for (std::size_t dead : {0u, 2u, 3u}) {
    try {
      const auto ps = run_particle_filter(VanishingModel{dead}, 20, ResamplingPolicy::always(), 3);
      log_normalizing_constant(ps);
      FAIL() << "expected DegenerateWeightsError at step " << dead;
    } catch (const DegenerateWeightsError& e) {
      EXPECT_EQ(e.step(), std::optional<std::size_t>(dead));
    }
  }
}

TEST(ParticleFilter, ReplicationIndexIsAttached) {
  ReplicationPlan plan{20, 4, ResamplingPolicy::always(), 1, 2};
  try {
    replicate_terminal_estimates(VanishingModel{1}, [](double) { return 1.0; }, plan);
    FAIL();
  } catch (const DegenerateWeightsError& e) {
    EXPECT_EQ(e.replication(), std::optional<std::size_t>(0));
  }
}

TEST(ParticleFilter, DiagnosticsCsv) {
  const auto ps = run_particle_filter(finite_to_generative(testing::binary(0.25, 0.3)), 10,
                                      ResamplingPolicy::always(), 1);
  std::ostringstream out;
  write_diagnostics_csv(out, ps.diagnostics);
  EXPECT_EQ(out.str().rfind("step,ess,log_nc,resampled\n0,", 0), 0u);
}

TEST(Replication, UnbiasedNormalizingConstantOnRandomModels) {
  EnsembleShape shape;
  shape.max_states = 4;
  for (std::size_t i = 0; i < 8; ++i) {
    RngStream rng = instance_rng(42, i);
    const FKModel m = random_model(rng, shape);
    const ReplicationPlan plan{50, 1000, ResamplingPolicy::always(), 1000 + i, 0};
    const auto runs = replicate_terminal_estimates(finite_to_generative(m), [](std::int32_t) { return 1.0; }, plan);
    std::vector<double> nc;
    for (const auto& r : runs) nc.push_back(r.gamma_hat_mass);
    const VarianceEstimate v = sample_variance_jackknife(nc);
    EXPECT_NEAR(v.mean, oracle::normalizing_constant(m), 4 * std::sqrt(v.variance / nc.size())) << "model " << i;
  }
}

TEST(Replication, KnottedModelIsUnbiasedToo) {
  const FKModel m = testing::binary(0.25, 0.3);
  const FKModel k = adapted_knotset_model(m);
  const ReplicationPlan plan{50, 2000, ResamplingPolicy::always(), 77, 0};
  const auto runs = replicate_terminal_estimates(finite_to_generative(k), [](std::int32_t) { return 1.0; }, plan);
  std::vector<double> nc;
  for (const auto& r : runs) nc.push_back(r.gamma_hat_mass);
  const VarianceEstimate v = sample_variance_jackknife(nc);
  EXPECT_NEAR(v.mean, oracle::normalizing_constant(m), 3 * std::sqrt(v.variance / nc.size()));
}

TEST(Replication, AdaptedKnotsetHasSmallerNormalizingConstantSpread) {
  const FKModel m = testing::binary(0.25, 0.5);
  const ReplicationPlan plan{100, 1000, ResamplingPolicy::always(), 5, 0};
  const auto one = [](std::int32_t) { return 1.0; };
  auto spread = [&](const FKModel& fm) {
    const auto runs = replicate_terminal_estimates(finite_to_generative(fm), one, plan);
    std::vector<double> nc;
    for (const auto& r : runs) nc.push_back(r.gamma_hat_mass);
    return sample_variance_jackknife(nc).variance;
  };
  EXPECT_LT(spread(adapted_knotset_model(m)), spread(m));
}

TEST(Replication, ResultDoesNotDependOnWorkerCount) {
  const FKModel m = testing::binary(0.25, 0.3);
  const auto phi = [](std::int32_t x) { return static_cast<double>(x); };
  const auto a = replicate_terminal_estimates(finite_to_generative(m), phi, {100, 40, ResamplingPolicy::always(), 3, 1});
  const auto b = replicate_terminal_estimates(finite_to_generative(m), phi, {100, 40, ResamplingPolicy::always(), 3, 4});
  for (std::size_t r = 0; r < a.size(); ++r) {
    EXPECT_EQ(a[r].eta_hat, b[r].eta_hat);
    EXPECT_EQ(a[r].gamma_hat_mass, b[r].gamma_hat_mass);
  }
}

TEST(EmpiricalVariance, DeterministicModelHasNoSpread) {
  const FKModel m(FiniteMeasure::point_mass(2, 1), {FiniteKernel::identity(2)},
                  {PotentialFn::constant(2, 0.5), PotentialFn::constant(2, 2.0)});
  const auto r = empirical_variance(finite_to_generative(m), [](std::int32_t x) { return 1.0 + x; },
                                    Variant::updated_centered, {10, 20, ResamplingPolicy::always(), 1, 1});
  EXPECT_EQ(r.scaled_variance, 0.0);
  EXPECT_EQ(r.mean, 2.0);
}

TEST(EmpiricalVariance, AdaptedKnotsetBelowBootstrapAtMatchedSeeds) {
  const FKModel m = testing::binary(0.25, 0.2);
  const auto phi = [](std::int32_t x) { return static_cast<double>(x); };
  const ReplicationPlan plan{500, 2000, ResamplingPolicy::always(), 123, 0};
  const auto boot = empirical_variance(finite_to_generative(m), phi, Variant::updated_centered, plan);
  const auto knot = empirical_variance(finite_to_generative(adapted_knotset_model(m)), phi,
                                       Variant::updated_centered, plan);
  EXPECT_LT(knot.scaled_variance, boot.scaled_variance);
}

TEST(EmpiricalVariance, RequiresTwoParticlesAndReplications) {
  const auto g = finite_to_generative(testing::binary(0.25, 0.3));
  const auto phi = [](std::int32_t) { return 1.0; };
  EXPECT_THROW(empirical_variance(g, phi, Variant::updated, {1, 10, ResamplingPolicy::always(), 1, 1}), DomainError);
  EXPECT_THROW(empirical_variance(g, phi, Variant::updated, {10, 1, ResamplingPolicy::always(), 1, 1}), DomainError);
}

TEST(Jackknife, MatchesExplicitLeaveOneOut) {
  const std::vector<double> x{0.3, 1.7, -0.4, 2.2, 0.9, 1.1};
  auto sample_var = [](const std::vector<double>& v) {
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    double s = 0.0;
    for (double a : v) s += (a - mean) * (a - mean);
    return s / (v.size() - 1);
  };
  std::vector<double> loo;
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::vector<double> rest = x;
    rest.erase(rest.begin() + static_cast<long>(i));
    loo.push_back(sample_var(rest));
  }
  const double loo_mean = std::accumulate(loo.begin(), loo.end(), 0.0) / loo.size();
  double spread = 0.0;
  for (double v : loo) spread += (v - loo_mean) * (v - loo_mean);
  const double se = std::sqrt((x.size() - 1.0) / x.size() * spread);

  const VarianceEstimate est = sample_variance_jackknife(x);
  EXPECT_NEAR(est.variance, sample_var(x), 1e-14);
  EXPECT_NEAR(est.standard_error, se, 1e-13);
}

TEST(Jackknife, TwoValuesHaveInfiniteError) {
  const VarianceEstimate est = sample_variance_jackknife(std::vector<double>{1.0, 3.0});
  EXPECT_EQ(est.variance, 2.0);
  EXPECT_TRUE(std::isinf(est.standard_error));
  EXPECT_THROW(sample_variance_jackknife(std::vector<double>{1.0}), DomainError);
}

TEST(Rng, DerivedStreamsAreReproducibleAndDistinct) {
  RngStream a = RngStream::derive(5, 0);
  RngStream b = RngStream::derive(5, 0);
  RngStream c = RngStream::derive(5, 1);
  const auto x = a.next();
  EXPECT_EQ(x, b.next());
  EXPECT_NE(x, c.next());
  RngStream u(9);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

}  // namespace
}  // namespace knotpf
