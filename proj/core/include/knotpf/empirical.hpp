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

// Replicated particle filters and the N * Var scaling of terminal estimators.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "knotpf/parallel.hpp"
#include "knotpf/smc.hpp"
#include "knotpf/variance.hpp"

namespace knotpf {

struct EmpiricalVarianceReport {
  std::size_t particles = 0;
  std::size_t replications = 0;
  Variant variant = Variant::predictive;
  double mean = 0.0;
  /// N times the sample variance of the per-run estimator.
  double scaled_variance = 0.0;
  /// Jackknife standard error of scaled_variance; infinite when R = 2.
  double standard_error = 0.0;
};

struct ReplicationPlan {
  std::size_t particles = 0;
  std::size_t replications = 0;
  ResamplingPolicy policy = ResamplingPolicy::always();
  std::uint64_t master_seed = 0;
  std::size_t jobs = 1;
};

/// Sample variance (denominator R - 1) and its jackknife standard error.
struct VarianceEstimate {
  double mean = 0.0;
  double variance = 0.0;
  double standard_error = 0.0;
};
VarianceEstimate sample_variance_jackknife(std::span<const double> values);

/// Runs replication r with stream (master_seed, r) and returns its terminal
/// estimates of phi. Degeneracy errors are rethrown tagged with r.
template <GenerativeModel M, typename Phi>
std::vector<TerminalEstimates> replicate_terminal_estimates(const M& model, const Phi& phi,
                                                            const ReplicationPlan& plan) {
  return parallel_map(plan.replications, plan.jobs, [&](std::size_t r) {
    RngStream rng = RngStream::derive(plan.master_seed, r);
    try {
      const auto ps = run_particle_filter(model, plan.particles, plan.policy, rng);
      return estimate_terminal(ps, phi);
    } catch (const DegenerateWeightsError& e) {
      throw e.with_replication(r);
    }
  });
}

/// Per-run value of the variant's estimator. Unnormalized variants divide by
/// `normalizer` when given, otherwise by the replication mean of gamma_n^N(1)
/// (resp. gamma_hat_n^N(1)).
std::vector<double> estimator_values(std::span<const TerminalEstimates> runs, Variant variant,
                                     std::optional<double> normalizer = {});

EmpiricalVarianceReport summarize_empirical(std::span<const TerminalEstimates> runs,
                                            Variant variant, std::size_t particles,
                                            std::optional<double> normalizer = {});

template <GenerativeModel M, typename Phi>
EmpiricalVarianceReport empirical_variance(const M& model, const Phi& phi, Variant variant,
                                           const ReplicationPlan& plan,
                                           std::optional<double> normalizer = {}) {
  if (plan.particles < 2) throw DomainError("empirical variance needs N >= 2");
  if (plan.replications < 2) throw DomainError("empirical variance needs R >= 2");
  const auto runs = replicate_terminal_estimates(model, phi, plan);
  return summarize_empirical(runs, variant, plan.particles, normalizer);
}

}  // namespace knotpf
