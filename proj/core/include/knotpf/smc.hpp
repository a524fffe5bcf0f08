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

// Particle filter with multinomial resampling over generative Feynman-Kac models.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "knotpf/errors.hpp"
#include "knotpf/rng.hpp"

namespace knotpf {

/// Simulation interface of a Feynman-Kac model. log_potential may return -inf.
template <typename M>
concept GenerativeModel =
    requires(const M& m, const typename M::state_type& x, RngStream& rng, std::size_t p) {
      typename M::state_type;
      { m.horizon() } -> std::convertible_to<std::size_t>;
      { m.sample_initial(rng) } -> std::same_as<typename M::state_type>;
      { m.sample_transition(p, x, rng) } -> std::same_as<typename M::state_type>;
      { m.log_potential(p, x) } -> std::convertible_to<double>;
    };

/// Models that can also return G_p(x) directly let the filter skip exp() while
/// the carried weights are uniform.
template <typename M>
concept LinearPotential = requires(const M& m, const typename M::state_type& x, std::size_t p) {
  { m.potential(p, x) } -> std::convertible_to<double>;
};

class ResamplingPolicy {
 public:
  static ResamplingPolicy always() { return ResamplingPolicy(1.0, true); }
  /// Resample when ESS / N < threshold; threshold in (0, 1].
  static ResamplingPolicy adaptive(double threshold);

  bool is_always() const { return always_; }
  double threshold() const { return threshold_; }
  bool should_resample(double ess, std::size_t n) const {
    return always_ || ess < threshold_ * static_cast<double>(n);
  }

 private:
  ResamplingPolicy(double threshold, bool always) : threshold_(threshold), always_(always) {}
  double threshold_;
  bool always_;
};

struct StepDiagnostics {
  std::size_t step = 0;
  double ess = 0.0;
  double log_nc = 0.0;
  bool resampled = false;
};

struct FilterOptions {
  bool record_ancestors = false;
};

/// Terminal particle cloud of a completed run.
template <typename State>
struct ParticleSystem {
  std::vector<State> positions;
  /// Carried log-weights before the terminal potential; all zero after resampling.
  std::vector<double> log_weights;
  /// log gamma_n^N(1).
  double log_nc = 0.0;
  std::size_t step = 0;
  /// ancestors[p - 1][i] is the time p-1 parent of particle i at time p.
  std::vector<std::vector<std::uint32_t>> ancestors;
  std::vector<StepDiagnostics> diagnostics;
  std::vector<double> terminal_log_potentials;

  std::size_t size() const { return positions.size(); }
};

struct TerminalEstimates {
  double eta = 0.0;        // eta_n^N(phi)
  double gamma = 0.0;      // gamma_n^N(phi)
  double eta_hat = 0.0;    // eta_hat_n^N(phi)
  double gamma_hat = 0.0;  // gamma_hat_n^N(phi)
  double gamma_mass = 0.0;      // gamma_n^N(1)
  double gamma_hat_mass = 0.0;  // gamma_hat_n^N(1)
};

/// Effective sample size (sum w)^2 / sum w^2 from log-weights.
double ess(std::span<const double> log_weights);

/// log sum exp(x); -inf for an empty or all -inf input.
double log_sum_exp(std::span<const double> x);

/// Walker alias table for O(1) categorical draws.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights) { rebuild(weights); }

  /// Throws DegenerateWeightsError if every weight is zero.
  void rebuild(std::span<const double> weights);

  std::size_t operator()(RngStream& rng) const {
    const double u = rng.uniform() * static_cast<double>(prob_.size());
    std::size_t i = static_cast<std::size_t>(u);
    if (i >= prob_.size()) i = prob_.size() - 1;
    return (u - static_cast<double>(i)) < prob_[i] ? i : alias_[i];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
  std::vector<std::uint32_t> small_;
  std::vector<std::uint32_t> large_;
};

/// count iid draws with P(i) proportional to weights[i].
std::vector<std::size_t> categorical_sample(std::span<const double> weights, std::size_t count,
                                            RngStream& rng);

/// Runs the filter to the terminal time. Ancestors are drawn for i = 1..N and
/// then particles propagated for i = 1..N, so the result is a pure function of
/// (model, N, policy, rng state).
template <GenerativeModel M>
ParticleSystem<typename M::state_type> run_particle_filter(const M& model, std::size_t n_particles,
                                                           const ResamplingPolicy& policy,
                                                           RngStream& rng,
                                                           const FilterOptions& options = {}) {
  using State = typename M::state_type;
  if (n_particles < 1) throw DomainError("particle filter needs at least one particle");
  const std::size_t n = model.horizon();
  const double log_n = std::log(static_cast<double>(n_particles));

  ParticleSystem<State> ps;
  ps.positions.reserve(n_particles);
  for (std::size_t i = 0; i < n_particles; ++i) ps.positions.push_back(model.sample_initial(rng));
  ps.log_weights.assign(n_particles, 0.0);
  ps.diagnostics.reserve(n);

  std::vector<double> combined(n_particles);
  std::vector<double> scaled(n_particles);
  std::vector<std::uint32_t> parents(n_particles);
  std::vector<State> next;
  next.reserve(n_particles);
  AliasTable alias;
  bool uniform_weights = true;

  for (std::size_t p = 1; p <= n; ++p) {
    double top = -std::numeric_limits<double>::infinity();
    bool linear = false;
    if constexpr (LinearPotential<M>) {
      linear = uniform_weights;
    }
    if (linear) {
      if constexpr (LinearPotential<M>) {
        double largest = 0.0;
        for (std::size_t i = 0; i < n_particles; ++i) {
          scaled[i] = static_cast<double>(model.potential(p - 1, ps.positions[i]));
          largest = std::max(largest, scaled[i]);
        }
        top = std::log(largest);
        if (largest > 0.0) {
          for (std::size_t i = 0; i < n_particles; ++i) scaled[i] /= largest;
        }
      }
    } else {
      for (std::size_t i = 0; i < n_particles; ++i) {
        combined[i] = ps.log_weights[i] + model.log_potential(p - 1, ps.positions[i]);
        top = std::max(top, combined[i]);
      }
    }
    if (!(top > -std::numeric_limits<double>::infinity()) || std::isnan(top)) {
      throw DegenerateWeightsError("every particle has zero weight at step " +
                                       std::to_string(p - 1),
                                   p - 1);
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n_particles; ++i) {
      if (!linear) scaled[i] = std::exp(combined[i] - top);
      sum += scaled[i];
      sum_sq += scaled[i] * scaled[i];
    }
    const double carried = uniform_weights ? log_n : log_sum_exp(ps.log_weights);
    ps.log_nc += top + std::log(sum) - carried;
    const double step_ess = std::clamp(sum * sum / sum_sq, 1.0, static_cast<double>(n_particles));
    const bool resample = policy.should_resample(step_ess, n_particles);

    if (resample) {
      alias.rebuild(scaled);
      for (std::size_t i = 0; i < n_particles; ++i) parents[i] = static_cast<std::uint32_t>(alias(rng));
      std::fill(ps.log_weights.begin(), ps.log_weights.end(), 0.0);
      uniform_weights = true;
    } else {
      std::iota(parents.begin(), parents.end(), 0U);
      for (std::size_t i = 0; i < n_particles; ++i) {
        ps.log_weights[i] = linear ? std::log(scaled[i]) : combined[i] - top;
      }
      uniform_weights = false;
    }
    next.clear();
    for (std::size_t i = 0; i < n_particles; ++i) {
      next.push_back(model.sample_transition(p, ps.positions[parents[i]], rng));
    }
    std::swap(ps.positions, next);
    if (options.record_ancestors) ps.ancestors.push_back(parents);
    ps.diagnostics.push_back({p - 1, step_ess, ps.log_nc, resample});
  }

  ps.step = n;
  ps.terminal_log_potentials.resize(n_particles);
  for (std::size_t i = 0; i < n_particles; ++i) {
    ps.terminal_log_potentials[i] = model.log_potential(n, ps.positions[i]);
  }
  return ps;
}

template <GenerativeModel M>
ParticleSystem<typename M::state_type> run_particle_filter(const M& model, std::size_t n_particles,
                                                           const ResamplingPolicy& policy,
                                                           std::uint64_t seed,
                                                           const FilterOptions& options = {}) {
  RngStream rng(seed);
  return run_particle_filter(model, n_particles, policy, rng, options);
}

/// log gamma_hat_n^N(1). Throws DegenerateWeightsError if every terminal weight vanishes.
template <typename State>
double log_normalizing_constant(const ParticleSystem<State>& ps) {
  std::vector<double> a(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) a[i] = ps.log_weights[i] + ps.terminal_log_potentials[i];
  const double top = log_sum_exp(a);
  if (!(top > -std::numeric_limits<double>::infinity())) {
    throw DegenerateWeightsError("every terminal particle has zero weight", ps.step);
  }
  return ps.log_nc + top - log_sum_exp(ps.log_weights);
}

/// Terminal particle approximations of phi under the four terminal measures.
template <typename State, typename Phi>
  requires std::invocable<const Phi&, const State&>
TerminalEstimates estimate_terminal(const ParticleSystem<State>& ps, const Phi& phi) {
  const std::size_t count = ps.size();
  double w_top = -std::numeric_limits<double>::infinity();
  double a_top = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < count; ++i) {
    w_top = std::max(w_top, ps.log_weights[i]);
    a_top = std::max(a_top, ps.log_weights[i] + ps.terminal_log_potentials[i]);
  }
  if (!(a_top > -std::numeric_limits<double>::infinity())) {
    throw DegenerateWeightsError("every terminal particle has zero weight", ps.step);
  }
  double w_sum = 0.0, w_phi = 0.0, a_sum = 0.0, a_phi = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const double f = static_cast<double>(phi(ps.positions[i]));
    const double w = ps.log_weights[i] == w_top ? 1.0 : std::exp(ps.log_weights[i] - w_top);
    const double a = std::exp(ps.log_weights[i] + ps.terminal_log_potentials[i] - a_top);
    w_sum += w;
    w_phi += w * f;
    a_sum += a;
    a_phi += a * f;
  }
  TerminalEstimates out;
  out.eta = w_phi / w_sum;
  out.gamma = std::exp(ps.log_nc) * out.eta;
  out.eta_hat = a_phi / a_sum;
  // gamma_hat_n^N(1) = gamma_n^N(1) * sum(W_i G_i) with W normalized.
  const double log_mass = ps.log_nc + a_top + std::log(a_sum) - (w_top + std::log(w_sum));
  out.gamma_mass = std::exp(ps.log_nc);
  out.gamma_hat_mass = std::exp(log_mass);
  out.gamma_hat = out.gamma_hat_mass * out.eta_hat;
  return out;
}

/// Rows (step, ess, log_nc, resampled).
void write_diagnostics_csv(std::ostream& out, std::span<const StepDiagnostics> diagnostics);

}  // namespace knotpf
