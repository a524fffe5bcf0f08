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

#include "knotpf/empirical.hpp"

#include <cmath>
#include <limits>

namespace knotpf {

VarianceEstimate sample_variance_jackknife(std::span<const double> values) {
  const std::size_t r = values.size();
  if (r < 2) throw DomainError("sample variance needs at least two values");
  const double rd = static_cast<double>(r);
  VarianceEstimate out;
  for (double v : values) out.mean += v;
  out.mean /= rd;
  double s2 = 0.0;
  for (double v : values) s2 += (v - out.mean) * (v - out.mean);
  out.variance = s2 / (rd - 1.0);
  if (r == 2) {
    out.standard_error = std::numeric_limits<double>::infinity();
    return out;
  }
  // Leave-one-out variance: (S2 - d_i^2 R / (R - 1)) / (R - 2).
  std::vector<double> loo(r);
  double loo_mean = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    const double d = values[i] - out.mean;
    loo[i] = (s2 - d * d * rd / (rd - 1.0)) / (rd - 2.0);
    loo_mean += loo[i];
  }
  loo_mean /= rd;
  double spread = 0.0;
  for (double v : loo) spread += (v - loo_mean) * (v - loo_mean);
  out.standard_error = std::sqrt((rd - 1.0) / rd * spread);
  return out;
}

std::vector<double> estimator_values(std::span<const TerminalEstimates> runs, Variant variant,
                                     std::optional<double> normalizer) {
  std::vector<double> out(runs.size());
  auto mean_of = [&](auto field) {
    double s = 0.0;
    for (const auto& e : runs) s += e.*field;
    return s / static_cast<double>(runs.size());
  };
  switch (variant) {
    case Variant::predictive: {
      const double z = normalizer.value_or(mean_of(&TerminalEstimates::gamma_mass));
      for (std::size_t i = 0; i < runs.size(); ++i) out[i] = runs[i].gamma / z;
      break;
    }
    case Variant::predictive_centered:
      for (std::size_t i = 0; i < runs.size(); ++i) out[i] = runs[i].eta;
      break;
    case Variant::updated: {
      const double z = normalizer.value_or(mean_of(&TerminalEstimates::gamma_hat_mass));
      for (std::size_t i = 0; i < runs.size(); ++i) out[i] = runs[i].gamma_hat / z;
      break;
    }
    case Variant::updated_centered:
      for (std::size_t i = 0; i < runs.size(); ++i) out[i] = runs[i].eta_hat;
      break;
  }
  return out;
}

EmpiricalVarianceReport summarize_empirical(std::span<const TerminalEstimates> runs,
                                            Variant variant, std::size_t particles,
                                            std::optional<double> normalizer) {
  const std::vector<double> values = estimator_values(runs, variant, normalizer);
  const VarianceEstimate v = sample_variance_jackknife(values);
  const double n = static_cast<double>(particles);
  return EmpiricalVarianceReport{particles, runs.size(), variant, v.mean, n * v.variance,
                                 n * v.standard_error};
}

}  // namespace knotpf
