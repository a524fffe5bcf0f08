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

#include "knotpf/smc.hpp"

#include <ostream>

#include "knotpf/csv.hpp"

namespace knotpf {

ResamplingPolicy ResamplingPolicy::adaptive(double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    throw DomainError("resampling threshold must lie in (0, 1]");
  }
  return ResamplingPolicy(threshold, false);
}

double log_sum_exp(std::span<const double> x) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : x) top = std::max(top, v);
  if (!(top > -std::numeric_limits<double>::infinity())) return top;
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - top);
  return top + std::log(sum);
}

double ess(std::span<const double> log_weights) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : log_weights) top = std::max(top, v);
  if (!(top > -std::numeric_limits<double>::infinity()) || std::isnan(top)) {
    throw DegenerateWeightsError("effective sample size of all-zero weights");
  }
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double v : log_weights) {
    const double w = std::exp(v - top);
    sum += w;
    sum_sq += w * w;
  }
  return std::clamp(sum * sum / sum_sq, 1.0, static_cast<double>(log_weights.size()));
}

void AliasTable::rebuild(std::span<const double> weights) {
  const std::size_t count = weights.size();
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("categorical weight is negative or not finite");
    total += w;
  }
  if (!(total > 0.0)) throw DegenerateWeightsError("categorical weights are all zero");

  prob_.resize(count);
  alias_.resize(count);
  small_.clear();
  large_.clear();
  const double scale = static_cast<double>(count) / total;
  for (std::size_t i = 0; i < count; ++i) {
    prob_[i] = weights[i] * scale;
    alias_[i] = static_cast<std::uint32_t>(i);
    (prob_[i] < 1.0 ? small_ : large_).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small_.empty() && !large_.empty()) {
    const std::uint32_t s = small_.back();
    small_.pop_back();
    const std::uint32_t l = large_.back();
    alias_[s] = l;
    prob_[l] -= 1.0 - prob_[s];
    if (prob_[l] < 1.0) {
      large_.pop_back();
      small_.push_back(l);
    }
  }
  // Leftovers differ from 1 only by rounding.
  for (std::uint32_t i : large_) prob_[i] = 1.0;
  std::uint32_t fallback = 0;
  while (!(weights[fallback] > 0.0)) ++fallback;
  for (std::uint32_t i : small_) {
    prob_[i] = weights[i] > 0.0 ? 1.0 : 0.0;
    if (!(weights[i] > 0.0)) alias_[i] = fallback;
  }
}

std::vector<std::size_t> categorical_sample(std::span<const double> weights, std::size_t count,
                                            RngStream& rng) {
  AliasTable table(weights);
  std::vector<std::size_t> out(count);
  for (auto& i : out) i = table(rng);
  return out;
}

void write_diagnostics_csv(std::ostream& out, std::span<const StepDiagnostics> diagnostics) {
  CsvWriter csv(out);
  csv.row("step", "ess", "log_nc", "resampled");
  for (const auto& d : diagnostics) csv.row(d.step, d.ess, d.log_nc, d.resampled ? 1 : 0);
}

}  // namespace knotpf
