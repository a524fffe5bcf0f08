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

// Exact asymptotic variances of particle estimators on finite models.

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "knotpf/knots.hpp"

namespace knotpf {

/// Which terminal estimator the variance describes.
///   predictive           gamma_n^N(phi) / gamma_n(1)
///   predictive_centered  eta_n^N(phi)
///   updated              gamma_hat_n^N(phi) / gamma_hat_n(1)
///   updated_centered     eta_hat_n^N(phi)
enum class Variant { predictive, predictive_centered, updated, updated_centered };

std::string_view to_string(Variant v);
/// Accepts the names above with '-' or '_'. Throws DomainError otherwise.
Variant parse_variant(std::string_view name);

struct VarianceReport {
  Variant variant = Variant::predictive;
  std::vector<double> terms;  // p = 0..n
  double total = 0.0;
  /// eta_n(phi) or eta_hat_n(phi); the value subtracted by centered variants.
  double centering = 0.0;
};

VarianceReport asymptotic_variance(const FKModel& model, const Vector& phi, Variant variant);

struct VarianceReduction {
  std::vector<double> terms;  // p = 0..n-1
  double total = 0.0;
};

/// Predictive variance reduction from applying a compatible knotset, computed
/// from the original model alone as a sum of kernel variances of Q_{p,n}(phi).
VarianceReduction knot_variance_reduction(const FKModel& model, const Knotset& knots,
                                          const Vector& phi);

/// Updated variance of 1 (x) psi lost by applying a terminal knot, computed
/// from the factors of the model before the knot.
double terminal_variance_difference(const ExtendedModel& model, const TerminalKnot& knot,
                                    const Vector& psi);

/// Rows (variant, p, term) followed by (variant, total, value).
void write_variance_csv(std::ostream& out, const VarianceReport& report);

}  // namespace knotpf
