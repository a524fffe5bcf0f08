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

#include "knotpf/variance.hpp"

#include <ostream>
#include <string>

#include "knotpf/csv.hpp"

namespace knotpf {
namespace {

// v_{p,n}(f) = gamma_p(1) gamma_p((Q_{p,n} f)^2) / gamma_n(1)^2 - eta_n(f)^2.
std::vector<double> predictive_terms(const Marginals& m, const std::vector<FiniteKernel>& q,
                                     const Vector& f) {
  const std::size_t n = q.size() - 1;
  const double gn = m.gamma[n].mass();
  const double mean = m.eta[n].integrate(f);
  std::vector<double> terms(n + 1);
  for (std::size_t p = 0; p <= n; ++p) {
    const Vector qf = kernel_apply(q[p], f);
    terms[p] = m.gamma[p].mass() * m.gamma[p].integrate(qf.cwiseProduct(qf)) / (gn * gn) -
               mean * mean;
  }
  return terms;
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::predictive: return "predictive";
    case Variant::predictive_centered: return "predictive-centered";
    case Variant::updated: return "updated";
    case Variant::updated_centered: return "updated-centered";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  std::string s(name);
  for (char& c : s) {
    if (c == '_') c = '-';
  }
  if (s == "predictive") return Variant::predictive;
  if (s == "predictive-centered") return Variant::predictive_centered;
  if (s == "updated") return Variant::updated;
  if (s == "updated-centered") return Variant::updated_centered;
  throw DomainError("unknown variance variant '" + std::string(name) + "'");
}

VarianceReport asymptotic_variance(const FKModel& model, const Vector& phi, Variant variant) {
  const std::size_t n = model.horizon();
  if (phi.size() != model.state_size(n)) throw DimensionError("test function has wrong size");
  const Marginals m = predictive_measures(model);
  const std::vector<FiniteKernel> q = q_kernels(model);
  const Vector& g = model.potential(n).values();

  VarianceReport report;
  report.variant = variant;
  switch (variant) {
    case Variant::predictive:
      report.centering = m.eta[n].integrate(phi);
      report.terms = predictive_terms(m, q, phi);
      break;
    case Variant::predictive_centered: {
      report.centering = m.eta[n].integrate(phi);
      report.terms = predictive_terms(m, q, phi.array() - report.centering);
      break;
    }
    case Variant::updated:
    case Variant::updated_centered: {
      const double eta_g = m.eta[n].integrate(g);
      if (!(eta_g > 0.0)) throw DegenerateModelError("terminal potential has zero mean");
      report.centering = m.eta_hat[n].integrate(phi);
      const Vector f = variant == Variant::updated
                           ? Vector(g.cwiseProduct(phi))
                           : Vector(g.cwiseProduct((phi.array() - report.centering).matrix()));
      report.terms = predictive_terms(m, q, f);
      for (double& t : report.terms) t /= eta_g * eta_g;
      break;
    }
  }
  report.total = 0.0;
  for (double t : report.terms) report.total += t;
  return report;
}

VarianceReduction knot_variance_reduction(const FKModel& model, const Knotset& knots,
                                          const Vector& phi) {
  const std::size_t n = model.horizon();
  if (knots.size() != n) throw DimensionError("knotset size differs from horizon");
  if (phi.size() != model.state_size(n)) throw DimensionError("test function has wrong size");
  for (const Knot& k : knots) {
    if (!knot_is_compatible(k, model)) {
      throw CompatibilityError("knot at time " + std::to_string(k.time) +
                                   " does not factor the model transition",
                               k.time);
    }
  }
  const Marginals m = predictive_measures(model);
  const std::vector<FiniteKernel> q = q_kernels(model);
  const double gn = m.gamma[n].mass();

  VarianceReduction out;
  out.terms.resize(n);
  for (std::size_t p = 0; p < n; ++p) {
    const Knot& k = knots[p];
    // nu_0 = R_0, nu_p = eta_hat_{p-1} R_p.
    const FiniteMeasure nu = p == 0 ? k.retained.row(0) : measure_apply(m.eta_hat[p - 1], k.retained);
    const Vector spread = kernel_variance(k.absorbed, kernel_apply(q[p], phi));
    const double gp = m.gamma[p].mass();
    out.terms[p] = gp * gp / (gn * gn) * nu.integrate(spread);
    out.total += out.terms[p];
  }
  return out;
}

double terminal_variance_difference(const ExtendedModel& model, const TerminalKnot& knot,
                                    const Vector& psi) {
  if (!terminal_knot_is_compatible(knot, model)) {
    throw CompatibilityError("terminal knot does not factor the lead terminal kernel",
                             model.model().horizon());
  }
  const TerminalFactors& f = model.factors();
  if (psi.size() != f.target.size()) throw DimensionError("test function has wrong size");
  const std::size_t n = model.model().horizon();
  const Marginals m = predictive_measures(model.model());

  Vector ratio_sq(psi.size());
  for (Index b = 0; b < psi.size(); ++b) {
    const double r = f.target[b] > 0.0 ? psi[b] / f.target[b] : 0.0;
    ratio_sq[b] = r * r;
  }
  const Vector second = f.weight.cwiseProduct(kernel_apply(f.trail, ratio_sq));
  const Vector cov = kernel_covariance(knot.absorbed, f.weight, second);
  const double spread = measure_apply(m.eta_hat[n - 1], knot.retained).integrate(cov);
  const double eta_g = m.eta[n].integrate(model.model().potential(n).values());
  return spread / (eta_g * eta_g);
}

void write_variance_csv(std::ostream& out, const VarianceReport& report) {
  CsvWriter csv(out);
  csv.row("variant", "p", "term");
  const std::string name(to_string(report.variant));
  for (std::size_t p = 0; p < report.terms.size(); ++p) csv.row(name, p, report.terms[p]);
  csv.row(name, "total", report.total);
}

}  // namespace knotpf
