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

#include "knotpf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include "knotpf/ensemble.hpp"
#include "knotpf/model_io.hpp"
#include "knotpf/model_zoo.hpp"
#include "knotpf/variance.hpp"

namespace knotpf {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kRivalKnots = 20;
constexpr Variant kAllVariants[] = {Variant::predictive, Variant::predictive_centered,
                                    Variant::updated, Variant::updated_centered};

struct Outcome {
  double error = 0.0;
  bool ok = true;
};

// Case under test, filled in before anything can throw so failures can be replayed.
struct Instance {
  RngStream rng;
  bool corrupt = false;
  std::optional<ModelCase> replay;
};

struct Check {
  const char* name;
  const char* description;
  double tolerance;
  std::function<Outcome(Instance&, double)> run;
};

Outcome within(double error, double tol) { return {error, error <= tol}; }

Outcome worst(Outcome a, Outcome b) {
  return {std::max(a.error, b.error), a.ok && b.ok};
}

double measure_diff(const FiniteMeasure& a, const FiniteMeasure& b) {
  return a.size() == b.size() ? max_abs_diff(a.weights(), b.weights()) : kInf;
}

double kernel_diff(const FiniteKernel& a, const FiniteKernel& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return kInf;
  return max_abs_diff(a.matrix(), b.matrix());
}

double model_diff(const FKModel& a, const FKModel& b) {
  if (a.horizon() != b.horizon()) return kInf;
  double e = measure_diff(a.initial(), b.initial());
  for (std::size_t p = 1; p <= a.horizon(); ++p) e = std::max(e, kernel_diff(a.kernel(p), b.kernel(p)));
  for (std::size_t p = 0; p <= a.horizon(); ++p) {
    const Vector& ga = a.potential(p).values();
    const Vector& gb = b.potential(p).values();
    e = std::max(e, ga.size() == gb.size() ? max_abs_diff(ga, gb) : kInf);
  }
  return e;
}

Vector random_signed(Index size, RngStream& rng) {
  Vector v(size);
  for (Index i = 0; i < size; ++i) v[i] = rng.normal();
  return v;
}

// Bounded away from zero with random signs.
Vector random_nonzero(Index size, RngStream& rng) {
  Vector v = random_uniform(size, rng, 0.2, 1.5);
  for (Index i = 0; i < size; ++i) {
    if (rng.uniform() < 0.5) v[i] = -v[i];
  }
  return v;
}

Knotset corrupted(const Knotset& knots, const FKModel& model, RngStream& rng) {
  std::vector<Knot> out = knots.knots();
  const std::size_t t = rng.below(out.size());
  const FiniteKernel& k = out[t].absorbed;
  FiniteKernel wrong = random_markov_kernel(k.rows(), k.cols(), rng);
  // Keep drawing until the product is visibly different from M_t.
  while (max_abs_diff(out[t].retained.matrix() * wrong.matrix(), model.transition(t).matrix()) <
         1e-6) {
    wrong = random_markov_kernel(k.rows(), k.cols(), rng);
  }
  out[t] = Knot(t, out[t].retained, std::move(wrong));
  return Knotset(std::move(out));
}

// Random model, knotset and test function, recorded for replay.
std::pair<FKModel, Knotset> model_with_knots(Instance& in) {
  FKModel model = random_model(in.rng);
  Knotset knots = random_knotset(model, in.rng);
  if (in.corrupt) knots = corrupted(knots, model, in.rng);
  in.replay = ModelCase{model, knots.knots(), Vector()};
  return {std::move(model), std::move(knots)};
}

Outcome untwisting(Instance& in, double tol) {
  const Index rows = 2 + static_cast<Index>(in.rng.below(4));
  const Index cols = 2 + static_cast<Index>(in.rng.below(4));
  const FiniteKernel k = random_markov_kernel(rows, cols, in.rng, 0.3);
  Vector h = random_nonnegative(cols, in.rng, 0.4);
  // Zero H on the support of row 0 so at least one row takes the fallback branch.
  if (in.rng.uniform() < 0.5) {
    for (Index c = 0; c < cols; ++c) {
      if (k.matrix()(0, c) > 0.0) h[c] = 0.0;
    }
  }
  const Vector f = random_signed(cols, in.rng);
  const Vector lhs = kernel_apply(k, h).cwiseProduct(kernel_apply(twist_kernel(k, h), f));
  const Vector rhs = kernel_apply(k, h.cwiseProduct(f));
  return within(max_abs_diff(lhs, rhs), tol);
}

Outcome twist_composition(Instance& in, double tol) {
  const Index a = 2 + static_cast<Index>(in.rng.below(4));
  const Index b = 2 + static_cast<Index>(in.rng.below(4));
  const Index c = 2 + static_cast<Index>(in.rng.below(4));
  const FiniteKernel r = random_markov_kernel(a, b, in.rng, 0.3);
  const FiniteKernel k = random_markov_kernel(b, c, in.rng, 0.3);
  const Vector h = random_nonnegative(c, in.rng, 0.4);
  const FiniteKernel lhs = compose(twist_kernel(r, kernel_apply(k, h)), twist_kernel(k, h));
  const FiniteKernel rhs = twist_kernel(compose(r, k), h);
  return within(kernel_diff(lhs, rhs), tol);
}

Outcome knot_predictive_measures(Instance& in, double tol) {
  auto [model, knots] = model_with_knots(in);
  const FKModel knotted = apply_knotset(knots, model);
  const Marginals before = predictive_measures(model);
  const Marginals after = predictive_measures(knotted);
  double e = measure_diff(after.gamma[0], knots[0].retained.row(0));
  for (std::size_t p = 0; p < model.horizon(); ++p) {
    if (p > 0) {
      e = std::max(e, measure_diff(after.gamma[p],
                                   measure_apply(before.gamma_hat[p - 1], knots[p].retained)));
    }
    e = std::max(e, measure_diff(measure_apply(after.gamma[p], knots[p].absorbed), before.gamma[p]));
  }
  return within(e, tol);
}

Outcome knot_invariants(Instance& in, double tol) {
  auto [model, knots] = model_with_knots(in);
  const std::size_t n = model.horizon();
  const Marginals before = predictive_measures(model);
  const Marginals after = predictive_measures(apply_knotset(knots, model));
  double e = std::max(measure_diff(after.gamma[n], before.gamma[n]),
                      measure_diff(after.gamma_hat[n], before.gamma_hat[n]));
  for (std::size_t p = 0; p <= n; ++p) {
    e = std::max(e, std::abs(after.gamma[p].mass() - before.gamma[p].mass()));
    e = std::max(e, std::abs(after.gamma_hat[p].mass() - before.gamma_hat[p].mass()));
  }
  return within(e, tol);
}

Outcome knotset_closed_form(Instance& in, double tol) {
  auto [model, knots] = model_with_knots(in);
  return within(model_diff(apply_knotset(knots, model), apply_knotset_sequentially(knots, model)),
                tol);
}

Outcome knot_simplification(Instance& in, double tol) {
  FKModel model = random_model(in.rng);
  const std::size_t t = in.rng.below(model.horizon());
  const Knot first = random_compatible_knot(model, t, in.rng);
  const FKModel once = apply_knot(first, model);
  const Knot second = random_compatible_knot(once, t, in.rng);
  in.replay = ModelCase{model, {first, second}, Vector()};
  const FKModel twice = apply_knot(second, once);
  const Knot merged(t, second.retained, compose(second.absorbed, first.absorbed));
  return within(model_diff(twice, apply_knot(merged, model)), tol);
}

Outcome knotset_completion(Instance& in, double tol) {
  auto [model, knots] = model_with_knots(in);
  const FKModel knotted = apply_knotset(knots, model);
  const FKModel completed = apply_knotset(complete_knotset(knots, model), knotted);
  return within(model_diff(completed, adapted_knotset_model(model)), tol);
}

ExtendedModel random_extension(Instance& in, const FKModel& model, const Vector& target) {
  ExtendedModel ext = phi_extend(model, target);
  if (in.rng.uniform() < 0.5) {
    const Knotset knots = random_knotset(model, in.rng);
    in.replay->knots = knots.knots();
    ext = apply_knotset(knots, ext);
  }
  return ext;
}

Outcome terminal_kernel_equivalence(Instance& in, double tol) {
  const FKModel model = random_model(in.rng);
  const std::size_t n = model.horizon();
  const Vector target = random_uniform(model.state_size(n), in.rng, 0.1, 2.0);
  in.replay = ModelCase{model, {}, target};
  const ExtendedModel ext = random_extension(in, model, target);
  const ExtendedModel knotted = apply_terminal_knot(random_terminal_knot(ext, in.rng), ext);
  const Vector psi = random_signed(model.state_size(n), in.rng);
  auto integrand = [&](const ExtendedModel& m) {
    return kernel_apply(m.model().kernel(n), m.model().potential(n).values().cwiseProduct(m.lift(psi)));
  };
  return within(max_abs_diff(integrand(knotted), integrand(ext)), tol);
}

Outcome variance_reduction_identity(Instance& in, double tol) {
  auto [model, knots] = model_with_knots(in);
  const Vector phi = random_signed(model.state_size(model.horizon()), in.rng);
  in.replay->phi = phi;
  const double direct = asymptotic_variance(model, phi, Variant::predictive).total -
                        asymptotic_variance(apply_knotset(knots, model), phi, Variant::predictive).total;
  const double formula = knot_variance_reduction(model, knots, phi).total;
  Outcome out = within(std::abs(direct - formula), tol);
  out.ok = out.ok && direct >= -kStructuralTolerance;
  return out;
}

Outcome knotset_ordering(Instance& in, double tol) {
  auto [model, knots] = model_with_knots(in);
  const Vector phi = random_signed(model.state_size(model.horizon()), in.rng);
  in.replay->phi = phi;
  std::vector<FKModel> chain{model, apply_knotset(knots, model)};
  const std::size_t extra = 1 + in.rng.below(2);
  for (std::size_t i = 0; i < extra; ++i) {
    chain.push_back(apply_knotset(random_knotset(chain.back(), in.rng), chain.back()));
  }
  Outcome out;
  for (Variant v : kAllVariants) {
    double previous = kInf;
    for (const FKModel& m : chain) {
      const double total = asymptotic_variance(m, phi, v).total;
      const double rise = total - previous;
      out.error = std::max(out.error, rise);
      out.ok = out.ok && rise <= tol;
      previous = total;
    }
  }
  return out;
}

Outcome adapted_knot_optimality(Instance& in, double tol) {
  const FKModel model = random_model(in.rng);
  const Vector phi = random_signed(model.state_size(model.horizon()), in.rng);
  in.replay = ModelCase{model, {}, phi};
  Outcome out;
  for (std::size_t t = 0; t < model.horizon(); ++t) {
    const FKModel adapted = apply_knot(adapted_knot(model, t), model);
    for (std::size_t k = 0; k < kRivalKnots; ++k) {
      const FKModel rival = apply_knot(random_compatible_knot(model, t, in.rng), model);
      for (Variant v : kAllVariants) {
        const double excess =
            asymptotic_variance(adapted, phi, v).total - asymptotic_variance(rival, phi, v).total;
        out = worst(out, {excess, excess <= tol});
      }
    }
  }
  return out;
}

Outcome adapted_knot_sequence_terms(Instance& in, double tol) {
  const FKModel model = random_model(in.rng);
  const std::size_t n = model.horizon();
  const Vector phi = random_signed(model.state_size(n), in.rng);
  in.replay = ModelCase{model, {}, phi};
  const std::vector<FKModel> stages = adapted_knot_sequence(model);
  const std::vector<double> base = asymptotic_variance(model, phi, Variant::predictive).terms;
  Outcome out;
  for (std::size_t s = 1; s < stages.size(); ++s) {
    const std::vector<double> terms = asymptotic_variance(stages[s], phi, Variant::predictive).terms;
    for (std::size_t p = 0; p < s; ++p) out = worst(out, within(std::abs(terms[p]), tol));
    for (std::size_t p = s; p < n; ++p) {
      out = worst(out, within(std::abs(terms[p] - base[p]), kCompatibilityTolerance));
    }
    out = worst(out, within(std::abs(terms[n] - base[n]), tol));
  }
  return out;
}

Outcome terminal_variance_identity(Instance& in, double tol) {
  const FKModel model = random_model(in.rng);
  const std::size_t n = model.horizon();
  const Vector target = random_uniform(model.state_size(n), in.rng, 0.1, 2.0);
  in.replay = ModelCase{model, {}, target};
  const ExtendedModel ext = random_extension(in, model, target);
  const TerminalKnot knot = random_terminal_knot(ext, in.rng);
  const ExtendedModel knotted = apply_terminal_knot(knot, ext);
  const Vector psi = random_signed(model.state_size(n), in.rng);
  const double centre = predictive_measures(model).eta_hat[n].integrate(psi);
  Outcome out;
  const std::pair<Variant, Vector> cases[] = {{Variant::updated, psi},
                                              {Variant::updated_centered, psi.array() - centre}};
  for (const auto& [variant, f] : cases) {
    const double direct = asymptotic_variance(ext.model(), ext.lift(psi), variant).total -
                          asymptotic_variance(knotted.model(), knotted.lift(psi), variant).total;
    out = worst(out, within(std::abs(direct - terminal_variance_difference(ext, knot, f)), tol));
  }
  return out;
}

Outcome terminal_reduction_nonnegative(Instance& in, double tol) {
  const FKModel model = random_model(in.rng);
  const std::size_t n = model.horizon();
  const Vector psi = random_nonzero(model.state_size(n), in.rng);
  in.replay = ModelCase{model, {}, psi};
  const Vector target = psi.cwiseAbs();
  const ExtendedModel ext = phi_extend(model, target);
  const TerminalKnot knot = random_terminal_knot(ext, in.rng);
  const double difference = terminal_variance_difference(ext, knot, psi);
  const Marginals m = predictive_measures(model);
  const Vector& g = model.potential(n).values();
  const double eta_g = m.eta[n].integrate(g);
  const Vector spread = kernel_variance(knot.absorbed, g.cwiseProduct(target));
  const double expected =
      measure_apply(m.eta_hat[n - 1], knot.retained).integrate(spread) / (eta_g * eta_g);
  Outcome out = within(std::abs(difference - expected), tol);
  out.ok = out.ok && difference >= -kStructuralTolerance;
  return out;
}

Outcome zero_variance_endpoint(Instance& in, double tol) {
  const FKModel model = random_model(in.rng);
  const std::size_t n = model.horizon();
  const Vector psi = random_nonzero(model.state_size(n), in.rng);
  in.replay = ModelCase{model, {}, psi};
  const ExtendedModel ext = phi_extend(model, psi.cwiseAbs());
  const ExtendedModel adapted = adapt_sequentially(ext);
  const ExtendedModel endpoint = apply_terminal_knot(adapted_terminal_knot(adapted), adapted);
  const std::vector<double> terms =
      asymptotic_variance(endpoint.model(), endpoint.lift(psi), Variant::updated).terms;
  const FiniteMeasure eta_hat = predictive_measures(model).eta_hat[n];
  const double abs_mean = eta_hat.integrate(psi.cwiseAbs());
  const double mean = eta_hat.integrate(psi);
  Outcome out;
  for (std::size_t p = 0; p < n; ++p) out = worst(out, within(std::abs(terms[p]), tol));
  return worst(out, within(std::abs(terms[n] - (abs_mean * abs_mean - mean * mean)), tol));
}

Outcome extension_preserves_variance(Instance& in, double tol) {
  const FKModel model = random_model(in.rng);
  const std::size_t n = model.horizon();
  const Vector target = random_uniform(model.state_size(n), in.rng, 0.1, 2.0);
  in.replay = ModelCase{model, {}, target};
  const ExtendedModel ext = phi_extend(model, target);
  const Vector other = random_signed(model.state_size(n), in.rng);
  Outcome out;
  for (const Vector& psi : {target, other}) {
    for (Variant v : {Variant::updated, Variant::updated_centered}) {
      const double a = asymptotic_variance(ext.model(), ext.lift(psi), v).total;
      const double b = asymptotic_variance(model, psi, v).total;
      out = worst(out, within(std::abs(a - b), tol));
    }
  }
  return out;
}

Outcome nc_knotset_constant(Instance& in, double tol) {
  const FKModel model = random_model(in.rng);
  const TerminalKnotset knots = random_terminal_knotset(model, in.rng);
  in.replay = ModelCase{model, knots.knots(), Vector()};
  const double before = predictive_measures(model).normalizing_constant();
  const double after = predictive_measures(nc_knotset_model(model, knots)).normalizing_constant();
  return within(std::abs(after - before), tol);
}

const std::vector<Check>& all_checks() {
  static const std::vector<Check> checks{
      {"untwisting", "K(H) K^H(f) = K(H f), including rows with K(H) = 0", 1e-12, untwisting},
      {"twist-composition", "R^{K(H)} K^H = (R K)^H", 1e-12, twist_composition},
      {"knot-predictive-measures", "knotted predictive measures from R and K", 1e-10,
       knot_predictive_measures},
      {"knot-invariants", "terminal measures and all normalizing constants are unchanged", 1e-10,
       knot_invariants},
      {"knotset-closed-form", "closed form equals descending sequential application", 1e-12,
       knotset_closed_form},
      {"knot-simplification", "two knots at one time merge into one", 1e-12, knot_simplification},
      {"knotset-completion", "completing a knotset reaches the adapted knotset model", 1e-12,
       knotset_completion},
      {"terminal-kernel-equivalence", "terminal knots preserve M_n(G_n (1 x psi))", 1e-10,
       terminal_kernel_equivalence},
      {"variance-reduction-identity", "direct variance drop equals the kernel-variance formula",
       1e-10, variance_reduction_identity},
      {"knotset-ordering", "chained knotsets never raise any variance variant", 1e-12,
       knotset_ordering},
      {"adapted-knot-optimality", "the adapted t-knot beats random t-knots", 1e-12,
       adapted_knot_optimality},
      {"adapted-knot-sequence", "staged adapted knots zero earlier terms, keep later ones", 1e-12,
       adapted_knot_sequence_terms},
      {"terminal-variance-difference", "terminal knot variance drop equals the covariance formula",
       1e-10, terminal_variance_identity},
      {"terminal-reduction-nonnegative", "with target |psi| the drop is a kernel variance", 1e-10,
       terminal_reduction_nonnegative},
      {"zero-variance-endpoint", "adapted knotset plus adapted terminal knot", 1e-12,
       zero_variance_endpoint},
      {"extension-preserves-variance", "updated variances survive the extension", 1e-10,
       extension_preserves_variance},
      {"nc-knotset-constant", "the normalizing-constant model keeps gamma_hat_n(1)", 1e-10,
       nc_knotset_constant},
  };
  return checks;
}

CheckResult run_check(const Check& check, std::size_t index, const VerifyOptions& options) {
  CheckResult result;
  result.name = check.name;
  result.description = check.description;
  result.tolerance = check.tolerance;
  result.instances = options.instances;
  const std::uint64_t check_seed = splitmix64(options.seed ^ splitmix64(index + 1));
  for (std::size_t i = 0; i < options.instances; ++i) {
    Instance in{RngStream::derive(check_seed, i), options.corrupt_knot && i == 0, std::nullopt};
    std::string message;
    bool ok = true;
    try {
      const Outcome out = check.run(in, check.tolerance);
      result.worst_error = std::max(result.worst_error, out.error);
      ok = out.ok;
      if (!ok) message = "error " + std::to_string(out.error) + " exceeds tolerance";
    } catch (const CompatibilityError& e) {
      ok = false;
      message = e.what();
      if (e.time()) message += " [time index " + std::to_string(*e.time()) + "]";
    } catch (const Error& e) {
      ok = false;
      message = e.what();
    }
    if (ok) continue;
    if (result.failures++ == 0) {
      result.first_failure = i;
      result.failure_message = std::move(message);
      if (in.replay) result.failure_case = case_to_json(*in.replay);
    }
  }
  return result;
}

}  // namespace

bool VerifyReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed(); });
}

std::vector<std::string> verification_checks() {
  std::vector<std::string> names;
  for (const Check& c : all_checks()) names.emplace_back(c.name);
  return names;
}

VerifyReport run_verification(const VerifyOptions& options) {
  const auto& checks = all_checks();
  for (const std::string& name : options.only) {
    if (std::none_of(checks.begin(), checks.end(), [&](const Check& c) { return name == c.name; })) {
      throw DomainError("unknown check '" + name + "'");
    }
  }
  VerifyReport report{options.seed, options.instances, {}};
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const bool selected =
        options.only.empty() ||
        std::find(options.only.begin(), options.only.end(), checks[i].name) != options.only.end();
    if (selected) report.checks.push_back(run_check(checks[i], i, options));
  }
  return report;
}

}  // namespace knotpf
