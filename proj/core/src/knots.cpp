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

#include "knotpf/knots.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace knotpf {
namespace {

struct ModelParts {
  FiniteMeasure initial;
  std::vector<FiniteKernel> kernels;
  std::vector<PotentialFn> potentials;

  explicit ModelParts(const FKModel& m)
      : initial(m.initial()), kernels(m.kernels()), potentials(m.potentials()) {}

  void set_transition(std::size_t p, const FiniteKernel& k) {
    if (p == 0) {
      if (k.rows() != 1) throw DimensionError("time-0 transition must have one row");
      initial = k.row(0);
    } else {
      kernels[p - 1] = k;
    }
  }

  FKModel build() && {
    return FKModel(std::move(initial), std::move(kernels), std::move(potentials));
  }
};

PotentialFn expected_potential(const FiniteKernel& absorbed, const PotentialFn& g) {
  return PotentialFn(kernel_apply(absorbed, g.values()));
}

bool factors_match(const FiniteKernel& retained, const FiniteKernel& absorbed,
                   const FiniteKernel& target, double tol) {
  if (retained.rows() != target.rows() || absorbed.cols() != target.cols()) {
    throw DimensionError("knot factors do not match the shape of the kernel they replace");
  }
  return max_abs_diff(retained.matrix() * absorbed.matrix(), target.matrix()) <= tol;
}

void require_compatible(const Knot& knot, const FKModel& model) {
  if (!knot_is_compatible(knot, model)) {
    throw CompatibilityError("knot at time " + std::to_string(knot.time) +
                                 " does not factor the model transition",
                             knot.time);
  }
}

FKModel replace_terminal(const FKModel& model, const TerminalFactors& factors) {
  ModelParts parts(model);
  const std::size_t n = model.horizon();
  parts.kernels[n - 1] = factors.kernel();
  parts.potentials[n] = PotentialFn(factors.potential());
  return std::move(parts).build();
}

}  // namespace

Knot::Knot(std::size_t t, FiniteKernel r, FiniteKernel k)
    : time(t), retained(std::move(r)), absorbed(std::move(k)) {
  if (retained.cols() != absorbed.rows()) {
    throw DimensionError("knot at time " + std::to_string(time) + " has non-composable factors");
  }
  if (!retained.is_markov() || !absorbed.is_markov()) {
    throw DomainError("knot factors must be Markov kernels");
  }
}

Knotset::Knotset(std::vector<Knot> knots) : knots_(std::move(knots)) {
  for (std::size_t t = 0; t < knots_.size(); ++t) {
    if (knots_[t].time != t) {
      throw IndexError("knotset entry " + std::to_string(t) + " has time " +
                       std::to_string(knots_[t].time));
    }
  }
}

TerminalKnot::TerminalKnot(FiniteKernel r, FiniteKernel k)
    : retained(std::move(r)), absorbed(std::move(k)) {
  if (retained.cols() != absorbed.rows()) {
    throw DimensionError("terminal knot has non-composable factors");
  }
  if (!retained.is_markov() || !absorbed.is_markov()) {
    throw DomainError("terminal knot factors must be Markov kernels");
  }
}

TerminalKnotset::TerminalKnotset(std::vector<Knot> knots) : knots_(std::move(knots)) {
  if (knots_.empty()) throw DimensionError("terminal knotset needs at least one knot");
  for (std::size_t t = 0; t < knots_.size(); ++t) {
    if (knots_[t].time != t) {
      throw IndexError("terminal knotset entry " + std::to_string(t) + " has time " +
                       std::to_string(knots_[t].time));
    }
  }
}

bool knot_is_compatible(const Knot& knot, const FKModel& model, double tol) {
  if (knot.time >= model.horizon()) {
    throw IndexError("knot time " + std::to_string(knot.time) + " is not below the horizon " +
                     std::to_string(model.horizon()));
  }
  return factors_match(knot.retained, knot.absorbed, model.transition(knot.time), tol);
}

FKModel apply_knot(const Knot& knot, const FKModel& model) {
  require_compatible(knot, model);
  const std::size_t t = knot.time;
  ModelParts parts(model);
  parts.set_transition(t, knot.retained);
  parts.potentials[t] = expected_potential(knot.absorbed, model.potential(t));
  parts.kernels[t] =
      compose(twist_kernel(knot.absorbed, model.potential(t)), model.kernel(t + 1));
  return std::move(parts).build();
}

FKModel apply_knotset(const Knotset& knots, const FKModel& model) {
  const std::size_t n = model.horizon();
  if (knots.size() != n) {
    throw DimensionError("knotset has " + std::to_string(knots.size()) +
                         " knots for horizon " + std::to_string(n));
  }
  for (const Knot& k : knots) require_compatible(k, model);
  ModelParts parts(model);
  for (std::size_t p = 0; p < n; ++p) {
    const Knot& k = knots[p];
    const FiniteKernel twisted = twist_kernel(k.absorbed, model.potential(p));
    const FiniteKernel& next = (p + 1 < n) ? knots[p + 1].retained : model.kernel(n);
    parts.kernels[p] = compose(twisted, next);
    parts.potentials[p] = expected_potential(k.absorbed, model.potential(p));
  }
  if (n > 0) parts.set_transition(0, knots[0].retained);
  return std::move(parts).build();
}

FKModel apply_knotset_sequentially(const Knotset& knots, const FKModel& model) {
  if (knots.size() != model.horizon()) throw DimensionError("knotset size differs from horizon");
  for (const Knot& k : knots) require_compatible(k, model);
  FKModel current = model;
  for (std::size_t t = knots.size(); t-- > 0;) current = apply_knot(knots[t], current);
  return current;
}

Knot trivial_knot(const FKModel& model, std::size_t t) {
  if (t >= model.horizon()) throw IndexError("trivial knot time out of range");
  FiniteKernel m = model.transition(t);
  const Index cols = m.cols();
  return Knot(t, std::move(m), FiniteKernel::identity(cols));
}

Knot adapted_knot(const FKModel& model, std::size_t t) {
  if (t >= model.horizon()) throw IndexError("adapted knot time out of range");
  FiniteKernel m = model.transition(t);
  const Index rows = m.rows();
  return Knot(t, FiniteKernel::identity(rows), std::move(m));
}

Knotset trivial_knotset(const FKModel& model) {
  std::vector<Knot> knots;
  for (std::size_t t = 0; t < model.horizon(); ++t) knots.push_back(trivial_knot(model, t));
  return Knotset(std::move(knots));
}

Knotset adapted_knotset(const FKModel& model) {
  std::vector<Knot> knots;
  for (std::size_t t = 0; t < model.horizon(); ++t) knots.push_back(adapted_knot(model, t));
  return Knotset(std::move(knots));
}

Knotset complete_knotset(const Knotset& knots, const FKModel& model) {
  if (knots.size() != model.horizon()) throw DimensionError("knotset size differs from horizon");
  for (const Knot& k : knots) require_compatible(k, model);
  std::vector<Knot> out;
  for (std::size_t p = 0; p < knots.size(); ++p) {
    if (p == 0) {
      out.emplace_back(0, FiniteKernel::identity(1), knots[0].retained);
    } else {
      out.emplace_back(p, twist_kernel(knots[p - 1].absorbed, model.potential(p - 1)),
                       knots[p].retained);
    }
  }
  return Knotset(std::move(out));
}

std::vector<FKModel> adapted_knot_sequence(const FKModel& model) {
  std::vector<FKModel> stages{model};
  for (std::size_t t = 0; t < model.horizon(); ++t) {
    stages.push_back(apply_knot(adapted_knot(stages.back(), t), stages.back()));
  }
  return stages;
}

Vector TerminalFactors::potential() const {
  Vector inverse(target.size());
  for (Index b = 0; b < target.size(); ++b) inverse[b] = target[b] > 0.0 ? 1.0 / target[b] : 0.0;
  return outer_product(weight, inverse);
}

ExtendedModel::ExtendedModel(FKModel model, TerminalFactors factors,
                             std::shared_ptr<const FKModel> reference)
    : model_(std::move(model)), factors_(std::move(factors)), reference_(std::move(reference)) {
  const std::size_t n = model_.horizon();
  if (n < 1) throw DomainError("extended models need horizon at least one");
  if (!reference_) throw DomainError("extended model needs a reference model");
  if (factors_.weight.size() != factors_.lead.cols() ||
      factors_.target.size() != factors_.trail.cols()) {
    throw DimensionError("terminal factors have inconsistent sizes");
  }
  const FiniteKernel k = factors_.kernel();
  if (k.rows() != model_.kernel(n).rows() || k.cols() != model_.kernel(n).cols() ||
      max_abs_diff(k.matrix(), model_.kernel(n).matrix()) > kStructuralTolerance) {
    throw CompatibilityError("terminal kernel does not match its stored factorization", n);
  }
  const Vector g = factors_.potential();
  if (g.size() != model_.state_size(n) ||
      max_abs_diff(g, model_.potential(n).values()) >
          kStructuralTolerance * (1.0 + g.cwiseAbs().maxCoeff())) {
    throw CompatibilityError("terminal potential does not match its stored factorization", n);
  }
}

Vector ExtendedModel::lift(const Vector& psi) const {
  if (psi.size() != factors_.target.size()) throw DimensionError("lifted function has wrong size");
  return outer_product(Vector::Ones(factors_.lead.cols()), psi);
}

ExtendedModel phi_extend(const FKModel& model, const Vector& target) {
  const std::size_t n = model.horizon();
  if (n < 1) throw DomainError("extension needs horizon at least one");
  if (target.size() != model.state_size(n)) throw DimensionError("target has wrong size");
  const Marginals marginals = predictive_measures(model);
  for (Index x = 0; x < target.size(); ++x) {
    if (!(target[x] >= 0.0) || !std::isfinite(target[x])) {
      throw DomainError("target function is negative or not finite at state " +
                        std::to_string(x));
    }
    if (marginals.gamma_hat[n].weights()[x] > 0.0 && !(target[x] > 0.0)) {
      throw DomainError("target function vanishes at state " + std::to_string(x) +
                        " inside the terminal support");
    }
  }
  TerminalFactors factors{model.kernel(n), FiniteKernel::identity(model.state_size(n)),
                          model.potential(n).values().cwiseProduct(target), target};
  FKModel extended = replace_terminal(model, factors);
  return ExtendedModel(std::move(extended), std::move(factors),
                       std::make_shared<const FKModel>(model));
}

ExtendedModel apply_knot(const Knot& knot, const ExtendedModel& model) {
  FKModel knotted = apply_knot(knot, model.model());
  TerminalFactors factors = model.factors();
  const std::size_t n = model.model().horizon();
  if (knot.time + 1 == n) {
    factors.lead = compose(twist_kernel(knot.absorbed, model.model().potential(n - 1)),
                           factors.lead);
    knotted = replace_terminal(knotted, factors);
  }
  return ExtendedModel(std::move(knotted), std::move(factors), model.reference_ptr());
}

ExtendedModel apply_knotset(const Knotset& knots, const ExtendedModel& model) {
  FKModel knotted = apply_knotset(knots, model.model());
  TerminalFactors factors = model.factors();
  const std::size_t n = model.model().horizon();
  factors.lead =
      compose(twist_kernel(knots[n - 1].absorbed, model.model().potential(n - 1)), factors.lead);
  knotted = replace_terminal(knotted, factors);
  return ExtendedModel(std::move(knotted), std::move(factors), model.reference_ptr());
}

ExtendedModel adapt_sequentially(const ExtendedModel& model) {
  ExtendedModel current = model;
  for (std::size_t t = 0; t < model.model().horizon(); ++t) {
    current = apply_knot(adapted_knot(current.model(), t), current);
  }
  return current;
}

bool terminal_knot_is_compatible(const TerminalKnot& knot, const ExtendedModel& model,
                                 double tol) {
  return factors_match(knot.retained, knot.absorbed, model.factors().lead, tol);
}

ExtendedModel apply_terminal_knot(const TerminalKnot& knot, const ExtendedModel& model) {
  const std::size_t n = model.model().horizon();
  if (!terminal_knot_is_compatible(knot, model)) {
    throw CompatibilityError("terminal knot does not factor the lead terminal kernel", n);
  }
  const TerminalFactors& old = model.factors();
  TerminalFactors factors{knot.retained,
                          compose(twist_kernel(knot.absorbed, old.weight), old.trail),
                          kernel_apply(knot.absorbed, old.weight), old.target};
  FKModel knotted = replace_terminal(model.model(), factors);
  return ExtendedModel(std::move(knotted), std::move(factors), model.reference_ptr());
}

TerminalKnot adapted_terminal_knot(const ExtendedModel& model) {
  const FiniteKernel& lead = model.factors().lead;
  return TerminalKnot(FiniteKernel::identity(lead.rows()), lead);
}

TerminalKnot trivial_terminal_knot(const ExtendedModel& model) {
  const FiniteKernel& lead = model.factors().lead;
  return TerminalKnot(lead, FiniteKernel::identity(lead.cols()));
}

TerminalKnotset adapted_terminal_knotset(const FKModel& model) {
  std::vector<Knot> knots;
  for (std::size_t t = 0; t <= model.horizon(); ++t) {
    FiniteKernel m = model.transition(t);
    const Index rows = m.rows();
    knots.emplace_back(t, FiniteKernel::identity(rows), std::move(m));
  }
  return TerminalKnotset(std::move(knots));
}

TerminalKnotset trivial_terminal_knotset(const FKModel& model) {
  std::vector<Knot> knots;
  for (std::size_t t = 0; t <= model.horizon(); ++t) {
    FiniteKernel m = model.transition(t);
    const Index cols = m.cols();
    knots.emplace_back(t, std::move(m), FiniteKernel::identity(cols));
  }
  return TerminalKnotset(std::move(knots));
}

FKModel nc_knotset_model(const FKModel& model, const TerminalKnotset& knots) {
  const std::size_t n = model.horizon();
  if (knots.size() != n + 1) {
    throw DimensionError("terminal knotset has " + std::to_string(knots.size()) +
                         " knots for horizon " + std::to_string(n));
  }
  for (std::size_t p = 0; p <= n; ++p) {
    if (!factors_match(knots[p].retained, knots[p].absorbed, model.transition(p),
                       kCompatibilityTolerance)) {
      throw CompatibilityError("knot at time " + std::to_string(p) +
                                   " does not factor the model transition",
                               p);
    }
  }
  ModelParts parts(model);
  for (std::size_t p = 0; p <= n; ++p) {
    parts.potentials[p] = expected_potential(knots[p].absorbed, model.potential(p));
    if (p > 0) {
      parts.kernels[p - 1] = compose(twist_kernel(knots[p - 1].absorbed, model.potential(p - 1)),
                                     knots[p].retained);
    }
  }
  parts.set_transition(0, knots[0].retained);
  return std::move(parts).build();
}

FiniteKernel conditional_product(const FiniteKernel& first, const FiniteKernel& second) {
  const Index x_size = first.rows();
  const Index z1_size = first.cols();
  if (second.rows() != z1_size * x_size) {
    throw DimensionError("conditional kernel needs " + std::to_string(z1_size * x_size) +
                         " rows, got " + std::to_string(second.rows()));
  }
  const Index z2_size = second.cols();
  Matrix out(x_size, z1_size * z2_size);
  for (Index x = 0; x < x_size; ++x) {
    for (Index z1 = 0; z1 < z1_size; ++z1) {
      out.row(x).segment(z1 * z2_size, z2_size) =
          first.matrix()(x, z1) * second.matrix().row(z1 * x_size + x);
    }
  }
  const bool markov = first.is_markov() && second.is_markov();
  return FiniteKernel(std::move(out), markov ? KernelKind::markov : KernelKind::nonnegative);
}

Knot marginalisation_knot(const FiniteKernel& marginal, const FiniteKernel& conditional,
                          std::size_t t) {
  const Index x_size = marginal.rows();
  const Index z1_size = marginal.cols();
  if (conditional.rows() != z1_size * x_size) {
    throw DimensionError("conditional kernel needs " + std::to_string(z1_size * x_size) +
                         " rows, got " + std::to_string(conditional.rows()));
  }
  const Index z2_size = conditional.cols();
  Matrix retained = Matrix::Zero(x_size, z1_size * x_size);
  for (Index x = 0; x < x_size; ++x) {
    for (Index y1 = 0; y1 < z1_size; ++y1) retained(x, y1 * x_size + x) = marginal.matrix()(x, y1);
  }
  Matrix absorbed = Matrix::Zero(z1_size * x_size, z1_size * z2_size);
  for (Index y1 = 0; y1 < z1_size; ++y1) {
    for (Index y2 = 0; y2 < x_size; ++y2) {
      const Index y = y1 * x_size + y2;
      absorbed.row(y).segment(y1 * z2_size, z2_size) = conditional.matrix().row(y);
    }
  }
  return Knot(t, FiniteKernel(std::move(retained)), FiniteKernel(std::move(absorbed)));
}

}  // namespace knotpf
