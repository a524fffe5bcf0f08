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

// Nonlinear state-space model with multivariate Student transitions and
// Gaussian observations. The Student law is a Gaussian scale mixture with a
// chi-squared mixing variable, which gives a tractable knot: conditionally on
// the scale draw, the Gaussian part can be integrated against the likelihood.

#include <Eigen/Cholesky>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "knotpf/finite.hpp"
#include "knotpf/generative_knots.hpp"
#include "knotpf/rng.hpp"

namespace knotpf {

struct StudentSSMParams {
  std::size_t dimension = 1;
  std::size_t horizon = 10;
  double dof = 4.0;
  Vector mean;              // initial location, size d
  Matrix state_scale;       // Student scale matrix, d x d
  Matrix observation_cov;   // observation noise covariance, d x d
  Matrix mixing;            // applied to the componentwise drift, d x d
  std::uint64_t data_seed = 0;

  /// Zero mean, identity scale and noise, tridiagonal mixing.
  static StudentSSMParams standard(std::size_t dimension, std::uint64_t data_seed = 0);

  /// Throws DomainError on shape mismatch, dof <= 0, or a matrix that is not SPD.
  void validate() const;
};

/// Unit diagonal, 0.5 on the first sub- and super-diagonals.
Matrix tridiagonal_mixing(std::size_t dimension);

/// x / 2 + 25 x / (1 + x^2) + 8 cos(1.2 p).
double kitagawa_drift(std::size_t p, double x);

/// mixing * [drift(p, x_1), ..., drift(p, x_d)].
Vector transition_mean(const StudentSSMParams& params, std::size_t p, const Vector& x);

struct ObservationRecord {
  std::vector<Vector> values;  // y_0..y_n

  std::size_t horizon() const { return values.empty() ? 0 : values.size() - 1; }
  std::size_t dimension() const { return values.empty() ? 0 : static_cast<std::size_t>(values[0].size()); }
};

/// Draws a latent path and observations from the model with params.data_seed.
ObservationRecord simulate_observations(const StudentSSMParams& params);

/// Header "p,y_1,...,y_d", then one row per time.
void write_observations_csv(std::ostream& out, const ObservationRecord& obs);
ObservationRecord read_observations_csv(std::istream& in);
/// Throws FileError if the file cannot be opened or parsed.
ObservationRecord read_observations_csv(const std::filesystem::path& path);

/// log N(x; mean, L L^T) given the Cholesky factor of the covariance.
double gaussian_log_density(const Vector& x, const Vector& mean, const Eigen::LLT<Matrix>& chol);

/// State is the latent x_p; potential is the observation density.
class StudentBootstrapModel {
 public:
  using state_type = Vector;

  StudentBootstrapModel(StudentSSMParams params, ObservationRecord observations);

  std::size_t horizon() const { return params_.horizon; }
  state_type sample_initial(RngStream& rng) const;
  state_type sample_transition(std::size_t p, const state_type& x, RngStream& rng) const;
  double log_potential(std::size_t p, const state_type& x) const;

  const StudentSSMParams& params() const { return params_; }
  const ObservationRecord& observations() const { return observations_; }

 private:
  Vector scale_mixture_draw(const Vector& center, RngStream& rng) const;

  StudentSSMParams params_;
  ObservationRecord observations_;
  Matrix scale_factor_;
  Eigen::LLT<Matrix> noise_chol_;
};

/// Intermediate state [z, s]: Gaussian center and chi-squared scale draw.
struct ScaledCenter {
  Vector center;
  double scale_draw = 1.0;
};

struct GaussianPosterior {
  Vector mean;
  Matrix covariance;
};

/// Knots (p, delta_{f_p(x)} (x) S, K) with K([z, s], .) = N(z, (dof / s) scale).
class StudentKnotCapability {
 public:
  using source_type = Vector;
  using intermediate_type = ScaledCenter;

  StudentKnotCapability(StudentSSMParams params, ObservationRecord observations);

  std::size_t horizon() const { return params_.horizon; }
  intermediate_type sample_initial_retained(RngStream& rng) const;
  intermediate_type sample_retained(std::size_t p, const source_type& x, RngStream& rng) const;
  /// log N(y_p; z, noise + (dof / s) scale).
  double log_expected_potential(std::size_t p, const intermediate_type& y) const;
  source_type sample_twisted(std::size_t p, const intermediate_type& y, RngStream& rng) const;

  /// Gaussian K^{G_p}([z, s], .). Throws NumericalError if the covariance is not SPD.
  GaussianPosterior posterior(std::size_t p, const intermediate_type& y) const;

  const StudentSSMParams& params() const { return params_; }

 private:
  StudentSSMParams params_;
  ObservationRecord observations_;
};

using StudentKnotModel = TerminalKnotsetModel<StudentKnotCapability>;

struct StudentSSM {
  ObservationRecord observations;
  StudentBootstrapModel model;
};

/// Simulates observations with params.data_seed and returns the bootstrap model on them.
StudentSSM student_ssm(const StudentSSMParams& params);

/// Terminal-knotset model for normalizing-constant estimation on fixed observations.
StudentKnotModel student_knot_model(const StudentSSMParams& params,
                                    const ObservationRecord& observations);

}  // namespace knotpf
