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

#include "knotpf/student_ssm.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "knotpf/csv.hpp"

namespace knotpf {
namespace {

Vector standard_normal(std::size_t d, RngStream& rng) {
  Vector z(static_cast<Index>(d));
  for (Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return z;
}

void require_spd(const Matrix& m, std::size_t d, const char* what) {
  if (m.rows() != static_cast<Index>(d) || m.cols() != static_cast<Index>(d)) {
    throw DomainError(std::string(what) + " must be " + std::to_string(d) + "x" +
                      std::to_string(d));
  }
  if (max_abs_diff(m, m.transpose()) > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff())) {
    throw DomainError(std::string(what) + " is not symmetric");
  }
  if (Eigen::LLT<Matrix>(m).info() != Eigen::Success) {
    throw DomainError(std::string(what) + " is not positive definite");
  }
}

void check_observations(const StudentSSMParams& params, const ObservationRecord& obs) {
  if (obs.values.size() != params.horizon + 1) {
    throw DimensionError("expected " + std::to_string(params.horizon + 1) +
                         " observations, got " + std::to_string(obs.values.size()));
  }
  for (const Vector& y : obs.values) {
    if (y.size() != static_cast<Index>(params.dimension)) {
      throw DimensionError("observation has wrong dimension");
    }
  }
}

double parse_double(std::string_view field) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw FileError("cannot parse number '" + std::string(field) + "'");
  }
  return v;
}

}  // namespace

StudentSSMParams StudentSSMParams::standard(std::size_t dimension, std::uint64_t data_seed) {
  const Index d = static_cast<Index>(dimension);
  StudentSSMParams p;
  p.dimension = dimension;
  p.mean = Vector::Zero(d);
  p.state_scale = Matrix::Identity(d, d);
  p.observation_cov = Matrix::Identity(d, d);
  p.mixing = tridiagonal_mixing(dimension);
  p.data_seed = data_seed;
  return p;
}

void StudentSSMParams::validate() const {
  if (dimension < 1) throw DomainError("dimension must be at least one");
  if (!(dof > 0.0) || !std::isfinite(dof)) throw DomainError("degrees of freedom must be positive");
  if (mean.size() != static_cast<Index>(dimension)) throw DomainError("mean has wrong size");
  if (mixing.rows() != static_cast<Index>(dimension) ||
      mixing.cols() != static_cast<Index>(dimension)) {
    throw DomainError("mixing matrix has wrong shape");
  }
  require_spd(state_scale, dimension, "state scale matrix");
  require_spd(observation_cov, dimension, "observation covariance");
}

Matrix tridiagonal_mixing(std::size_t dimension) {
  const Index d = static_cast<Index>(dimension);
  Matrix a = Matrix::Identity(d, d);
  for (Index i = 0; i + 1 < d; ++i) {
    a(i, i + 1) = 0.5;
    a(i + 1, i) = 0.5;
  }
  return a;
}

double kitagawa_drift(std::size_t p, double x) {
  return x / 2.0 + 25.0 * x / (1.0 + x * x) + 8.0 * std::cos(1.2 * static_cast<double>(p));
}

Vector transition_mean(const StudentSSMParams& params, std::size_t p, const Vector& x) {
  Vector g(x.size());
  for (Index i = 0; i < x.size(); ++i) g[i] = kitagawa_drift(p, x[i]);
  return params.mixing * g;
}

ObservationRecord simulate_observations(const StudentSSMParams& params) {
  params.validate();
  RngStream rng = RngStream::derive(params.data_seed, 0);
  const Matrix scale_factor = Eigen::LLT<Matrix>(params.state_scale).matrixL();
  const Matrix noise_factor = Eigen::LLT<Matrix>(params.observation_cov).matrixL();
  ObservationRecord obs;
  Vector x;
  for (std::size_t p = 0; p <= params.horizon; ++p) {
    const Vector center = p == 0 ? params.mean : transition_mean(params, p, x);
    const double s = rng.chi_squared(params.dof);
    x = center + std::sqrt(params.dof / s) * (scale_factor * standard_normal(params.dimension, rng));
    obs.values.push_back(x + noise_factor * standard_normal(params.dimension, rng));
  }
  return obs;
}

void write_observations_csv(std::ostream& out, const ObservationRecord& obs) {
  CsvWriter csv(out);
  std::vector<std::string> header{"p"};
  for (std::size_t i = 1; i <= obs.dimension(); ++i) header.push_back("y_" + std::to_string(i));
  csv.row(header);
  for (std::size_t p = 0; p < obs.values.size(); ++p) {
    std::vector<std::string> row{std::to_string(p)};
    for (Index i = 0; i < obs.values[p].size(); ++i) row.push_back(format_double(obs.values[p][i]));
    csv.row(row);
  }
}

ObservationRecord read_observations_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FileError("observation file is empty");
  ObservationRecord obs;
  std::size_t expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> fields;
    std::size_t start = 0;
    while (start <= line.size()) {
      const std::size_t comma = line.find(',', start);
      const std::size_t end = comma == std::string::npos ? line.size() : comma;
      fields.push_back(parse_double(std::string_view(line).substr(start, end - start)));
      start = end + 1;
    }
    if (fields.size() < 2) throw FileError("observation row has no values");
    if (static_cast<std::size_t>(fields[0]) != expected) {
      throw FileError("observation rows are not consecutive from time 0");
    }
    Vector y(static_cast<Index>(fields.size() - 1));
    for (Index i = 0; i < y.size(); ++i) y[i] = fields[static_cast<std::size_t>(i) + 1];
    if (!obs.values.empty() && y.size() != obs.values[0].size()) {
      throw FileError("observation rows have different dimensions");
    }
    obs.values.push_back(std::move(y));
    ++expected;
  }
  if (obs.values.empty()) throw FileError("observation file has no rows");
  return obs;
}

ObservationRecord read_observations_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open observation file " + path.string());
  return read_observations_csv(in);
}

double gaussian_log_density(const Vector& x, const Vector& mean, const Eigen::LLT<Matrix>& chol) {
  const Vector r = chol.matrixL().solve(x - mean);
  const Matrix& l = chol.matrixLLT();
  double log_det = 0.0;
  for (Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
  const double d = static_cast<double>(x.size());
  return -0.5 * (d * std::log(2.0 * std::numbers::pi) + log_det + r.squaredNorm());
}

StudentBootstrapModel::StudentBootstrapModel(StudentSSMParams params, ObservationRecord observations)
    : params_(std::move(params)), observations_(std::move(observations)) {
  params_.validate();
  check_observations(params_, observations_);
  scale_factor_ = Eigen::LLT<Matrix>(params_.state_scale).matrixL();
  noise_chol_.compute(params_.observation_cov);
}

Vector StudentBootstrapModel::scale_mixture_draw(const Vector& center, RngStream& rng) const {
  const double s = rng.chi_squared(params_.dof);
  return center + std::sqrt(params_.dof / s) * (scale_factor_ * standard_normal(params_.dimension, rng));
}

StudentBootstrapModel::state_type StudentBootstrapModel::sample_initial(RngStream& rng) const {
  return scale_mixture_draw(params_.mean, rng);
}

StudentBootstrapModel::state_type StudentBootstrapModel::sample_transition(std::size_t p,
                                                                          const state_type& x,
                                                                          RngStream& rng) const {
  return scale_mixture_draw(transition_mean(params_, p, x), rng);
}

double StudentBootstrapModel::log_potential(std::size_t p, const state_type& x) const {
  return gaussian_log_density(observations_.values[p], x, noise_chol_);
}

StudentKnotCapability::StudentKnotCapability(StudentSSMParams params, ObservationRecord observations)
    : params_(std::move(params)), observations_(std::move(observations)) {
  params_.validate();
  check_observations(params_, observations_);
}

ScaledCenter StudentKnotCapability::sample_initial_retained(RngStream& rng) const {
  return ScaledCenter{params_.mean, rng.chi_squared(params_.dof)};
}

ScaledCenter StudentKnotCapability::sample_retained(std::size_t p, const source_type& x,
                                                    RngStream& rng) const {
  Vector center = transition_mean(params_, p, x);
  return ScaledCenter{std::move(center), rng.chi_squared(params_.dof)};
}

double StudentKnotCapability::log_expected_potential(std::size_t p, const ScaledCenter& y) const {
  const Matrix cov = params_.observation_cov + (params_.dof / y.scale_draw) * params_.state_scale;
  const Eigen::LLT<Matrix> chol(cov);
  if (chol.info() != Eigen::Success) {
    throw NumericalError("predictive observation covariance lost positive definiteness");
  }
  return gaussian_log_density(observations_.values[p], y.center, chol);
}

GaussianPosterior StudentKnotCapability::posterior(std::size_t p, const ScaledCenter& y) const {
  const Matrix prior = (params_.dof / y.scale_draw) * params_.state_scale;
  const Eigen::LLT<Matrix> chol(prior + params_.observation_cov);
  if (chol.info() != Eigen::Success) {
    throw NumericalError("predictive observation covariance lost positive definiteness");
  }
  // gain = prior (prior + noise)^{-1}; both factors are symmetric.
  const Matrix gain = chol.solve(prior).transpose();
  GaussianPosterior out;
  out.mean = y.center + gain * (observations_.values[p] - y.center);
  out.covariance = prior - gain * prior;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
  return out;
}

Vector StudentKnotCapability::sample_twisted(std::size_t p, const ScaledCenter& y,
                                             RngStream& rng) const {
  const GaussianPosterior post = posterior(p, y);
  const Eigen::LLT<Matrix> chol(post.covariance);
  if (chol.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(post.covariance, Eigen::EigenvaluesOnly);
    std::ostringstream msg;
    msg << "posterior covariance at time " << p << " is not positive definite (eigenvalues "
        << eig.eigenvalues().minCoeff() << " to " << eig.eigenvalues().maxCoeff()
        << ", scale draw " << y.scale_draw << ")";
    throw NumericalError(msg.str());
  }
  return post.mean + chol.matrixL() * standard_normal(params_.dimension, rng);
}

StudentSSM student_ssm(const StudentSSMParams& params) {
  ObservationRecord obs = simulate_observations(params);
  StudentBootstrapModel model(params, obs);
  return StudentSSM{std::move(obs), std::move(model)};
}

StudentKnotModel student_knot_model(const StudentSSMParams& params,
                                    const ObservationRecord& observations) {
  return StudentKnotModel(StudentKnotCapability(params, observations));
}

}  // namespace knotpf
