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

#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "knotpf/csv.hpp"
#include "knotpf/empirical.hpp"
#include "knotpf/finite_generative.hpp"
#include "knotpf/model_zoo.hpp"
#include "knotpf/student_ssm.hpp"
#include "knotpf/variance.hpp"
#include "knotpf/verify.hpp"

namespace knotpf::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Creates files under one root and records their relative paths.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec) throw FileError("cannot create output directory " + root_.string() + ": " + ec.message());
  }

  std::ofstream open(const std::filesystem::path& relative) {
    const std::filesystem::path full = root_ / relative;
    if (relative.has_parent_path()) {
      std::error_code ec;
      std::filesystem::create_directories(full.parent_path(), ec);
      if (ec) throw FileError("cannot create directory " + full.parent_path().string());
    }
    std::ofstream out(full, std::ios::binary | std::ios::trunc);
    if (!out) throw FileError("cannot write " + full.string());
    files_.push_back(relative);
    return out;
  }

  std::vector<std::filesystem::path> files() const { return files_; }

 private:
  std::filesystem::path root_;
  std::vector<std::filesystem::path> files_;
};

FKModel filter_model(const std::string& filter, const FKModel& model) {
  if (filter == "bootstrap") return model;
  if (filter == "full-adaptation") return full_adaptation_model(model);
  if (filter == "adapted-knotset") return adapted_knotset_model(model);
  if (filter == "adapted-terminal-knotset") return adapted_terminal_knotset_model(model);
  throw DomainError("unknown filter " + filter);
}

struct BinaryCell {
  double analytic = 0.0;
  double empirical = kNaN;
  double se = kNaN;
};

// One (epsilon, delta) grid point: every filter shares the replication seeds.
template <typename Phi>
std::map<std::string, BinaryCell> binary_grid_point(const BinarySweepParams& params,
                                                    const FKModel& model, const Vector& phi_values,
                                                    const Phi& phi, Variant variant,
                                                    std::optional<double> normalizer,
                                                    std::uint64_t seed, std::size_t jobs) {
  std::map<std::string, BinaryCell> cells;
  for (const std::string& filter : params.filters) {
    const FKModel fm = filter_model(filter, model);
    BinaryCell cell;
    cell.analytic = asymptotic_variance(fm, phi_values, variant).total;
    if (params.empirical) {
      const ReplicationPlan plan{params.particles, params.replications, ResamplingPolicy::always(),
                                 seed, jobs};
      const auto report =
          empirical_variance(finite_to_generative(fm), phi, variant, plan, normalizer);
      cell.empirical = report.scaled_variance;
      cell.se = report.standard_error;
    }
    cells.emplace(filter, cell);
  }
  return cells;
}

std::vector<std::string> variance_header() {
  return {"epsilon", "delta", "filter", "analytic", "empirical", "se"};
}

/// Type-7 sample quantile of sorted values.
double quantile(const std::vector<double>& sorted, double q) {
  const double h = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

StudentSSMParams student_params_for(const StudentParams& params, std::size_t d) {
  const auto seed = params.data_seeds.find(d);
  StudentSSMParams p = StudentSSMParams::standard(d, seed == params.data_seeds.end() ? 0 : seed->second);
  p.horizon = params.horizon;
  p.dof = params.dof;
  return p;
}

ObservationRecord student_observations(const StudentParams& params, const StudentSSMParams& model,
                                       std::size_t d) {
  if (!params.data_dir) return simulate_observations(model);
  const auto path = *params.data_dir / ("d" + std::to_string(d) + ".csv");
  ObservationRecord obs = read_observations_csv(path);
  if (obs.dimension() != d || obs.horizon() != params.horizon) {
    throw FileError(path.string() + " holds " + std::to_string(obs.values.size()) +
                    " observations of dimension " + std::to_string(obs.dimension()) +
                    ", expected " + std::to_string(params.horizon + 1) + " of dimension " +
                    std::to_string(d));
  }
  return obs;
}

template <GenerativeModel M>
std::vector<double> log_nc_replications(const M& model, const StudentParams& params,
                                        std::uint64_t seed, std::size_t jobs) {
  const ResamplingPolicy policy = ResamplingPolicy::adaptive(params.kappa);
  return parallel_map(params.replications, jobs, [&](std::size_t r) {
    RngStream rng = RngStream::derive(seed, r);
    try {
      const auto ps = run_particle_filter(model, params.particles, policy, rng);
      return log_normalizing_constant(ps);
    } catch (const DegenerateWeightsError& e) {
      throw e.with_replication(r);
    }
  });
}

}  // namespace

std::uint64_t task_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(master ^ splitmix64(a + 1)) ^ splitmix64(b + 0x51ed27));
}

RunOutcome run_binary_sweep(const ExperimentConfig& config) {
  const auto& params = std::get<BinarySweepParams>(config.params);
  OutputDir out(config.output_dir);
  auto variance_file = out.open("variance.csv");
  auto excess_file = out.open("excess.csv");
  CsvWriter variance(variance_file);
  CsvWriter excess(excess_file);
  variance.row(variance_header());
  excess.row(std::vector<std::string>{"epsilon", "delta", "filter", "excess"});

  Vector phi_values(2);
  phi_values << params.phi[0], params.phi[1];
  const auto phi = [&phi_values](std::int32_t x) { return phi_values[x]; };

  for (std::size_t i = 0; i < params.epsilons.size(); ++i) {
    for (std::size_t j = 0; j < params.deltas.size(); ++j) {
      const FKModel model = binary_model({params.epsilons[i], params.deltas[j], params.y0, params.y1});
      const auto cells = binary_grid_point(params, model, phi_values, phi, Variant::updated_centered,
                                           std::nullopt, task_seed(config.seed, i, j), config.jobs);
      const double reference =
          asymptotic_variance(model, phi_values, Variant::updated_centered).total;
      for (const std::string& filter : params.filters) {
        const BinaryCell& c = cells.at(filter);
        variance.row(params.epsilons[i], params.deltas[j], filter, c.analytic, c.empirical, c.se);
        if (filter != "bootstrap") {
          excess.row(params.epsilons[i], params.deltas[j], filter, c.analytic - reference);
        }
      }
    }
  }
  RunOutcome outcome;
  outcome.files = out.files();
  outcome.summary = std::to_string(params.epsilons.size() * params.deltas.size()) + " grid points";
  return outcome;
}

RunOutcome run_binary_nc_sweep(const ExperimentConfig& config) {
  const auto& params = std::get<BinarySweepParams>(config.params);
  OutputDir out(config.output_dir);
  auto file = out.open("nc_variance.csv");
  CsvWriter csv(file);
  csv.row(variance_header());

  const Vector ones = Vector::Ones(2);
  const auto one = [](std::int32_t) { return 1.0; };
  for (std::size_t i = 0; i < params.epsilons.size(); ++i) {
    for (std::size_t j = 0; j < params.deltas.size(); ++j) {
      const FKModel model = binary_model({params.epsilons[i], params.deltas[j], params.y0, params.y1});
      const double normalizer = predictive_measures(model).normalizing_constant();
      const auto cells = binary_grid_point(params, model, ones, one, Variant::updated, normalizer,
                                           task_seed(config.seed, i, j), config.jobs);
      for (const std::string& filter : params.filters) {
        const BinaryCell& c = cells.at(filter);
        csv.row(params.epsilons[i], params.deltas[j], filter, c.analytic, c.empirical, c.se);
      }
    }
  }
  RunOutcome outcome;
  outcome.files = out.files();
  outcome.summary = std::to_string(params.epsilons.size() * params.deltas.size()) + " grid points";
  return outcome;
}

RunOutcome run_student_nc(const ExperimentConfig& config) {
  const auto& params = std::get<StudentParams>(config.params);
  OutputDir out(config.output_dir);
  auto raw_file = out.open("log_nc.csv");
  auto summary_file = out.open("summary.csv");
  CsvWriter raw(raw_file);
  CsvWriter summary(summary_file);
  raw.row(std::vector<std::string>{"dimension", "filter", "replication", "log_nc", "shifted"});
  summary.row(std::vector<std::string>{"dimension", "filter", "mean", "variance", "se", "min", "q25",
                                       "median", "q75", "max", "variance_ratio"});

  std::ostringstream note;
  for (std::size_t k = 0; k < params.dimensions.size(); ++k) {
    const std::size_t d = params.dimensions[k];
    const StudentSSMParams model = student_params_for(params, d);
    const ObservationRecord obs = student_observations(params, model, d);
    const std::uint64_t seed = task_seed(config.seed, d);

    std::map<std::string, std::vector<double>> runs;
    for (const std::string& filter : params.filters) {
      if (filter == "bootstrap") {
        runs[filter] = log_nc_replications(StudentBootstrapModel(model, obs), params, seed, config.jobs);
      } else {
        runs[filter] = log_nc_replications(student_knot_model(model, obs), params, seed, config.jobs);
      }
    }
    // Shift by the knotset mean when that filter ran, else by the first filter's mean.
    const auto& anchor = runs.count("knotset") ? runs.at("knotset") : runs.at(params.filters[0]);
    const double shift = sample_variance_jackknife(anchor).mean;

    std::map<std::string, VarianceEstimate> stats;
    for (const std::string& filter : params.filters) {
      stats[filter] = sample_variance_jackknife(runs.at(filter));
    }
    for (const std::string& filter : params.filters) {
      const auto& values = runs.at(filter);
      for (std::size_t r = 0; r < values.size(); ++r) raw.row(d, filter, r, values[r], values[r] - shift);
      std::vector<double> sorted = values;
      std::sort(sorted.begin(), sorted.end());
      const VarianceEstimate& s = stats.at(filter);
      const double ratio =
          stats.count("bootstrap") ? s.variance / stats.at("bootstrap").variance : kNaN;
      summary.row(d, filter, s.mean, s.variance, s.standard_error, sorted.front(),
                  quantile(sorted, 0.25), quantile(sorted, 0.5), quantile(sorted, 0.75),
                  sorted.back(), ratio);
      note << (note.tellp() > 0 ? "; " : "") << "d=" << d << " " << filter
           << " var=" << format_double(s.variance);
    }
  }
  RunOutcome outcome;
  outcome.files = out.files();
  outcome.summary = note.str();
  return outcome;
}

RunOutcome run_verify(const ExperimentConfig& config) {
  const auto& params = std::get<VerifyParams>(config.params);
  VerifyOptions options;
  options.seed = config.seed;
  options.instances = params.instances;
  options.corrupt_knot = params.corrupt_knot;
  options.only = params.checks;
  const VerifyReport report = run_verification(options);

  OutputDir out(config.output_dir);
  {
    auto file = out.open("report.txt");
    file << "knotpf verify: seed " << report.seed << ", " << report.instances
         << " instances per check, " << report.checks.size() << " checks\n";
    for (const CheckResult& c : report.checks) {
      file << (c.passed() ? "PASS " : "FAIL ") << c.name << ": " << c.description << " ("
           << c.failures << "/" << c.instances << " failed, worst error "
           << format_double(c.worst_error) << ", tolerance " << format_double(c.tolerance) << ")\n";
      if (!c.passed()) {
        file << "  first failure at instance " << *c.first_failure << ": " << c.failure_message
             << "\n";
      }
    }
    file << (report.passed() ? "all checks passed\n" : "verification FAILED\n");
  }
  {
    auto file = out.open("verify.csv");
    CsvWriter csv(file);
    csv.row(std::vector<std::string>{"check", "passed", "instances", "failures", "worst_error",
                                     "tolerance", "first_failure"});
    for (const CheckResult& c : report.checks) {
      csv.row(c.name, c.passed() ? "true" : "false", c.instances, c.failures, c.worst_error,
              c.tolerance, c.first_failure ? std::to_string(*c.first_failure) : std::string());
    }
  }
  for (const CheckResult& c : report.checks) {
    if (c.passed()) continue;
    nlohmann::ordered_json doc;
    doc["check"] = c.name;
    doc["seed"] = report.seed;
    doc["instance"] = *c.first_failure;
    doc["message"] = c.failure_message;
    doc["case"] = c.failure_case.empty() ? nlohmann::ordered_json()
                                         : nlohmann::ordered_json::parse(c.failure_case);
    auto file = out.open(std::filesystem::path("failures") / (c.name + ".json"));
    file << doc.dump(2) << '\n';
  }

  RunOutcome outcome;
  outcome.files = out.files();
  outcome.passed = report.passed();
  std::size_t failed = 0;
  for (const CheckResult& c : report.checks) failed += c.passed() ? 0 : 1;
  outcome.summary = std::to_string(report.checks.size() - failed) + "/" +
                    std::to_string(report.checks.size()) + " checks passed";
  return outcome;
}

RunOutcome run_simulate_student(const ExperimentConfig& config) {
  const auto& params = std::get<StudentParams>(config.params);
  OutputDir out(config.output_dir);
  for (std::size_t d : params.dimensions) {
    const StudentSSMParams model = student_params_for(params, d);
    auto file = out.open("d" + std::to_string(d) + ".csv");
    write_observations_csv(file, simulate_observations(model));
  }
  RunOutcome outcome;
  outcome.files = out.files();
  outcome.summary = std::to_string(params.dimensions.size()) + " datasets";
  return outcome;
}

RunOutcome run_experiment(const ExperimentConfig& config) {
  switch (config.kind) {
    case ExperimentKind::binary_sweep: return run_binary_sweep(config);
    case ExperimentKind::binary_nc_sweep: return run_binary_nc_sweep(config);
    case ExperimentKind::student_nc: return run_student_nc(config);
    case ExperimentKind::verify: return run_verify(config);
    case ExperimentKind::simulate_student: return run_simulate_student(config);
  }
  throw ConfigError("unknown experiment kind");
}

}  // namespace knotpf::cli
