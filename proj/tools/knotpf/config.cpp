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

#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "knotpf/verify.hpp"

namespace knotpf::cli {
namespace {

using nlohmann::json;

// Read access to one JSON object that reports failures with a dotted path.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("", "must be an object");
  }

  [[noreturn]] void fail(std::string_view key, std::string_view message) const {
    std::string where = path_;
    if (!key.empty()) where += (where.empty() ? "" : ".") + std::string(key);
    throw ConfigError(where + ": " + std::string(message));
  }

  bool has(std::string_view key) const { return node_.contains(std::string(key)); }
  const json& at(std::string_view key) const {
    if (!has(key)) fail(key, "is required");
    return node_.at(std::string(key));
  }
  std::string child(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  std::uint64_t unsigned_int(std::string_view key) const {
    const json& v = at(key);
    if (!v.is_number_unsigned()) fail(key, "must be a non-negative integer");
    return v.get<std::uint64_t>();
  }
  std::uint64_t unsigned_int(std::string_view key, std::uint64_t fallback) const {
    return has(key) ? unsigned_int(key) : fallback;
  }
  std::size_t count(std::string_view key, std::size_t fallback, std::size_t minimum) const {
    const std::size_t v = has(key) ? static_cast<std::size_t>(unsigned_int(key)) : fallback;
    if (v < minimum) fail(key, "must be at least " + std::to_string(minimum));
    return v;
  }
  double number(std::string_view key) const {
    const json& v = at(key);
    if (!v.is_number()) fail(key, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(key, "must be finite");
    return d;
  }
  double number(std::string_view key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }
  bool boolean(std::string_view key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) fail(key, "must be true or false");
    return v.get<bool>();
  }
  std::string string(std::string_view key) const {
    const json& v = at(key);
    if (!v.is_string()) fail(key, "must be a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(std::string_view key) const {
    const json& v = at(key);
    if (v.is_number()) return {number(key)};
    if (!v.is_array() || v.empty()) fail(key, "must be a number or a non-empty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number() || !std::isfinite(v[i].get<double>())) {
        fail(std::string(key) + "[" + std::to_string(i) + "]", "must be a finite number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  std::vector<std::string> strings(std::string_view key) const {
    const json& v = at(key);
    if (!v.is_array()) fail(key, "must be an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_string()) fail(std::string(key) + "[" + std::to_string(i) + "]", "must be a string");
      out.push_back(v[i].get<std::string>());
    }
    return out;
  }

 private:
  const json& node_;
  std::string path_;
};

std::vector<std::string> filters_from(const Reader& r, ExperimentKind kind) {
  const auto& known = known_filters(kind);
  if (!r.has("filters")) return known;
  std::vector<std::string> chosen = r.strings("filters");
  if (chosen.empty()) r.fail("filters", "must name at least one filter");
  std::set<std::string> seen;
  for (const std::string& f : chosen) {
    if (std::find(known.begin(), known.end(), f) == known.end()) {
      r.fail("filters", "unknown filter '" + f + "'");
    }
    if (!seen.insert(f).second) r.fail("filters", "lists '" + f + "' twice");
  }
  // Output order follows the canonical filter order.
  std::vector<std::string> ordered;
  for (const std::string& f : known) {
    if (seen.count(f)) ordered.push_back(f);
  }
  return ordered;
}

std::vector<double> delta_grid(const Reader& r) {
  const json& g = r.at("delta_grid");
  std::vector<double> deltas;
  if (g.is_object()) {
    const Reader grid(g, r.child("delta_grid"));
    const double start = grid.number("start");
    const double stop = grid.number("stop");
    const std::size_t n = grid.count("count", 0, 1);
    if (n == 1 && start != stop) grid.fail("count", "must exceed one when start differs from stop");
    for (std::size_t i = 0; i < n; ++i) {
      deltas.push_back(n == 1 ? start
                              : start + (stop - start) * static_cast<double>(i) /
                                            static_cast<double>(n - 1));
    }
  } else {
    deltas = r.numbers("delta_grid");
  }
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0 && deltas[i] < 1.0)) {
      r.fail("delta_grid", "entry " + std::to_string(i) + " lies outside (0, 1)");
    }
  }
  return deltas;
}

BinarySweepParams binary_params(const Reader& r, ExperimentKind kind) {
  BinarySweepParams p;
  p.epsilons = r.numbers("epsilon");
  for (double e : p.epsilons) {
    if (!(e > 0.0 && e < 1.0)) r.fail("epsilon", "values must lie in (0, 1)");
  }
  p.deltas = delta_grid(r);
  if (r.has("observations")) {
    const std::vector<double> y = r.numbers("observations");
    if (y.size() != 2 || (y[0] != 0.0 && y[0] != 1.0) || (y[1] != 0.0 && y[1] != 1.0)) {
      r.fail("observations", "must be two values in {0, 1}");
    }
    p.y0 = static_cast<int>(y[0]);
    p.y1 = static_cast<int>(y[1]);
  }
  if (kind == ExperimentKind::binary_sweep && r.has("phi")) {
    const json& phi = r.at("phi");
    if (phi.is_string()) {
      if (phi.get<std::string>() != "identity") r.fail("phi", "must be \"identity\" or two numbers");
    } else {
      p.phi = r.numbers("phi");
      if (p.phi.size() != 2) r.fail("phi", "must give one value per state");
    }
  }
  p.empirical = r.boolean("empirical", true);
  p.particles = r.count("particles", p.particles, 2);
  p.replications = r.count("replications", p.replications, 2);
  p.filters = filters_from(r, kind);
  return p;
}

StudentParams student_params(const Reader& r, const std::filesystem::path& base_dir,
                             ExperimentKind kind) {
  StudentParams p;
  for (double d : r.numbers("dimensions")) {
    if (!(d >= 1.0) || d != std::floor(d)) r.fail("dimensions", "entries must be positive integers");
    p.dimensions.push_back(static_cast<std::size_t>(d));
  }
  p.horizon = r.count("horizon", p.horizon, 1);
  p.dof = r.number("dof", p.dof);
  if (!(p.dof > 0.0)) r.fail("dof", "must be positive");
  if (kind == ExperimentKind::student_nc) {
    p.particles = r.count("particles", p.particles, 1);
    p.replications = r.count("replications", p.replications, 2);
    p.kappa = r.number("kappa", p.kappa);
    if (!(p.kappa > 0.0 && p.kappa <= 1.0)) r.fail("kappa", "must lie in (0, 1]");
    p.filters = filters_from(r, kind);
    if (r.has("data_dir")) {
      std::filesystem::path dir = r.string("data_dir");
      p.data_dir = dir.is_absolute() ? dir : base_dir / dir;
    }
  }
  if (r.has("data_seeds")) {
    const Reader seeds(r.at("data_seeds"), r.child("data_seeds"));
    for (std::size_t d : p.dimensions) {
      p.data_seeds[d] = seeds.unsigned_int(std::to_string(d));
    }
  } else if (!p.data_dir) {
    r.fail("data_seeds", "is required when observations are simulated");
  }
  return p;
}

VerifyParams verify_params(const Reader& r) {
  VerifyParams p;
  p.instances = r.count("instances", p.instances, 1);
  p.corrupt_knot = r.boolean("corrupt_knot", false);
  if (r.has("checks")) {
    p.checks = r.strings("checks");
    const auto known = verification_checks();
    for (const std::string& c : p.checks) {
      if (std::find(known.begin(), known.end(), c) == known.end()) {
        r.fail("checks", "unknown check '" + c + "'");
      }
    }
  }
  return p;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::binary_sweep: return "binary-sweep";
    case ExperimentKind::binary_nc_sweep: return "binary-nc-sweep";
    case ExperimentKind::student_nc: return "student-nc";
    case ExperimentKind::verify: return "verify";
    case ExperimentKind::simulate_student: return "simulate-student";
  }
  return "unknown";
}

ExperimentKind parse_kind(std::string_view name) {
  for (ExperimentKind k : {ExperimentKind::binary_sweep, ExperimentKind::binary_nc_sweep,
                           ExperimentKind::student_nc, ExperimentKind::verify,
                           ExperimentKind::simulate_student}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown experiment kind '" + std::string(name) + "'");
}

const std::vector<std::string>& known_filters(ExperimentKind kind) {
  static const std::vector<std::string> binary{"bootstrap", "full-adaptation", "adapted-knotset"};
  static const std::vector<std::string> nc{"bootstrap", "full-adaptation",
                                           "adapted-terminal-knotset"};
  static const std::vector<std::string> student{"bootstrap", "knotset"};
  static const std::vector<std::string> none;
  switch (kind) {
    case ExperimentKind::binary_sweep: return binary;
    case ExperimentKind::binary_nc_sweep: return nc;
    case ExperimentKind::student_nc: return student;
    default: return none;
  }
}

ExperimentConfig parse_config(std::string_view text, ExperimentKind expected,
                              const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  const Reader r(doc, "");
  const std::uint64_t version = r.unsigned_int("schema_version");
  if (version != kSchemaVersion) {
    r.fail("schema_version", "must be " + std::to_string(kSchemaVersion));
  }
  const std::string kind_name = r.string("kind");
  if (kind_name != to_string(expected)) {
    r.fail("kind", "is '" + kind_name + "' but the subcommand is '" +
                       std::string(to_string(expected)) + "'");
  }
  ExperimentConfig config;
  config.kind = expected;
  config.seed = r.unsigned_int("seed");
  config.output_dir = r.has("output_dir") ? std::filesystem::path(r.string("output_dir"))
                                          : std::filesystem::path("runs") / kind_name;
  config.jobs = static_cast<std::size_t>(r.unsigned_int("jobs", 0));
  switch (expected) {
    case ExperimentKind::binary_sweep:
    case ExperimentKind::binary_nc_sweep: config.params = binary_params(r, expected); break;
    case ExperimentKind::student_nc:
    case ExperimentKind::simulate_student:
      config.params = student_params(r, base_dir, expected);
      break;
    case ExperimentKind::verify: config.params = verify_params(r); break;
  }
  config.document = std::move(doc);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentKind expected) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), expected, path.parent_path());
}

void apply_overrides(ExperimentConfig& config, const Overrides& overrides) {
  if (overrides.output_dir) {
    config.output_dir = *overrides.output_dir;
    config.document["output_dir"] = overrides.output_dir->string();
  }
  if (overrides.jobs) config.jobs = *overrides.jobs;
  if (overrides.seed) {
    config.seed = *overrides.seed;
    config.document["seed"] = *overrides.seed;
  }
  if (overrides.corrupt_knot) {
    auto* v = std::get_if<VerifyParams>(&config.params);
    if (!v) throw ConfigError("--corrupt-knot applies only to verify");
    v->corrupt_knot = true;
    config.document["corrupt_knot"] = true;
  }
}

}  // namespace knotpf::cli
