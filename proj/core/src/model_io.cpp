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

#include "knotpf/model_io.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace knotpf {
namespace {

using nlohmann::json;

json vector_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json matrix_json(const Matrix& m) {
  json out = json::array();
  for (Index r = 0; r < m.rows(); ++r) out.push_back(vector_json(m.row(r).transpose()));
  return out;
}

Vector vector_from(const json& j, const char* what) {
  if (!j.is_array()) throw FileError(std::string(what) + " must be an array of numbers");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw FileError(std::string(what) + " must be an array of numbers");
    v[static_cast<Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from(const json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw FileError(std::string(what) + " must be a non-empty matrix");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Index>(j.size()), static_cast<Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = vector_from(j[r], what);
    if (static_cast<std::size_t>(row.size()) != cols) {
      throw FileError(std::string(what) + " has rows of different lengths");
    }
    m.row(static_cast<Index>(r)) = row.transpose();
  }
  return m;
}

const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) {
    throw FileError(std::string("missing field '") + name + "'");
  }
  return j.at(name);
}

json model_json(const FKModel& model) {
  json kernels = json::array();
  for (const FiniteKernel& k : model.kernels()) kernels.push_back(matrix_json(k.matrix()));
  json potentials = json::array();
  for (const PotentialFn& g : model.potentials()) potentials.push_back(vector_json(g.values()));
  return json{{"horizon", model.horizon()},
              {"initial", vector_json(model.initial().weights())},
              {"kernels", std::move(kernels)},
              {"potentials", std::move(potentials)}};
}

FKModel model_from(const json& j) {
  const json& horizon = field(j, "horizon");
  if (!horizon.is_number_unsigned()) throw FileError("horizon must be a non-negative integer");
  const auto n = horizon.get<std::size_t>();
  const json& kernels = field(j, "kernels");
  const json& potentials = field(j, "potentials");
  if (!kernels.is_array() || kernels.size() != n) throw FileError("expected one kernel per step");
  if (!potentials.is_array() || potentials.size() != n + 1) {
    throw FileError("expected horizon + 1 potentials");
  }
  std::vector<FiniteKernel> ks;
  for (const json& k : kernels) ks.emplace_back(matrix_from(k, "kernel"));
  std::vector<PotentialFn> gs;
  for (const json& g : potentials) gs.emplace_back(vector_from(g, "potential"));
  return FKModel(FiniteMeasure(vector_from(field(j, "initial"), "initial"), true), std::move(ks),
                 std::move(gs));
}

json knots_json(const std::vector<Knot>& knots) {
  json out = json::array();
  for (const Knot& k : knots) {
    out.push_back(json{{"time", k.time},
                       {"retained", matrix_json(k.retained.matrix())},
                       {"absorbed", matrix_json(k.absorbed.matrix())}});
  }
  return out;
}

std::vector<Knot> knots_from(const json& j) {
  if (!j.is_array()) throw FileError("knots must be an array");
  std::vector<Knot> out;
  for (const json& k : j) {
    const json& time = field(k, "time");
    if (!time.is_number_unsigned()) throw FileError("knot time must be a non-negative integer");
    out.emplace_back(time.get<std::size_t>(),
                     FiniteKernel(matrix_from(field(k, "retained"), "retained")),
                     FiniteKernel(matrix_from(field(k, "absorbed"), "absorbed")));
  }
  return out;
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FileError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string model_to_json(const FKModel& model) { return model_json(model).dump(); }

FKModel model_from_json(std::string_view text) { return model_from(parse(text)); }

std::string knots_to_json(const std::vector<Knot>& knots) { return knots_json(knots).dump(); }

std::vector<Knot> knots_from_json(std::string_view text) { return knots_from(parse(text)); }

std::string case_to_json(const ModelCase& c) {
  return json{{"model", model_json(c.model)}, {"knots", knots_json(c.knots)},
              {"phi", vector_json(c.phi)}}
      .dump();
}

ModelCase case_from_json(std::string_view text) {
  const json j = parse(text);
  return ModelCase{model_from(field(j, "model")), knots_from(field(j, "knots")),
                   vector_from(field(j, "phi"), "phi")};
}

void save_model(const std::filesystem::path& path, const FKModel& model) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot write " + path.string());
  out << model_to_json(model) << '\n';
}

FKModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return model_from_json(buf.str());
}

}  // namespace knotpf
