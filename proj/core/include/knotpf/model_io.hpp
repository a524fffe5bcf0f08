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

// JSON documents for finite models and knots. Doubles are written in their
// shortest round-trip form, so save then load reproduces every entry exactly.
//
//   model:  {"horizon": n, "initial": [..], "kernels": [[[..]], ..], "potentials": [[..], ..]}
//   knot:   {"time": t, "retained": [[..]], "absorbed": [[..]]}

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "knotpf/knots.hpp"

namespace knotpf {

std::string model_to_json(const FKModel& model);
/// Throws FileError on malformed input; model validation errors propagate.
FKModel model_from_json(std::string_view text);

std::string knots_to_json(const std::vector<Knot>& knots);
std::vector<Knot> knots_from_json(std::string_view text);

/// A model with the knots and test function a check was run on.
struct ModelCase {
  FKModel model;
  std::vector<Knot> knots;
  Vector phi;
};

std::string case_to_json(const ModelCase& c);
ModelCase case_from_json(std::string_view text);

void save_model(const std::filesystem::path& path, const FKModel& model);
FKModel load_model(const std::filesystem::path& path);

}  // namespace knotpf
