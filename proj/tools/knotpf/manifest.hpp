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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace knotpf::cli {

struct FileChecksum {
  std::filesystem::path path;  // relative to the output directory
  std::uintmax_t bytes = 0;
  std::uint32_t crc32 = 0;
};

struct RunManifest {
  std::string kind;
  std::string version;
  std::uint32_t config_crc32 = 0;
  std::vector<FileChecksum> files;
  double runtime_seconds = 0.0;
};

std::uint32_t crc32_of(const std::string& bytes);
/// Throws FileError if the file cannot be read.
FileChecksum checksum_file(const std::filesystem::path& root, const std::filesystem::path& relative);

RunManifest make_manifest(const ExperimentConfig& config,
                          const std::vector<std::filesystem::path>& files, double runtime_seconds);

/// Writes manifest.json into the output directory.
void write_manifest(const std::filesystem::path& output_dir, const RunManifest& manifest);

}  // namespace knotpf::cli
