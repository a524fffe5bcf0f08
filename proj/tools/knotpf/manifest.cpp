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

#include "manifest.hpp"

#include <array>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <boost/crc.hpp>
#include <nlohmann/json.hpp>

#include "knotpf/errors.hpp"
#include "knotpf/version.hpp"

namespace knotpf::cli {
namespace {

std::string hex32(std::uint32_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(8) << std::setfill('0') << v;
  return s.str();
}

}  // namespace

std::uint32_t crc32_of(const std::string& bytes) {
  boost::crc_32_type crc;
  crc.process_bytes(bytes.data(), bytes.size());
  return crc.checksum();
}

FileChecksum checksum_file(const std::filesystem::path& root, const std::filesystem::path& relative) {
  std::ifstream in(root / relative, std::ios::binary);
  if (!in) throw FileError("cannot read " + (root / relative).string());
  boost::crc_32_type crc;
  std::array<char, 1 << 16> buf{};
  FileChecksum out;
  out.path = relative;
  while (in) {
    in.read(buf.data(), buf.size());
    const auto got = in.gcount();
    crc.process_bytes(buf.data(), static_cast<std::size_t>(got));
    out.bytes += static_cast<std::uintmax_t>(got);
  }
  out.crc32 = crc.checksum();
  return out;
}

RunManifest make_manifest(const ExperimentConfig& config,
                          const std::vector<std::filesystem::path>& files, double runtime_seconds) {
  RunManifest m;
  m.kind = std::string(to_string(config.kind));
  m.version = kVersion;
  // Object keys dump in sorted order, so the hash ignores key order in the file.
  m.config_crc32 = crc32_of(config.document.dump());
  for (const auto& f : files) m.files.push_back(checksum_file(config.output_dir, f));
  m.runtime_seconds = runtime_seconds;
  return m;
}

void write_manifest(const std::filesystem::path& output_dir, const RunManifest& manifest) {
  nlohmann::ordered_json doc;
  doc["kind"] = manifest.kind;
  doc["version"] = manifest.version;
  doc["config_crc32"] = hex32(manifest.config_crc32);
  doc["files"] = nlohmann::ordered_json::array();
  for (const FileChecksum& f : manifest.files) {
    doc["files"].push_back({{"path", f.path.generic_string()},
                            {"bytes", f.bytes},
                            {"crc32", hex32(f.crc32)}});
  }
  doc["runtime_seconds"] = manifest.runtime_seconds;
  std::ofstream out(output_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot write " + (output_dir / "manifest.json").string());
  out << doc.dump(2) << '\n';
}

}  // namespace knotpf::cli
