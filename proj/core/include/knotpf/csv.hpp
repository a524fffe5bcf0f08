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

// Deterministic CSV output. Doubles use the shortest representation that
// round-trips, so files are byte-stable across runs and platforms.

#include <charconv>
#include <cmath>
#include <concepts>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace knotpf {

/// Shortest round-trip decimal form; "nan", "inf" and "-inf" for non-finite values.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    (write_field(fields, first), ...);
    out_ << '\n';
  }

  void row(const std::vector<std::string>& fields) {
    bool first = true;
    for (const auto& f : fields) write_field(f, first);
    out_ << '\n';
  }

 private:
  void separator(bool& first) {
    if (!first) out_ << ',';
    first = false;
  }

  void write_field(double v, bool& first) {
    separator(first);
    out_ << format_double(v);
  }

  template <std::integral T>
  void write_field(T v, bool& first) {
    separator(first);
    out_ << v;
  }

  void write_field(std::string_view s, bool& first) {
    separator(first);
    if (s.find_first_of(",\"\n") == std::string_view::npos) {
      out_ << s;
      return;
    }
    out_ << '"';
    for (char c : s) {
      if (c == '"') out_ << '"';
      out_ << c;
    }
    out_ << '"';
  }

  void write_field(const std::string& s, bool& first) { write_field(std::string_view(s), first); }
  void write_field(const char* s, bool& first) { write_field(std::string_view(s), first); }

  std::ostream& out_;
};

}  // namespace knotpf
