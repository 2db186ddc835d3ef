/*
 * Copyright 2026 The staticcolor Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "staticcolor/errors.hpp"

namespace staticcolor {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace detail

/// Shortest text that parses back to exactly `value`.
inline std::string format_number(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw FormatError("cannot format number");
  return std::string(buf, end);
}

inline std::optional<double> parse_double(std::string_view text) {
  text = detail::trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

template <typename Int>
std::optional<Int> parse_integer(std::string_view text) {
  text = detail::trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  Int value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) return std::nullopt;
  return value;
}

/// Line-oriented `key = value` sidecar header. Key order is preserved so a
/// parsed header re-serializes byte-identically when it was written by
/// `to_string`. Lines starting with '#' are comments and are dropped.
class Header {
 public:
  using Entry = std::pair<std::string, std::string>;

  static Header parse(std::string_view text) {
    Header header;
    std::size_t line_no = 0;
    while (!text.empty()) {
      ++line_no;
      const auto nl = text.find('\n');
      std::string_view line = text.substr(0, nl);
      text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
      line = detail::trim(line);
      if (line.empty() || line.front() == '#') continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw FormatError("header line " + std::to_string(line_no) + ": expected 'key = value'");
      }
      std::string key(detail::trim(line.substr(0, eq)));
      std::string value(detail::trim(line.substr(eq + 1)));
      if (key.empty()) {
        throw FormatError("header line " + std::to_string(line_no) + ": empty key");
      }
      if (header.find(key)) {
        throw FormatError("header line " + std::to_string(line_no) + ": duplicate key '" + key +
                          "'");
      }
      header.entries_.emplace_back(std::move(key), std::move(value));
    }
    return header;
  }

  static Header load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open header " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
      return parse(buf.str());
    } catch (const FormatError& e) {
      throw FormatError(path.string() + ": " + e.what());
    }
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write header " + path.string());
    out << to_string();
    if (!out) throw IoError("short write to " + path.string());
  }

  std::string to_string() const {
    std::string text;
    for (const auto& [key, value] : entries_) {
      text += key;
      text += " = ";
      text += value;
      text += '\n';
    }
    return text;
  }

  void set(const std::string& key, std::string value) {
    for (auto& entry : entries_) {
      if (entry.first == key) {
        entry.second = std::move(value);
        return;
      }
    }
    entries_.emplace_back(key, std::move(value));
  }
  void set(const std::string& key, double value) { set(key, format_number(value)); }
  void set(const std::string& key, std::size_t value) { set(key, std::to_string(value)); }
  void set(const std::string& key, int value) { set(key, std::to_string(value)); }
  void set(const std::string& key, const char* value) { set(key, std::string(value)); }

  std::optional<std::string> find(std::string_view key) const {
    for (const auto& entry : entries_) {
      if (entry.first == key) return entry.second;
    }
    return std::nullopt;
  }

  const std::string& at(std::string_view key) const {
    for (const auto& entry : entries_) {
      if (entry.first == key) return entry.second;
    }
    throw FormatError("header is missing key '" + std::string(key) + "'");
  }

  double number(std::string_view key) const {
    const auto value = parse_double(at(key));
    if (!value) throw FormatError("header key '" + std::string(key) + "' is not a number");
    return *value;
  }

  std::optional<double> optional_number(std::string_view key) const {
    if (!find(key)) return std::nullopt;
    return number(key);
  }

  std::size_t count(std::string_view key) const {
    const auto value = parse_integer<std::size_t>(at(key));
    if (!value) {
      throw FormatError("header key '" + std::string(key) + "' is not a non-negative integer");
    }
    return *value;
  }

  const std::vector<Entry>& entries() const noexcept { return entries_; }

  friend bool operator==(const Header&, const Header&) = default;

 private:
  std::vector<Entry> entries_;
};

}  // namespace staticcolor
