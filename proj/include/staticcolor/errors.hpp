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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace staticcolor {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration: zero gain, missing band, bad thresholds.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Sample values that cannot be processed (non-finite raw values).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content or unknown sample type.
class FormatError : public Error {
 public:
  using Error::Error;
};

class TruncatedFileError : public FormatError {
 public:
  using FormatError::FormatError;
};

/// Could not open, read or write a path.
class IoError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A label has no image under a legend mapping, or the mapping is ambiguous.
class MappingError : public Error {
 public:
  using Error::Error;
};

/// Rule-file syntax or semantic error, located at a 1-based line and column.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

  /// Same location, message prefixed with the file it came from.
  ParseError in_file(const std::string& path) const {
    return ParseError(path + ":" + what(), line_, column_, Raw{});
  }

 private:
  struct Raw {};
  ParseError(const std::string& full, std::size_t line, std::size_t column, Raw)
      : Error(full), line_(line), column_(column) {}

  std::size_t line_;
  std::size_t column_;
};

}  // namespace staticcolor
