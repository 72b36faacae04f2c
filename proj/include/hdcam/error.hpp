// Copyright 2026 The hdcam Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hdcam {

// Error kinds map onto CLI exit codes: config -> 1, io -> 2, domain -> 3.
enum class ErrorKind { config, io, domain };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string name, const std::string& what)
      : std::runtime_error(what), kind_(kind), name_(std::move(name)) {}

  ErrorKind kind() const { return kind_; }
  // Short machine-readable tag, e.g. "dimension" or "parse".
  const std::string& name() const { return name_; }

 private:
  ErrorKind kind_;
  std::string name_;
};

struct DimensionError : Error {
  explicit DimensionError(const std::string& what)
      : Error(ErrorKind::domain, "dimension", what) {}
};

struct CapacityError : Error {
  explicit CapacityError(const std::string& what)
      : Error(ErrorKind::domain, "capacity", what) {}
};

struct EmptyInputError : Error {
  explicit EmptyInputError(const std::string& what)
      : Error(ErrorKind::domain, "empty_input", what) {}
};

struct NormalizationError : Error {
  explicit NormalizationError(const std::string& what)
      : Error(ErrorKind::domain, "normalization", what) {}
};

struct UnknownNodeError : Error {
  explicit UnknownNodeError(const std::string& what)
      : Error(ErrorKind::domain, "unknown_node", what) {}
};

struct StateError : Error {
  explicit StateError(const std::string& what)
      : Error(ErrorKind::domain, "state", what) {}
};

struct ParseError : Error {
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorKind::io, "parse",
              "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct FormatError : Error {
  explicit FormatError(const std::string& what)
      : Error(ErrorKind::io, "format", what) {}
};

struct IoError : Error {
  explicit IoError(const std::string& what)
      : Error(ErrorKind::io, "io", what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::config, "config", what) {}
};

}  // namespace hdcam
