// Copyright 2026 The GroupCL Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace groupcl {

/// Base of every error raised by the engine. `kind()` is a stable,
/// machine-readable tag used by the CLI's one-line error reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& m) : Error("dimension", m) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& m) : Error("numeric", m) {}
};

class ContractError : public Error {
 public:
  explicit ContractError(const std::string& m) : Error("contract", m) {}
};

class OracleInvalidError : public Error {
 public:
  explicit OracleInvalidError(const std::string& m) : Error("oracle-invalid", m) {}
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& m)
      : Error("parse", "line " + std::to_string(line) + ": " + m), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& m) : Error("config", m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error("io", m) {}
};

class CorruptCheckpointError : public Error {
 public:
  explicit CorruptCheckpointError(const std::string& m) : Error("corrupt-checkpoint", m) {}
};

}  // namespace groupcl
