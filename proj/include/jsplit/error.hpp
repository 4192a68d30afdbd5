// Copyright 2026 The jsplit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jsplit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

/// Zero or structurally missing diagonal entry.
class SingularDiagonalError : public Error {
public:
  explicit SingularDiagonalError(std::size_t row)
      : Error("singular diagonal at row " + std::to_string(row)), row_(row) {}

  std::size_t row() const noexcept { return row_; }

private:
  std::size_t row_;
};

class InvalidMatrixError : public Error {
public:
  using Error::Error;
};

/// Malformed or unsupported file content.
class FormatError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

class PartitionError : public Error {
public:
  using Error::Error;
};

/// Raised inside the message-passing fabric (timeouts, protocol mismatches).
class FabricError : public Error {
public:
  using Error::Error;
};

}  // namespace jsplit
