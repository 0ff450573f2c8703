// Copyright 2026 The latdpc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace latdpc {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed argument: wrong dimension, non-finite component, index out of range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Inconsistent experiment or filter configuration (detected before any work runs).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical precondition violated (matrix not PSD, singular factor, ...).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// File could not be read, parsed or written.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Broken internal invariant; indicates a bug rather than bad input.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace latdpc
