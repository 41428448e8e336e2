// Copyright 2026 The qramp Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace qramp {

/// Bad input: dimension mismatch, out-of-range parameter, malformed config.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation failed to meet its numerical contract (integrator underflow,
/// eigensolver non-convergence, non-finite objective).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A root bracket does not contain a crossing.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ground state not isolated; scenarios require a unique ground state.
class DegeneracyError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace qramp
