// Copyright 2026 The ssvqd Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ssvqd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text (FCIDUMP header, config file).
class ParseError : public Error {
 public:
  using Error::Error;
};

/// An index or count outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Conflicting data, e.g. the same integral stored twice with different values.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

/// Operand shapes that do not fit together.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Matrix without full column rank passed to orthogonalization.
class RankError : public Error {
 public:
  using Error::Error;
};

/// An iterative solver ran out of iterations. Carries the best residuals seen.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : Error(what), residuals_(std::move(residuals)) {}

  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

}  // namespace ssvqd
