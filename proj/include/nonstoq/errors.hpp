// Copyright 2026 The nonstoq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NONSTOQ_ERRORS_HPP
#define NONSTOQ_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nonstoq {

/// Bad arguments to a library call (wrong lengths, out-of-range indices, ...).
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed model or configuration input. The CLI maps this to exit code 2.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Base of every failure raised while computing something. The CLI maps
/// these to exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedInverseError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Raised when the effective transverse field is not strictly positive and
/// the Trotter coupling diverges. Callers switch to the classical branch.
class DegenerateFieldError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientStatisticsError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoCrossingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ExtrapolationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class MustSelectError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SizeLimitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// File system failures. The CLI maps this to exit code 4.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nonstoq

#endif  // NONSTOQ_ERRORS_HPP
