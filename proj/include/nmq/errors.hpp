// Copyright 2026 The nmq Authors
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

#include <stdexcept>
#include <string>

namespace nmq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument is outside the mathematical domain of the operation
/// (negative rate, negative time, out-of-range expectation value, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Operator or vector dimensions do not match the declared subsystem count.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values were encountered in a numerical kernel.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Experimental records are incomplete or malformed for the requested analysis.
class DataError : public Error {
 public:
  using Error::Error;
};

/// The requested noise model cannot describe the requested experiment
/// (for example PMME with a driven schedule).
class UnsupportedModelError : public Error {
 public:
  using Error::Error;
};

}  // namespace nmq
