// Copyright 2026 The urnn-equiv Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace urnn {

// Base class for every error raised by the library. The CLI maps the
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: non-finite entries, wrong shapes, bad flags.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

// A mathematical precondition of an operation does not hold
// (e.g. a non-contractive source handed to the unitary embedding).
class PreconditionError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class UnsupportedActivation : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

// An iterative method failed or the problem is numerically degenerate.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

class NonConvergence : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

// Simulation produced a non-finite state.
class OverflowError : public NumericalFailure {
 public:
  OverflowError(const std::string& what, std::size_t step)
      : NumericalFailure(what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace urnn
