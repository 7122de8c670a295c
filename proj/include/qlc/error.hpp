// Copyright 2026 The qlc Authors
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

#ifndef QLC_ERROR_HPP
#define QLC_ERROR_HPP

#include <functional>
#include <stdexcept>
#include <string>

namespace qlc {

/// Base of every error raised by the library. The C API maps each subclass
/// onto one status code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: shape mismatch, out-of-range parameter, broken invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Floating-point failure: non-convergence, integrator instability,
/// non-real expectation value.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Objective returned a non-finite value during optimization.
class OptimizationError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Training diverged (MSE became non-finite).
class TrainingError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Malformed file or document. Carries the 1-based line when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Warnings (underflow fallbacks, constant normalizer columns, ...) are routed
/// through a process-wide sink. The default writes to stderr.
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace qlc

#endif  // QLC_ERROR_HPP
