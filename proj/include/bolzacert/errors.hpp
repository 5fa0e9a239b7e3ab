// Copyright 2026 The bolzacert Authors
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

#ifndef BOLZACERT_ERRORS_HPP_
#define BOLZACERT_ERRORS_HPP_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bolzacert {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed expression text. `offset` is the byte offset of the offending token.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Evaluation left the domain of an operator (log of nonpositive, x/0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inconsistent dimensions, grids, or malformed input documents.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// An iterative method hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what + " (last residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// A normal cone was requested at a point outside the set.
class InfeasiblePointError : public Error {
 public:
  using Error::Error;
};

// Polyhedral vertex enumeration beyond the supported dimension/facet counts.
class EnumerationLimitError : public Error {
 public:
  using Error::Error;
};

// The discretized objective decreased past the divergence threshold.
class UnboundedError : public Error {
 public:
  using Error::Error;
};

}  // namespace bolzacert

#endif  // BOLZACERT_ERRORS_HPP_
