// Copyright 2026 The Rearrange Authors
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

#ifndef REARRANGE_ERRORS_HPP_
#define REARRANGE_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace rearrange {

// Base of every error the library throws. Callers that only care about
// "something went wrong" catch this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed arguments: duplicate indices, mismatched lengths, bad ranges.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

// An operation's documented precondition does not hold for the input.
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

// A search or summation ran out of its configured work budget.
class BudgetExhausted : public Error {
 public:
  using Error::Error;
};

class SizeLimitExceeded : public Error {
 public:
  using Error::Error;
};

// Declared series structure and the numerical growth test disagree.
class DisagreementError : public Error {
 public:
  using Error::Error;
};

class StructureMissing : public Error {
 public:
  using Error::Error;
};

// No eta < eps bounds the unused tail terms of a condition.
class InfeasibleEta : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class ReferenceError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace rearrange

#endif  // REARRANGE_ERRORS_HPP_
