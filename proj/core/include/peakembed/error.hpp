// Copyright 2026 The peakembed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the License for the specific language governing permissions
// and limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace peakembed {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An operation was called outside its documented domain of validity.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative procedure (projection, retry loop) ran out of budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A verified conclusion did not hold. `clause()` names it, e.g. "step(b)".
class VerificationError : public Error {
 public:
  VerificationError(std::string clause, const std::string& detail)
      : Error(clause + ": " + detail), clause_(std::move(clause)) {}
  const std::string& clause() const { return clause_; }

 private:
  std::string clause_;
};

}  // namespace peakembed
