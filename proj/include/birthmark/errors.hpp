// Copyright 2026 The birthmark Authors.
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

#pragma once

#include <stdexcept>
#include <string>

namespace birthmark {

/// Zero or mismatched dimensions.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// State or weight vector fails its normalization contract.
struct NormalizationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Bad experiment configuration (unknown label, missing field, ...).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Request would exceed a hard resource cap (dense tensor storage).
struct CapacityError : std::length_error {
  using std::length_error::length_error;
};

/// Numerical solver failed; message carries the (seed, stream) of the
/// offending matrix so the case can be reproduced.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fit produced a nonpositive denominator.
struct DegenerateFitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Failure writing results.
struct OutputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace birthmark
