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

#include <complex>
#include <string>
#include <string_view>

#include "birthmark/errors.hpp"

namespace birthmark {

/// Global symmetry class of the ensemble. GOE models time-reversal-invariant
/// systems (real amplitudes), GUE systems without time reversal (complex
/// amplitudes).
enum class SymmetryClass { goe, gue };

/// Concentration parameter of the weight-vector law: squared amplitudes of a
/// Haar-random state follow Dir(alpha, ..., alpha) with alpha = 1/2 for real
/// spheres and alpha = 1 for complex ones.
constexpr double dirichlet_alpha(SymmetryClass c) {
  return c == SymmetryClass::gue ? 1.0 : 0.5;
}

constexpr bool is_complex(SymmetryClass c) { return c == SymmetryClass::gue; }

constexpr const char* to_string(SymmetryClass c) {
  return c == SymmetryClass::gue ? "GUE" : "GOE";
}

inline SymmetryClass parse_symmetry_class(std::string_view name) {
  if (name == "GUE" || name == "gue") return SymmetryClass::gue;
  if (name == "GOE" || name == "goe") return SymmetryClass::goe;
  throw ConfigError("unknown symmetry class: '" + std::string(name) +
                    "' (expected GOE or GUE)");
}

/// Maps SymmetryClass to the amplitude scalar type.
template <SymmetryClass C>
struct field_of {
  using type = std::complex<double>;
};

template <>
struct field_of<SymmetryClass::goe> {
  using type = double;
};

template <SymmetryClass C>
using field_of_t = typename field_of<C>::type;

}  // namespace birthmark
