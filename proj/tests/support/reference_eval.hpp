// Copyright 2026 The GrEff Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GREFF_TESTS_SUPPORT_REFERENCE_EVAL_HPP_
#define GREFF_TESTS_SUPPORT_REFERENCE_EVAL_HPP_

#include <cstddef>
#include <string>

#include "greff/core.hpp"
#include "greff/types.hpp"

namespace greff::reference {

// A substitution-based small-step evaluator that re-finds the redex from the
// root at every step. Shares no code with the abstract machine.
struct Result {
  enum class Kind { Value, Error, UncaughtRaise, FuelExhausted };
  Kind kind = Kind::Value;
  TermPtr value;
  std::string op;
  std::size_t steps = 0;
};

Result evaluate(const Signature& sig, const TermPtr& program,
                std::size_t fuel = 1'000'000);

// Ground rendering of a result, "<fun>" for functions.
std::string show(const Result& r);

}  // namespace greff::reference

#endif  // GREFF_TESTS_SUPPORT_REFERENCE_EVAL_HPP_
