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

#ifndef GREFF_ERROR_HPP_
#define GREFF_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace greff {

struct SourcePos {
  int line = 0;
  int column = 0;

  bool known() const { return line > 0; }
  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

enum class ErrorKind {
  Lexical,
  Syntax,
  DuplicateModule,
  DuplicateClause,
  DuplicateEffect,
  UnknownModule,
  UnknownName,
  UnknownEffect,
  IncompatibleEffectImport,
  IncompatibleValueImport,
  TypeMismatch,
  UnhandledEffect,
  JoinUndefined,
  CastUnjustified,
  TypeError,
  WellFormedness,
  EndpointMismatch,
  PreconditionViolated,
  DecompositionFailed,
};

std::string_view error_kind_name(ErrorKind kind);

// Every static failure in the pipeline is reported through this one type.
class GreffError : public std::runtime_error {
 public:
  GreffError(ErrorKind kind, std::string message, SourcePos pos = {});

  ErrorKind kind() const { return kind_; }
  const SourcePos& pos() const { return pos_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  SourcePos pos_;
  std::string detail_;
};

}  // namespace greff

#endif  // GREFF_ERROR_HPP_
