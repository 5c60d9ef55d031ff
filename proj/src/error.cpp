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

#include "greff/error.hpp"

#include <fmt/format.h>

namespace greff {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Lexical: return "LexicalError";
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::DuplicateModule: return "DuplicateModule";
    case ErrorKind::DuplicateClause: return "DuplicateClause";
    case ErrorKind::DuplicateEffect: return "DuplicateEffect";
    case ErrorKind::UnknownModule: return "UnknownModule";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::UnknownEffect: return "UnknownEffect";
    case ErrorKind::IncompatibleEffectImport: return "IncompatibleEffectImport";
    case ErrorKind::IncompatibleValueImport: return "IncompatibleValueImport";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::UnhandledEffect: return "UnhandledEffect";
    case ErrorKind::JoinUndefined: return "JoinUndefined";
    case ErrorKind::CastUnjustified: return "CastUnjustified";
    case ErrorKind::TypeError: return "TypeError";
    case ErrorKind::WellFormedness: return "WellFormednessError";
    case ErrorKind::EndpointMismatch: return "EndpointMismatch";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::DecompositionFailed: return "DecompositionFailed";
  }
  return "Error";
}

namespace {

std::string render(ErrorKind kind, const std::string& message, SourcePos pos) {
  if (pos.known()) {
    return fmt::format("{}:{}: {}: {}", pos.line, pos.column,
                       error_kind_name(kind), message);
  }
  return fmt::format("{}: {}", error_kind_name(kind), message);
}

}  // namespace

GreffError::GreffError(ErrorKind kind, std::string message, SourcePos pos)
    : std::runtime_error(render(kind, message, pos)),
      kind_(kind),
      pos_(pos),
      detail_(std::move(message)) {}

}  // namespace greff
