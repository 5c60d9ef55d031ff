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

#ifndef GREFF_ELABORATE_HPP_
#define GREFF_ELABORATE_HPP_

#include <map>
#include <string>
#include <vector>

#include "greff/core.hpp"
#include "greff/surface.hpp"
#include "greff/types.hpp"

namespace greff {

// Γ_s for one module: effects at their local typing, values with the core
// variable that holds them.
struct ModuleContext {
  struct Value {
    std::string core_name;
    ValueType type;
  };

  std::map<std::string, OpSig> effects;
  std::map<std::string, Value> values;

  const OpSig* effect(const std::string& name) const;
  const Value* value(const std::string& name) const;
};

struct Elaboration {
  Signature sig;
  TermPtr term;
  EffectType eff;
  ValueType type;
  // Δ: exported contexts by module name.
  std::map<std::string, ModuleContext> modules;
};

struct TermElaboration {
  TermPtr term;
  EffectType eff;
  ValueType type;
};

Elaboration elab_program(const surface::Program& program);

// Elaborates one closed-over-Γ term; fresh names start from a fixed seed so
// results are reproducible.
TermElaboration elab_term(const Signature& sig, const ModuleContext& ctx,
                          const surface::TermPtr& term);

ValueType elab_type(const ModuleContext& ctx, const surface::TypePtr& t);
EffectType elab_effect(const ModuleContext& ctx, const surface::Effect& e,
                       SourcePos pos = {});

EffectType handle_scrutinee_type(const ModuleContext& ctx,
                                 const EffectType& scrutinee,
                                 const EffectType& result,
                                 const std::vector<std::string>& handled,
                                 SourcePos pos = {});

// ⟨target ↢ ⌈target⌉⟩⟨source ↣ ⌈source⌉⟩M, and the effect variant through ?.
TermPtr oblique_cast(const ValueType& target, const ValueType& source,
                     TermPtr m);
TermPtr oblique_cast(const EffectType& target, const EffectType& source,
                     TermPtr m);

}  // namespace greff

#endif  // GREFF_ELABORATE_HPP_
