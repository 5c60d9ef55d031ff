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

#ifndef GREFF_CORE_HPP_
#define GREFF_CORE_HPP_

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "greff/types.hpp"

namespace greff {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

enum class CastDir { Up, Down };
enum class HandlerKind { Deep, Shallow };

namespace node {

struct Var { std::string name; };
struct BoolLit { bool value; };
struct UnitLit {};
struct StrLit { std::string value; };
struct Err {};

// The annotation carries the whole arrow so checking stays syntax directed.
struct Lambda {
  std::string param;
  ValueType param_type;
  EffectType eff;
  ValueType cod;
  TermPtr body;
};

struct App { TermPtr fn, arg; };
struct Let { std::string name; TermPtr bound, body; };
struct If { TermPtr cond, then_branch, else_branch; };

struct Raise {
  std::string op;
  ValueType req;
  ValueType resp;
  TermPtr arg;
};

struct Clause {
  std::string op;
  std::string payload;
  std::string cont;
  ValueType req;
  ValueType resp;
  TermPtr body;
};

struct Handle {
  HandlerKind kind;
  TermPtr scrutinee;
  std::string ret_var;
  TermPtr ret_body;
  std::vector<Clause> clauses;  // sorted by op
  EffectType result_eff;
  ValueType result_type;
  // Shallow handlers type their continuation at the scrutinee's typing.
  EffectType scrut_eff;
  ValueType scrut_type;

  const Clause* find(const std::string& op) const;
};

// ⟨imprecise ↢ ...⟩ / ⟨precise ↣ imprecise⟩; `precise` ⊑ `imprecise`.
struct ValCast {
  CastDir dir;
  ValueType precise;
  ValueType imprecise;
  TermPtr body;
};

struct EffCast {
  CastDir dir;
  EffectType precise;
  EffectType imprecise;
  TermPtr body;
};

struct Fix { std::string name; ValueType type; TermPtr body; };

struct EmptyQueue { ValueType elem; };
// Runtime queue value; items are values.
struct QueueLit { ValueType elem; std::vector<TermPtr> items; };
struct Enqueue { TermPtr queue, item; };
struct CaseQueue {
  TermPtr scrutinee;
  TermPtr empty_branch;
  std::string head;
  std::string tail;
  TermPtr cons_branch;
};
struct Concat { TermPtr lhs, rhs; };

}  // namespace node

struct Term {
  using Node = std::variant<node::Var, node::BoolLit, node::UnitLit,
                            node::StrLit, node::Err, node::Lambda, node::App,
                            node::Let, node::If, node::Raise, node::Handle,
                            node::ValCast, node::EffCast, node::Fix,
                            node::EmptyQueue, node::QueueLit, node::Enqueue,
                            node::CaseQueue, node::Concat>;
  Node node;

  template <typename T>
  const T* as() const { return std::get_if<T>(&node); }
  template <typename T>
  bool is() const { return std::holds_alternative<T>(node); }
};

// Builders. Casts check precision of their endpoints.
namespace core {

TermPtr var(std::string name);
TermPtr boolean(bool v);
TermPtr unit();
TermPtr str(std::string s);
TermPtr err();
TermPtr lambda(std::string x, ValueType a, EffectType eff, ValueType b,
               TermPtr body);
TermPtr app(TermPtr f, TermPtr a);
TermPtr let(std::string x, TermPtr bound, TermPtr body);
TermPtr if_(TermPtr c, TermPtr t, TermPtr e);
TermPtr raise(std::string op, ValueType req, ValueType resp, TermPtr arg);
TermPtr handle(node::Handle h);
TermPtr val_up(ValueType precise, ValueType imprecise, TermPtr body);
TermPtr val_down(ValueType precise, ValueType imprecise, TermPtr body);
TermPtr eff_up(EffectType precise, EffectType imprecise, TermPtr body);
TermPtr eff_down(EffectType precise, EffectType imprecise, TermPtr body);
TermPtr val_cast(CastDir dir, ValueType precise, ValueType imprecise,
                 TermPtr body);
TermPtr eff_cast(CastDir dir, EffectType precise, EffectType imprecise,
                 TermPtr body);
TermPtr fix(std::string f, ValueType a, TermPtr body);
TermPtr empty_queue(ValueType elem);
TermPtr queue_lit(ValueType elem, std::vector<TermPtr> items);
TermPtr enqueue(TermPtr q, TermPtr x);
TermPtr case_queue(TermPtr q, TermPtr empty, std::string h, std::string t,
                   TermPtr cons);
TermPtr concat(TermPtr a, TermPtr b);

}  // namespace core

bool is_value(const Term& t);
bool is_value(const TermPtr& t);

// M[V/x]; V must be closed.
TermPtr substitute(const TermPtr& in, const std::string& x, const TermPtr& v);

bool structurally_equal(const TermPtr& a, const TermPtr& b);
std::size_t term_size(const TermPtr& t);

// Round-trippable S-expression form.
std::string print_term(const TermPtr& t);
// The same form broken over indented lines; reads back identically.
std::string pretty_term(const TermPtr& t, std::size_t width = 80);
std::string print_type(const ValueType& t);
std::string print_effect(const EffectType& e);
TermPtr read_term(std::string_view text);
ValueType read_type(std::string_view text);
EffectType read_effect(std::string_view text);

// ---- typing ----------------------------------------------------------------

// The set of effect types a term can be given, closed under subsumption:
// Pure admits everything, Bounded admits every concrete τ ≥ ops (and ? when
// dyn_ok), DynOnly admits only ?.
struct EffectBound {
  enum class Kind { Pure, Bounded, DynOnly };
  Kind kind = Kind::Pure;
  OpMap ops;
  bool dyn_ok = false;

  static EffectBound pure() { return {}; }
  static EffectBound dyn_only() { return {Kind::DynOnly, {}, true}; }
  static EffectBound bounded(OpMap ops, bool dyn_ok) {
    return {Kind::Bounded, std::move(ops), dyn_ok};
  }
  static EffectBound exactly(const EffectType& e);

  bool admits(const EffectType& e) const;
  // The least effect type admitted: ∅ for Pure.
  EffectType minimal() const;
};

struct Typing {
  EffectBound effect;
  std::optional<ValueType> type;  // absent: ℧ inhabits every type
};

using TypeEnv = std::vector<std::pair<std::string, ValueType>>;

bool wellformed(const Signature& sig, const ValueType& t);
bool wellformed(const Signature& sig, const EffectType& e);

Typing typecheck(const Signature& sig, const TypeEnv& env, const TermPtr& m);
// Throws TypeError unless m checks at (σ, A).
void check(const Signature& sig, const TypeEnv& env, const TermPtr& m,
           const EffectType& eff, const ValueType& type);
bool checks(const Signature& sig, const TypeEnv& env, const TermPtr& m,
            const EffectType& eff, const ValueType& type);

}  // namespace greff

#endif  // GREFF_CORE_HPP_
