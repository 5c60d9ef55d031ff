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

#ifndef GREFF_SURFACE_HPP_
#define GREFF_SURFACE_HPP_

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "greff/error.hpp"

namespace greff::surface {

// `?` or a finite set of operation names, kept sorted.
struct Effect {
  bool dynamic = false;
  std::vector<std::string> names;

  static Effect dyn() { return {true, {}}; }
  static Effect of(std::vector<std::string> names);

  friend bool operator==(const Effect&, const Effect&) = default;
};

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
  enum class Kind { Bool, Unit, Str, Queue, Arrow };
  Kind kind = Kind::Bool;
  TypePtr a;  // queue element or arrow domain
  Effect eff;
  TypePtr b;  // arrow codomain
  SourcePos pos;

  static TypePtr boolean(SourcePos p = {});
  static TypePtr unit(SourcePos p = {});
  static TypePtr str(SourcePos p = {});
  static TypePtr queue(TypePtr elem, SourcePos p = {});
  static TypePtr arrow(TypePtr dom, Effect eff, TypePtr cod, SourcePos p = {});
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Clause {
  std::string op;
  std::string payload;
  std::string cont;
  TermPtr body;
  SourcePos pos;
};

struct Term {
  enum class Kind {
    Var, True, False, Str, Unit, Empty,
    Lambda,      // name : type . kids[0]
    App,         // kids[0] kids[1]
    Let,         // let name = kids[0] in kids[1]
    Seq,         // kids[0]; kids[1]
    If,          // kids[0..2]
    Raise,       // raise name kids[0]
    Handle,      // kids[0] scrutinee, kids[1] return body
    AscribeType, // kids[0] :: type
    AscribeEff,  // kids[0] :: [eff]
    Concat,      // kids[0] ++ kids[1]
    Enqueue,     // enqueue kids[0] kids[1]
    Match,       // kids[0] scrutinee, kids[1] empty branch, kids[2] cons branch
  };

  Kind kind = Kind::Unit;
  SourcePos pos;
  std::string name;  // Var, Str text, Lambda/Let binder, Raise op
  TypePtr type;      // Lambda annotation, AscribeType, Handle result type
  Effect eff;        // AscribeEff, Handle result effect
  std::vector<TermPtr> kids;
  bool shallow = false;   // Handle
  std::string ret_var;    // Handle
  std::vector<Clause> clauses;
  std::string head;       // Match
  std::string tail;       // Match
};

TermPtr make_term(Term t);

struct Decl {
  enum class Kind { NewEffect, ImportEffect, DefineValue, ImportValue };
  Kind kind = Kind::NewEffect;
  SourcePos pos;
  std::string module;  // imports
  std::string name;    // effect name, defined value, or imported source
  std::string local;   // ImportValue local name
  TypePtr req;
  TypePtr resp;
  TypePtr type;
  TermPtr body;
};

struct Module {
  std::string name;
  std::vector<Decl> decls;
  SourcePos pos;
};

// A program either ends in a `main { b; M }` block or, with no block and a
// null main_term, in `module Main where ... define main : A = M`.
struct Program {
  std::vector<Module> modules;
  std::vector<Decl> main_decls;
  TermPtr main_term;
  SourcePos main_pos;
};

// The block form: module Main becomes `main { ...; M :: A }`.
Program desugar_main(const Program& p);

Program parse_program(std::string_view source);
TermPtr parse_term(std::string_view source);
TypePtr parse_type(std::string_view source);

std::string print_program(const Program& p);
std::string print_term(const TermPtr& t);
std::string print_type(const TypePtr& t);
std::string print_effect(const Effect& e);

// Structural equality ignoring source positions.
bool equal(const Type& a, const Type& b);
bool equal(const Term& a, const Term& b);
bool equal(const Decl& a, const Decl& b);
bool equal(const Program& a, const Program& b);

// Syntactic values, the only forms `define` accepts.
bool is_value_form(const Term& t);
bool mentions_free(const Term& t, const std::string& x);

}  // namespace greff::surface

#endif  // GREFF_SURFACE_HPP_
