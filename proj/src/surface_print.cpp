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

#include <fmt/format.h>

#include "greff/surface.hpp"

namespace greff::surface {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string effect_names(const Effect& e) {
  if (e.dynamic) return "?";
  std::string out;
  for (std::size_t i = 0; i < e.names.size(); ++i) {
    if (i) out += ",";
    out += e.names[i];
  }
  return out;
}

bool atomic(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var:
    case Term::Kind::True:
    case Term::Kind::False:
    case Term::Kind::Str:
    case Term::Kind::Unit:
    case Term::Kind::Empty:
      return true;
    default:
      return false;
  }
}

std::string term_text(const Term& t);

std::string arg_text(const TermPtr& t) {
  if (atomic(*t)) return term_text(*t);
  return "(" + term_text(*t) + ")";
}

std::string term_text(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var: return t.name;
    case Term::Kind::True: return "true";
    case Term::Kind::False: return "false";
    case Term::Kind::Str: return quote(t.name);
    case Term::Kind::Unit: return "()";
    case Term::Kind::Empty: return "empty";
    case Term::Kind::Lambda:
      return fmt::format("lambda {} : {}. {}", t.name, print_type(t.type),
                         term_text(*t.kids[0]));
    case Term::Kind::App: {
      const Term& f = *t.kids[0];
      std::string head = f.kind == Term::Kind::App ? term_text(f)
                                                   : arg_text(t.kids[0]);
      return head + " " + arg_text(t.kids[1]);
    }
    case Term::Kind::Let:
      return fmt::format("let {} = {} in {}", t.name, arg_text(t.kids[0]),
                         term_text(*t.kids[1]));
    case Term::Kind::Seq:
      return arg_text(t.kids[0]) + "; " + term_text(*t.kids[1]);
    case Term::Kind::If:
      return fmt::format("if {} then {} else {}", arg_text(t.kids[0]),
                         arg_text(t.kids[1]), term_text(*t.kids[2]));
    case Term::Kind::Raise:
      return "raise " + t.name + " " + arg_text(t.kids[0]);
    case Term::Kind::Handle: {
      std::string out = fmt::format(
          "{} {} : {} ! {} with | ret {} -> {}",
          t.shallow ? "shallow-handle" : "handle", arg_text(t.kids[0]),
          print_type(t.type), "[" + effect_names(t.eff) + "]", t.ret_var,
          arg_text(t.kids[1]));
      for (const auto& c : t.clauses) {
        out += fmt::format(" | {}({}, {}) -> {}", c.op, c.payload, c.cont,
                           arg_text(c.body));
      }
      return out + " end";
    }
    case Term::Kind::AscribeType:
      return arg_text(t.kids[0]) + " :: " + print_type(t.type);
    case Term::Kind::AscribeEff:
      return arg_text(t.kids[0]) + " :: [" + effect_names(t.eff) + "]";
    case Term::Kind::Concat:
      return arg_text(t.kids[0]) + " ++ " + arg_text(t.kids[1]);
    case Term::Kind::Enqueue:
      return "enqueue " + arg_text(t.kids[0]) + " " + arg_text(t.kids[1]);
    case Term::Kind::Match:
      return fmt::format("match {} with | empty -> {} | dequeue({}, {}) -> {} end",
                         arg_text(t.kids[0]), arg_text(t.kids[1]), t.head,
                         t.tail, arg_text(t.kids[2]));
  }
  return "";
}

// Main-block definitions are parenthesized so the `;` before the main term
// cannot be read as part of a lambda body.
std::string decl_text(const Decl& d, bool closed = false) {
  switch (d.kind) {
    case Decl::Kind::NewEffect:
      return fmt::format("effect {} : {} ~> {}", d.name, print_type(d.req),
                         print_type(d.resp));
    case Decl::Kind::ImportEffect:
      return fmt::format("import {}.{} : {} ~> {}", d.module, d.name,
                         print_type(d.req), print_type(d.resp));
    case Decl::Kind::ImportValue:
      return fmt::format("import {}.{} as {} : {}", d.module, d.name, d.local,
                         print_type(d.type));
    case Decl::Kind::DefineValue:
    {
      std::string body = term_text(*d.body);
      if (closed) body = "(" + body + ")";
      return fmt::format("define {} : {} = {}", d.name, print_type(d.type), body);
    }
  }
  return "";
}

bool equal_ptr(const TypePtr& a, const TypePtr& b) {
  if (!a || !b) return !a && !b;
  return equal(*a, *b);
}

bool equal_ptr(const TermPtr& a, const TermPtr& b) {
  if (!a || !b) return !a && !b;
  return equal(*a, *b);
}

}  // namespace

std::string print_effect(const Effect& e) { return "[" + effect_names(e) + "]"; }

std::string print_type(const TypePtr& t) {
  switch (t->kind) {
    case Type::Kind::Bool: return "bool";
    case Type::Kind::Unit: return "1";
    case Type::Kind::Str: return "str";
    case Type::Kind::Queue: {
      const Type& e = *t->a;
      if (e.kind == Type::Kind::Arrow) return "Queue (" + print_type(t->a) + ")";
      return "Queue " + print_type(t->a);
    }
    case Type::Kind::Arrow: {
      std::string dom = print_type(t->a);
      if (t->a->kind == Type::Kind::Arrow) dom = "(" + dom + ")";
      return dom + " -[" + effect_names(t->eff) + "]> " + print_type(t->b);
    }
  }
  return "";
}

std::string print_term(const TermPtr& t) { return term_text(*t); }

std::string print_program(const Program& p) {
  std::string out;
  for (const auto& m : p.modules) {
    out += "module " + m.name + " where\n";
    for (const auto& d : m.decls) out += "  " + decl_text(d) + "\n";
  }
  if (!p.main_term) return out;
  out += "main {\n";
  for (const auto& d : p.main_decls) out += "  " + decl_text(d, true) + ";\n";
  out += "  " + term_text(*p.main_term) + "\n}\n";
  return out;
}

bool equal(const Type& a, const Type& b) {
  return a.kind == b.kind && a.eff == b.eff && equal_ptr(a.a, b.a) &&
         equal_ptr(a.b, b.b);
}

bool equal(const Term& a, const Term& b) {
  if (a.kind != b.kind || a.name != b.name || !(a.eff == b.eff) ||
      a.shallow != b.shallow || a.ret_var != b.ret_var || a.head != b.head ||
      a.tail != b.tail || !equal_ptr(a.type, b.type) ||
      a.kids.size() != b.kids.size() || a.clauses.size() != b.clauses.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.kids.size(); ++i) {
    if (!equal_ptr(a.kids[i], b.kids[i])) return false;
  }
  for (std::size_t i = 0; i < a.clauses.size(); ++i) {
    const Clause& x = a.clauses[i];
    const Clause& y = b.clauses[i];
    if (x.op != y.op || x.payload != y.payload || x.cont != y.cont ||
        !equal_ptr(x.body, y.body)) {
      return false;
    }
  }
  return true;
}

bool equal(const Decl& a, const Decl& b) {
  return a.kind == b.kind && a.module == b.module && a.name == b.name &&
         a.local == b.local && equal_ptr(a.req, b.req) &&
         equal_ptr(a.resp, b.resp) && equal_ptr(a.type, b.type) &&
         equal_ptr(a.body, b.body);
}

bool equal(const Program& a, const Program& b) {
  if (a.modules.size() != b.modules.size() ||
      a.main_decls.size() != b.main_decls.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.modules.size(); ++i) {
    const Module& x = a.modules[i];
    const Module& y = b.modules[i];
    if (x.name != y.name || x.decls.size() != y.decls.size()) return false;
    for (std::size_t j = 0; j < x.decls.size(); ++j) {
      if (!equal(x.decls[j], y.decls[j])) return false;
    }
  }
  for (std::size_t i = 0; i < a.main_decls.size(); ++i) {
    if (!equal(a.main_decls[i], b.main_decls[i])) return false;
  }
  return equal_ptr(a.main_term, b.main_term);
}

}  // namespace greff::surface
