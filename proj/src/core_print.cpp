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

#include <cctype>
#include <set>

#include <fmt/format.h>

#include "greff/core.hpp"
#include "greff/error.hpp"

namespace greff {

namespace {

const std::set<std::string>& reserved() {
  static const std::set<std::string> words = {"true", "false", "unit", "err"};
  return words;
}

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

std::string var_text(const std::string& name) {
  if (reserved().count(name)) return "(var " + name + ")";
  return name;
}

class Printer {
 public:
  std::string out;

  void type(const ValueType& t) {
    switch (t.kind()) {
      case ValueType::Kind::Bool: out += "bool"; return;
      case ValueType::Kind::Unit: out += "unit"; return;
      case ValueType::Kind::Str: out += "str"; return;
      case ValueType::Kind::Queue:
        out += "(Queue ";
        type(t.elem());
        out += ")";
        return;
      case ValueType::Kind::Arrow:
        out += "(-> ";
        type(t.dom());
        out += " ";
        effect(t.eff());
        out += " ";
        type(t.cod());
        out += ")";
        return;
    }
  }

  void effect(const EffectType& e) {
    if (e.is_dyn()) {
      out += "?";
      return;
    }
    out += "(eff";
    for (const auto& [name, s] : e.ops()) {
      out += " (" + name + " ";
      type(s.req);
      out += " ";
      type(s.resp);
      out += ")";
    }
    out += ")";
  }

  void term(const TermPtr& t) {
    std::visit([&](const auto& n) { emit(n); }, t->node);
  }

 private:
  void sp() { out += " "; }

  void emit(const node::Var& n) { out += var_text(n.name); }
  void emit(const node::BoolLit& n) { out += n.value ? "true" : "false"; }
  void emit(const node::UnitLit&) { out += "unit"; }
  void emit(const node::StrLit& n) { out += quote(n.value); }
  void emit(const node::Err&) { out += "err"; }
  void emit(const node::Lambda& n) {
    out += "(lambda " + n.param + " ";
    type(n.param_type);
    sp();
    effect(n.eff);
    sp();
    type(n.cod);
    sp();
    term(n.body);
    out += ")";
  }
  void emit(const node::App& n) {
    out += "(app ";
    term(n.fn);
    sp();
    term(n.arg);
    out += ")";
  }
  void emit(const node::Let& n) {
    out += "(let " + n.name + " ";
    term(n.bound);
    sp();
    term(n.body);
    out += ")";
  }
  void emit(const node::If& n) {
    out += "(if ";
    term(n.cond);
    sp();
    term(n.then_branch);
    sp();
    term(n.else_branch);
    out += ")";
  }
  void emit(const node::Raise& n) {
    out += "(raise " + n.op + " ";
    type(n.req);
    sp();
    type(n.resp);
    sp();
    term(n.arg);
    out += ")";
  }
  void emit(const node::Handle& n) {
    out += n.kind == HandlerKind::Deep ? "(handle deep " : "(handle shallow ";
    term(n.scrutinee);
    out += " (ret " + n.ret_var + " ";
    term(n.ret_body);
    out += ") (clauses";
    for (const auto& c : n.clauses) {
      out += " (" + c.op + " " + c.payload + " " + c.cont + " ";
      type(c.req);
      sp();
      type(c.resp);
      sp();
      term(c.body);
      out += ")";
    }
    out += ") ";
    effect(n.result_eff);
    sp();
    type(n.result_type);
    if (n.kind == HandlerKind::Shallow) {
      sp();
      effect(n.scrut_eff);
      sp();
      type(n.scrut_type);
    }
    out += ")";
  }
  void emit(const node::ValCast& n) {
    out += n.dir == CastDir::Up ? "(up " : "(down ";
    type(n.precise);
    sp();
    type(n.imprecise);
    sp();
    term(n.body);
    out += ")";
  }
  void emit(const node::EffCast& n) {
    out += n.dir == CastDir::Up ? "(eup " : "(edown ";
    effect(n.precise);
    sp();
    effect(n.imprecise);
    sp();
    term(n.body);
    out += ")";
  }
  void emit(const node::Fix& n) {
    out += "(fix " + n.name + " ";
    type(n.type);
    sp();
    term(n.body);
    out += ")";
  }
  void emit(const node::EmptyQueue& n) {
    out += "(empty ";
    type(n.elem);
    out += ")";
  }
  void emit(const node::QueueLit& n) {
    out += "(queue ";
    type(n.elem);
    for (const auto& i : n.items) {
      sp();
      term(i);
    }
    out += ")";
  }
  void emit(const node::Enqueue& n) {
    out += "(enqueue ";
    term(n.queue);
    sp();
    term(n.item);
    out += ")";
  }
  void emit(const node::CaseQueue& n) {
    out += "(case ";
    term(n.scrutinee);
    sp();
    term(n.empty_branch);
    out += " " + n.head + " " + n.tail + " ";
    term(n.cons_branch);
    out += ")";
  }
  void emit(const node::Concat& n) {
    out += "(concat ";
    term(n.lhs);
    sp();
    term(n.rhs);
    out += ")";
  }
};

// ---- reader ---------------------------------------------------------------

struct Sexp {
  enum class Kind { Atom, String, List } kind;
  std::string text;
  std::vector<Sexp> items;
};

class SexpReader {
 public:
  explicit SexpReader(std::string_view text) : text_(text) {}

  Sexp read_all() {
    Sexp s = read();
    skip();
    if (pos_ != text_.size()) fail("trailing input");
    return s;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) {
    throw GreffError(ErrorKind::Syntax,
                     fmt::format("core text offset {}: {}", pos_, msg));
  }

  void skip() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  Sexp read() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Sexp list{Sexp::Kind::List, "", {}};
      for (;;) {
        skip();
        if (pos_ >= text_.size()) fail("unbalanced parenthesis");
        if (text_[pos_] == ')') {
          ++pos_;
          return list;
        }
        list.items.push_back(read());
      }
    }
    if (c == ')') fail("unexpected ')'");
    if (c == '"') {
      ++pos_;
      std::string s;
      while (pos_ < text_.size() && text_[pos_] != '"') {
        char d = text_[pos_++];
        if (d == '\\') {
          if (pos_ >= text_.size()) fail("bad escape");
          char e = text_[pos_++];
          s += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        } else {
          s += d;
        }
      }
      if (pos_ >= text_.size()) fail("unterminated string");
      ++pos_;
      return Sexp{Sexp::Kind::String, s, {}};
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           !std::isspace(static_cast<unsigned char>(text_[pos_])) &&
           text_[pos_] != '(' && text_[pos_] != ')' && text_[pos_] != '"') {
      ++pos_;
    }
    return Sexp{Sexp::Kind::Atom, std::string(text_.substr(start, pos_ - start)),
                {}};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

[[noreturn]] void bad(const std::string& what) {
  throw GreffError(ErrorKind::Syntax, "malformed core " + what);
}

const std::string& atom(const Sexp& s) {
  if (s.kind != Sexp::Kind::Atom) bad("identifier");
  return s.text;
}

bool head_is(const Sexp& s, std::string_view h) {
  return s.kind == Sexp::Kind::List && !s.items.empty() &&
         s.items[0].kind == Sexp::Kind::Atom && s.items[0].text == h;
}

void arity(const Sexp& s, std::size_t n) {
  if (s.items.size() != n) bad("form " + s.items[0].text);
}

ValueType to_type(const Sexp& s);

EffectType to_effect(const Sexp& s) {
  if (s.kind == Sexp::Kind::Atom && s.text == "?") return EffectType::dyn();
  if (!head_is(s, "eff")) bad("effect");
  OpMap ops;
  for (std::size_t i = 1; i < s.items.size(); ++i) {
    const Sexp& e = s.items[i];
    if (e.kind != Sexp::Kind::List || e.items.size() != 3) bad("effect entry");
    if (!ops.emplace(atom(e.items[0]),
                     OpSig{to_type(e.items[1]), to_type(e.items[2])})
             .second) {
      bad("effect (duplicate entry)");
    }
  }
  return EffectType::concrete(std::move(ops));
}

ValueType to_type(const Sexp& s) {
  if (s.kind == Sexp::Kind::Atom) {
    if (s.text == "bool") return ValueType::boolean();
    if (s.text == "unit") return ValueType::unit();
    if (s.text == "str") return ValueType::str();
    bad("type " + s.text);
  }
  if (head_is(s, "Queue")) {
    arity(s, 2);
    return ValueType::queue(to_type(s.items[1]));
  }
  if (head_is(s, "->")) {
    arity(s, 4);
    return ValueType::arrow(to_type(s.items[1]), to_effect(s.items[2]),
                            to_type(s.items[3]));
  }
  bad("type");
}

TermPtr to_term(const Sexp& s) {
  if (s.kind == Sexp::Kind::String) return core::str(s.text);
  if (s.kind == Sexp::Kind::Atom) {
    if (s.text == "true") return core::boolean(true);
    if (s.text == "false") return core::boolean(false);
    if (s.text == "unit") return core::unit();
    if (s.text == "err") return core::err();
    return core::var(s.text);
  }
  if (s.items.empty() || s.items[0].kind != Sexp::Kind::Atom) bad("term");
  const std::string& h = s.items[0].text;
  const auto& it = s.items;
  if (h == "var") {
    arity(s, 2);
    return core::var(atom(it[1]));
  }
  if (h == "lambda") {
    arity(s, 6);
    return core::lambda(atom(it[1]), to_type(it[2]), to_effect(it[3]),
                        to_type(it[4]), to_term(it[5]));
  }
  if (h == "app") {
    arity(s, 3);
    return core::app(to_term(it[1]), to_term(it[2]));
  }
  if (h == "let") {
    arity(s, 4);
    return core::let(atom(it[1]), to_term(it[2]), to_term(it[3]));
  }
  if (h == "if") {
    arity(s, 4);
    return core::if_(to_term(it[1]), to_term(it[2]), to_term(it[3]));
  }
  if (h == "raise") {
    arity(s, 5);
    return core::raise(atom(it[1]), to_type(it[2]), to_type(it[3]),
                       to_term(it[4]));
  }
  if (h == "handle") {
    if (s.items.size() != 7 && s.items.size() != 9) bad("handle");
    node::Handle hd;
    const std::string& kind = atom(it[1]);
    if (kind == "deep") {
      hd.kind = HandlerKind::Deep;
    } else if (kind == "shallow") {
      hd.kind = HandlerKind::Shallow;
    } else {
      bad("handler kind");
    }
    hd.scrutinee = to_term(it[2]);
    if (!head_is(it[3], "ret")) bad("return clause");
    arity(it[3], 3);
    hd.ret_var = atom(it[3].items[1]);
    hd.ret_body = to_term(it[3].items[2]);
    if (!head_is(it[4], "clauses")) bad("clauses");
    for (std::size_t i = 1; i < it[4].items.size(); ++i) {
      const Sexp& c = it[4].items[i];
      if (c.kind != Sexp::Kind::List || c.items.size() != 6) bad("clause");
      hd.clauses.push_back(node::Clause{atom(c.items[0]), atom(c.items[1]),
                                        atom(c.items[2]), to_type(c.items[3]),
                                        to_type(c.items[4]),
                                        to_term(c.items[5])});
    }
    hd.result_eff = to_effect(it[5]);
    hd.result_type = to_type(it[6]);
    if (hd.kind == HandlerKind::Shallow) {
      if (s.items.size() != 9) bad("shallow handle");
      hd.scrut_eff = to_effect(it[7]);
      hd.scrut_type = to_type(it[8]);
    } else if (s.items.size() != 7) {
      bad("deep handle");
    }
    return core::handle(std::move(hd));
  }
  if (h == "up" || h == "down") {
    arity(s, 4);
    return core::val_cast(h == "up" ? CastDir::Up : CastDir::Down,
                          to_type(it[1]), to_type(it[2]), to_term(it[3]));
  }
  if (h == "eup" || h == "edown") {
    arity(s, 4);
    return core::eff_cast(h == "eup" ? CastDir::Up : CastDir::Down,
                          to_effect(it[1]), to_effect(it[2]), to_term(it[3]));
  }
  if (h == "fix") {
    arity(s, 4);
    return core::fix(atom(it[1]), to_type(it[2]), to_term(it[3]));
  }
  if (h == "empty") {
    arity(s, 2);
    return core::empty_queue(to_type(it[1]));
  }
  if (h == "queue") {
    if (s.items.size() < 2) bad("queue");
    std::vector<TermPtr> items;
    for (std::size_t i = 2; i < it.size(); ++i) items.push_back(to_term(it[i]));
    return core::queue_lit(to_type(it[1]), std::move(items));
  }
  if (h == "enqueue") {
    arity(s, 3);
    return core::enqueue(to_term(it[1]), to_term(it[2]));
  }
  if (h == "case") {
    arity(s, 6);
    return core::case_queue(to_term(it[1]), to_term(it[2]), atom(it[3]),
                            atom(it[4]), to_term(it[5]));
  }
  if (h == "concat") {
    arity(s, 3);
    return core::concat(to_term(it[1]), to_term(it[2]));
  }
  bad("term head " + h);
}

}  // namespace

std::string print_term(const TermPtr& t) {
  Printer p;
  p.term(t);
  return std::move(p.out);
}

std::string print_type(const ValueType& t) {
  Printer p;
  p.type(t);
  return std::move(p.out);
}

std::string print_effect(const EffectType& e) {
  Printer p;
  p.effect(e);
  return std::move(p.out);
}

TermPtr read_term(std::string_view text) {
  return to_term(SexpReader(text).read_all());
}

ValueType read_type(std::string_view text) {
  return to_type(SexpReader(text).read_all());
}

EffectType read_effect(std::string_view text) {
  return to_effect(SexpReader(text).read_all());
}

namespace {

std::string flat(const Sexp& s) {
  switch (s.kind) {
    case Sexp::Kind::Atom: return s.text;
    case Sexp::Kind::String: return quote(s.text);
    case Sexp::Kind::List: break;
  }
  std::string out = "(";
  for (std::size_t i = 0; i < s.items.size(); ++i) {
    if (i) out += ' ';
    out += flat(s.items[i]);
  }
  return out + ")";
}

// Lists that do not fit keep their head and first atoms on one line and
// indent the remaining items.
void layout(const Sexp& s, std::size_t indent, std::size_t width, std::string& out) {
  std::string f = flat(s);
  if (s.kind != Sexp::Kind::List || indent + f.size() <= width) {
    out += f;
    return;
  }
  out += '(';
  std::size_t i = 0;
  for (; i < s.items.size() && s.items[i].kind != Sexp::Kind::List; ++i) {
    if (i) out += ' ';
    out += flat(s.items[i]);
  }
  for (; i < s.items.size(); ++i) {
    out += '\n';
    out.append(indent + 2, ' ');
    layout(s.items[i], indent + 2, width, out);
  }
  out += ')';
}

}  // namespace

std::string pretty_term(const TermPtr& t, std::size_t width) {
  std::string out;
  layout(SexpReader(print_term(t)).read_all(), 0, width, out);
  return out;
}

}  // namespace greff
