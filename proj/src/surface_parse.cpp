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

#include <algorithm>
#include <cctype>
#include <optional>
#include <set>

#include <fmt/format.h>

#include "greff/surface.hpp"

namespace greff::surface {

Effect Effect::of(std::vector<std::string> names) {
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return {false, std::move(names)};
}

TypePtr Type::boolean(SourcePos p) {
  return std::make_shared<const Type>(Type{Kind::Bool, nullptr, {}, nullptr, p});
}
TypePtr Type::unit(SourcePos p) {
  return std::make_shared<const Type>(Type{Kind::Unit, nullptr, {}, nullptr, p});
}
TypePtr Type::str(SourcePos p) {
  return std::make_shared<const Type>(Type{Kind::Str, nullptr, {}, nullptr, p});
}
TypePtr Type::queue(TypePtr elem, SourcePos p) {
  return std::make_shared<const Type>(
      Type{Kind::Queue, std::move(elem), {}, nullptr, p});
}
TypePtr Type::arrow(TypePtr dom, Effect eff, TypePtr cod, SourcePos p) {
  return std::make_shared<const Type>(
      Type{Kind::Arrow, std::move(dom), std::move(eff), std::move(cod), p});
}

TermPtr make_term(Term t) { return std::make_shared<const Term>(std::move(t)); }

namespace {

enum class Tok {
  Ident, String, Keyword, One,
  LParen, RParen, LBrace, RBrace, LBracket, RBracket,
  Comma, Dot, Colon, ColonColon, Semi, Tilde, Arrow, EffOpen, EffClose,
  Bar, PlusPlus, Question, Equals, Bang, End,
};

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

const std::set<std::string, std::less<>>& keywords() {
  static const std::set<std::string, std::less<>> k = {
      "module", "where", "effect", "import", "as", "define", "lambda",
      "let", "in", "if", "then", "else", "raise", "handle",
      "shallow-handle", "with", "end", "match", "ret", "true", "false",
      "enqueue", "empty", "dequeue", "Queue", "bool", "str"};
  return k;
}

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto peek = [&](std::size_t k) -> char {
    return i + k < src.size() ? src[i + k] : '\0';
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '-' && peek(1) == '-') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    SourcePos pos{line, col};
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size()) {
        if (ident_char(src[j])) {
          ++j;
        } else if (src[j] == '-' && j + 1 < src.size() &&
                   std::isalpha(static_cast<unsigned char>(src[j + 1]))) {
          j += 2;
        } else {
          break;
        }
      }
      std::string word(src.substr(i, j - i));
      Tok kind = keywords().count(word) ? Tok::Keyword : Tok::Ident;
      out.push_back({kind, word, pos});
      advance(j - i);
      continue;
    }
    if (c == '"') {
      advance(1);
      std::string s;
      for (;;) {
        if (i >= src.size() || src[i] == '\n') {
          throw GreffError(ErrorKind::Lexical, "unterminated string literal",
                           pos);
        }
        char d = src[i];
        if (d == '"') {
          advance(1);
          break;
        }
        if (d == '\\') {
          char e = peek(1);
          switch (e) {
            case 'n': s += '\n'; break;
            case 't': s += '\t'; break;
            case '"': s += '"'; break;
            case '\\': s += '\\'; break;
            default:
              throw GreffError(ErrorKind::Lexical,
                               fmt::format("unknown escape '\\{}'", e),
                               SourcePos{line, col});
          }
          advance(2);
          continue;
        }
        s += d;
        advance(1);
      }
      out.push_back({Tok::String, s, pos});
      continue;
    }
    auto sym = [&](Tok k, std::size_t n) {
      out.push_back({k, std::string(src.substr(i, n)), pos});
      advance(n);
    };
    switch (c) {
      case '(': sym(Tok::LParen, 1); continue;
      case ')': sym(Tok::RParen, 1); continue;
      case '{': sym(Tok::LBrace, 1); continue;
      case '}': sym(Tok::RBrace, 1); continue;
      case '[': sym(Tok::LBracket, 1); continue;
      case ',': sym(Tok::Comma, 1); continue;
      case '.': sym(Tok::Dot, 1); continue;
      case ';': sym(Tok::Semi, 1); continue;
      case '|': sym(Tok::Bar, 1); continue;
      case '?': sym(Tok::Question, 1); continue;
      case '=': sym(Tok::Equals, 1); continue;
      case '!': sym(Tok::Bang, 1); continue;
      case '1':
        if (!std::isdigit(static_cast<unsigned char>(peek(1)))) {
          sym(Tok::One, 1);
          continue;
        }
        break;
      case ']':
        if (peek(1) == '>') {
          sym(Tok::EffClose, 2);
        } else {
          sym(Tok::RBracket, 1);
        }
        continue;
      case ':':
        if (peek(1) == ':') {
          sym(Tok::ColonColon, 2);
        } else {
          sym(Tok::Colon, 1);
        }
        continue;
      case '~':
        if (peek(1) == '>') {
          sym(Tok::Tilde, 2);
          continue;
        }
        break;
      case '-':
        if (peek(1) == '>') {
          sym(Tok::Arrow, 2);
          continue;
        }
        if (peek(1) == '[') {
          sym(Tok::EffOpen, 2);
          continue;
        }
        break;
      case '+':
        if (peek(1) == '+') {
          sym(Tok::PlusPlus, 2);
          continue;
        }
        break;
      default:
        break;
    }
    throw GreffError(ErrorKind::Lexical,
                     fmt::format("unexpected character '{}'", c), pos);
  }
  out.push_back({Tok::End, "", SourcePos{line, col}});
  return out;
}

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  if (t.kind == Tok::String) return "string literal";
  return "'" + t.text + "'";
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    std::set<std::string> names;
    bool have_main = false;
    while (!at(Tok::End)) {
      if (at_kw("module")) {
        if (have_main) fail("main block must come last");
        Module m = module();
        if (!names.insert(m.name).second) {
          throw GreffError(ErrorKind::DuplicateModule,
                           "duplicate module " + m.name, m.pos);
        }
        p.modules.push_back(std::move(m));
      } else if (at(Tok::Ident) && peek().text == "main" &&
                 peek(1).kind == Tok::LBrace) {
        if (have_main) fail("more than one main block");
        p.main_pos = next().pos;
        next();
        p.main_decls = decls();
        p.main_term = term();
        expect(Tok::RBrace, "'}' closing main");
        have_main = true;
        accept(Tok::Semi);
      } else {
        fail("expected 'module' or 'main {'");
      }
    }
    if (!have_main) {
      if (p.modules.empty() || p.modules.back().name != "Main")
        fail("expected a main block");
      desugar_main(p);  // validates the closing define main
    }
    return p;
  }

  TermPtr only_term() {
    TermPtr t = term();
    expect(Tok::End, "end of input");
    return t;
  }

  TypePtr only_type() {
    TypePtr t = type();
    expect(Tok::End, "end of input");
    return t;
  }

 private:
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_kw(std::string_view w) const {
    return peek().kind == Tok::Keyword && peek().text == w;
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw GreffError(ErrorKind::Syntax,
                     fmt::format("{} (found {})", msg, describe(peek())),
                     peek().pos);
  }
  const Token& expect(Tok k, std::string_view what) {
    if (!at(k)) fail(fmt::format("expected {}", what));
    return next();
  }
  void expect_kw(std::string_view w) {
    if (!at_kw(w)) fail(fmt::format("expected '{}'", w));
    next();
  }
  std::string ident(std::string_view what) {
    return expect(Tok::Ident, what).text;
  }


  Module module() {
    Module m;
    m.pos = peek().pos;
    expect_kw("module");
    m.name = ident("module name");
    expect_kw("where");
    m.decls = decls();
    return m;
  }

  std::vector<Decl> decls() {
    std::vector<Decl> out;
    for (;;) {
      if (at_kw("effect")) {
        Decl d;
        d.kind = Decl::Kind::NewEffect;
        d.pos = next().pos;
        d.name = ident("effect name");
        expect(Tok::Colon, "':'");
        d.req = type();
        expect(Tok::Tilde, "'~>'");
        d.resp = type();
        out.push_back(std::move(d));
      } else if (at_kw("import")) {
        Decl d;
        d.pos = next().pos;
        d.module = ident("module name");
        expect(Tok::Dot, "'.'");
        d.name = ident("imported name");
        if (at_kw("as")) {
          next();
          d.kind = Decl::Kind::ImportValue;
          d.local = ident("local name");
          expect(Tok::Colon, "':'");
          d.type = type();
        } else {
          expect(Tok::Colon, "':'");
          TypePtr a = type();
          if (accept(Tok::Tilde)) {
            d.kind = Decl::Kind::ImportEffect;
            d.req = a;
            d.resp = type();
          } else {
            d.kind = Decl::Kind::ImportValue;
            d.local = d.name;
            d.type = a;
          }
        }
        out.push_back(std::move(d));
      } else if (at_kw("define")) {
        Decl d;
        d.kind = Decl::Kind::DefineValue;
        d.pos = next().pos;
        if (at(Tok::Ident)) {
          d.name = next().text;
        } else {
          fail("expected value name");
        }
        expect(Tok::Colon, "':'");
        d.type = type();
        expect(Tok::Equals, "'='");
        // Values are never sequences, so `;` can end a definition.
        d.body = d.name == "main" ? term() : ascribed();
        if (d.name != "main" && !is_value_form(*d.body)) {
          throw GreffError(ErrorKind::Syntax,
                           "definition of " + d.name + " is not a value",
                           d.body->pos);
        }
        out.push_back(std::move(d));
      } else {
        return out;
      }
      accept(Tok::Semi);
    }
  }

  // ---- types ----

  Effect effect_body(Tok close) {
    if (accept(Tok::Question)) {
      expect(close, "closing effect bracket");
      return Effect::dyn();
    }
    std::vector<std::string> names;
    if (!at(close)) {
      for (;;) {
        names.push_back(ident("operation name"));
        if (!accept(Tok::Comma)) break;
      }
    }
    expect(close, "closing effect bracket");
    return Effect::of(std::move(names));
  }

  TypePtr type() {
    TypePtr dom = type_queue();
    if (at(Tok::EffOpen)) {
      SourcePos p = next().pos;
      Effect e = effect_body(Tok::EffClose);
      TypePtr cod = type();
      return Type::arrow(dom, std::move(e), cod, dom->pos.known() ? dom->pos : p);
    }
    return dom;
  }

  TypePtr type_queue() {
    if (at_kw("Queue")) {
      SourcePos p = next().pos;
      return Type::queue(type_queue(), p);
    }
    SourcePos p = peek().pos;
    if (at_kw("bool")) {
      next();
      return Type::boolean(p);
    }
    if (at_kw("str")) {
      next();
      return Type::str(p);
    }
    if (accept(Tok::One)) return Type::unit(p);
    if (accept(Tok::LParen)) {
      TypePtr t = type();
      expect(Tok::RParen, "')'");
      return t;
    }
    fail("expected a type");
  }

  // ---- terms ----

  bool starts_term() const {
    switch (peek().kind) {
      case Tok::Ident:
      case Tok::String:
      case Tok::LParen:
        return true;
      case Tok::Keyword: {
        static const std::set<std::string, std::less<>> starters = {
            "true", "false", "empty", "lambda", "let", "if", "raise",
            "handle", "shallow-handle", "match", "enqueue"};
        return starters.count(peek().text) != 0;
      }
      default:
        return false;
    }
  }

  TermPtr term() {
    TermPtr first = ascribed();
    if (at(Tok::Semi) && starts_term_after_semi()) {
      SourcePos p = first->pos;
      next();
      TermPtr rest = term();
      Term t;
      t.kind = Term::Kind::Seq;
      t.pos = p;
      t.kids = {first, rest};
      return make_term(std::move(t));
    }
    return first;
  }

  bool starts_term_after_semi() {
    ++pos_;
    bool s = starts_term();
    --pos_;
    return s;
  }

  TermPtr ascribed() {
    TermPtr t = concat();
    while (at(Tok::ColonColon)) {
      next();
      Term a;
      a.pos = t->pos;
      a.kids = {t};
      if (accept(Tok::LBracket)) {
        a.kind = Term::Kind::AscribeEff;
        a.eff = effect_body(Tok::RBracket);
      } else {
        a.kind = Term::Kind::AscribeType;
        a.type = type();
      }
      t = make_term(std::move(a));
    }
    return t;
  }

  TermPtr concat() {
    TermPtr t = application();
    while (at(Tok::PlusPlus)) {
      next();
      TermPtr rhs = application();
      Term c;
      c.kind = Term::Kind::Concat;
      c.pos = t->pos;
      c.kids = {t, rhs};
      t = make_term(std::move(c));
    }
    return t;
  }

  bool starts_atom() const {
    switch (peek().kind) {
      case Tok::Ident:
        // `main {` opens the main block.
        return !(peek().text == "main" && peek(1).kind == Tok::LBrace);
      case Tok::String:
      case Tok::LParen:
        return true;
      case Tok::Keyword:
        return peek().text == "true" || peek().text == "false" ||
               peek().text == "empty";
      default:
        return false;
    }
  }

  TermPtr application() {
    if (at(Tok::Keyword)) {
      const std::string& k = peek().text;
      if (k == "lambda") return lambda();
      if (k == "let") return let();
      if (k == "if") return if_();
      if (k == "handle" || k == "shallow-handle") return handle();
      if (k == "match") return match();
      if (k == "raise") {
        Term r;
        r.kind = Term::Kind::Raise;
        r.pos = next().pos;
        r.name = ident("operation name");
        r.kids = {atom()};
        return make_term(std::move(r));
      }
      if (k == "enqueue") {
        Term e;
        e.kind = Term::Kind::Enqueue;
        e.pos = next().pos;
        TermPtr q = atom();
        TermPtr x = atom();
        e.kids = {q, x};
        return make_term(std::move(e));
      }
    }
    TermPtr t = atom();
    while (starts_atom()) {
      TermPtr arg = atom();
      Term a;
      a.kind = Term::Kind::App;
      a.pos = t->pos;
      a.kids = {t, arg};
      t = make_term(std::move(a));
    }
    return t;
  }

  TermPtr atom() {
    Term t;
    t.pos = peek().pos;
    if (at(Tok::Ident)) {
      t.kind = Term::Kind::Var;
      t.name = next().text;
    } else if (at(Tok::String)) {
      t.kind = Term::Kind::Str;
      t.name = next().text;
    } else if (at_kw("true")) {
      next();
      t.kind = Term::Kind::True;
    } else if (at_kw("false")) {
      next();
      t.kind = Term::Kind::False;
    } else if (at_kw("empty")) {
      next();
      t.kind = Term::Kind::Empty;
    } else if (accept(Tok::LParen)) {
      if (accept(Tok::RParen)) {
        t.kind = Term::Kind::Unit;
      } else {
        TermPtr inner = term();
        expect(Tok::RParen, "')'");
        return inner;
      }
    } else {
      fail("expected a term");
    }
    return make_term(std::move(t));
  }

  std::string binder() {
    return ident("variable name");
  }

  TermPtr lambda() {
    Term t;
    t.kind = Term::Kind::Lambda;
    t.pos = next().pos;
    t.name = binder();
    expect(Tok::Colon, "':' and an annotation for the lambda parameter");
    t.type = type();
    expect(Tok::Dot, "'.'");
    t.kids = {term()};
    return make_term(std::move(t));
  }

  TermPtr let() {
    Term t;
    t.kind = Term::Kind::Let;
    t.pos = next().pos;
    t.name = binder();
    expect(Tok::Equals, "'='");
    TermPtr bound = term();
    expect_kw("in");
    t.kids = {bound, term()};
    return make_term(std::move(t));
  }

  TermPtr if_() {
    Term t;
    t.kind = Term::Kind::If;
    t.pos = next().pos;
    TermPtr c = term();
    expect_kw("then");
    TermPtr a = term();
    expect_kw("else");
    t.kids = {c, a, term()};
    return make_term(std::move(t));
  }

  TermPtr handle() {
    Term t;
    t.kind = Term::Kind::Handle;
    t.shallow = peek().text == "shallow-handle";
    t.pos = next().pos;
    TermPtr scrutinee = term();
    expect(Tok::Colon, "':' and the handler's result type");
    t.type = type();
    expect(Tok::Bang, "'!' and the handler's result effect");
    expect(Tok::LBracket, "'['");
    t.eff = effect_body(Tok::RBracket);
    expect_kw("with");
    TermPtr ret;
    std::set<std::string> seen;
    while (accept(Tok::Bar)) {
      if (at_kw("ret")) {
        SourcePos p = next().pos;
        if (ret) throw GreffError(ErrorKind::DuplicateClause,
                                  "duplicate return clause", p);
        t.ret_var = binder();
        expect(Tok::Arrow, "'->'");
        ret = term();
        continue;
      }
      Clause c;
      c.pos = peek().pos;
      c.op = ident("operation name or 'ret'");
      expect(Tok::LParen, "'('");
      c.payload = binder();
      expect(Tok::Comma, "','");
      c.cont = binder();
      expect(Tok::RParen, "')'");
      expect(Tok::Arrow, "'->'");
      c.body = term();
      if (!seen.insert(c.op).second) {
        throw GreffError(ErrorKind::DuplicateClause,
                         "duplicate clause for " + c.op, c.pos);
      }
      t.clauses.push_back(std::move(c));
    }
    expect_kw("end");
    if (!ret) {
      throw GreffError(ErrorKind::Syntax, "handler has no return clause", t.pos);
    }
    t.kids = {scrutinee, ret};
    return make_term(std::move(t));
  }

  TermPtr match() {
    Term t;
    t.kind = Term::Kind::Match;
    t.pos = next().pos;
    TermPtr q = term();
    expect_kw("with");
    expect(Tok::Bar, "'|'");
    expect_kw("empty");
    expect(Tok::Arrow, "'->'");
    TermPtr e = term();
    expect(Tok::Bar, "'|'");
    expect_kw("dequeue");
    expect(Tok::LParen, "'('");
    t.head = binder();
    expect(Tok::Comma, "','");
    t.tail = binder();
    expect(Tok::RParen, "')'");
    expect(Tok::Arrow, "'->'");
    TermPtr c = term();
    expect_kw("end");
    t.kids = {q, e, c};
    return make_term(std::move(t));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Program desugar_main(const Program& source) {
  if (source.main_term) return source;
  Program p = source;
  if (p.modules.empty() || p.modules.back().name != "Main" ||
      p.modules.back().decls.empty()) {
    throw GreffError(ErrorKind::Syntax, "program has no main block");
  }
  Module m = std::move(p.modules.back());
  p.modules.pop_back();
  Decl last = std::move(m.decls.back());
  m.decls.pop_back();
  if (last.kind != Decl::Kind::DefineValue || last.name != "main") {
    throw GreffError(ErrorKind::Syntax,
                     "module Main must end with 'define main'", last.pos);
  }
  p.main_decls = std::move(m.decls);
  p.main_pos = m.pos;
  Term asc;
  asc.kind = Term::Kind::AscribeType;
  asc.pos = last.body->pos;
  asc.type = last.type;
  asc.kids = {last.body};
  p.main_term = make_term(std::move(asc));
  return p;
}

Program parse_program(std::string_view source) {
  return Parser(lex(source)).program();
}

TermPtr parse_term(std::string_view source) {
  return Parser(lex(source)).only_term();
}

TypePtr parse_type(std::string_view source) {
  return Parser(lex(source)).only_type();
}

bool is_value_form(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Var:
    case Term::Kind::True:
    case Term::Kind::False:
    case Term::Kind::Str:
    case Term::Kind::Unit:
    case Term::Kind::Empty:
    case Term::Kind::Lambda:
      return true;
    default:
      return false;
  }
}

bool mentions_free(const Term& t, const std::string& x) {
  switch (t.kind) {
    case Term::Kind::Var:
      return t.name == x;
    case Term::Kind::Lambda:
      return t.name != x && mentions_free(*t.kids[0], x);
    case Term::Kind::Let:
      return mentions_free(*t.kids[0], x) ||
             (t.name != x && mentions_free(*t.kids[1], x));
    case Term::Kind::Handle: {
      if (mentions_free(*t.kids[0], x)) return true;
      if (t.ret_var != x && mentions_free(*t.kids[1], x)) return true;
      for (const auto& c : t.clauses) {
        if (c.payload != x && c.cont != x && mentions_free(*c.body, x)) {
          return true;
        }
      }
      return false;
    }
    case Term::Kind::Match:
      return mentions_free(*t.kids[0], x) || mentions_free(*t.kids[1], x) ||
             (t.head != x && t.tail != x && mentions_free(*t.kids[2], x));
    default:
      for (const auto& k : t.kids) {
        if (mentions_free(*k, x)) return true;
      }
      return false;
  }
}

}  // namespace greff::surface
