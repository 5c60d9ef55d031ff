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

#include <fmt/format.h>

#include "greff/core.hpp"
#include "greff/error.hpp"

namespace greff {

const node::Clause* node::Handle::find(const std::string& op) const {
  for (const auto& c : clauses) {
    if (c.op == op) return &c;
  }
  return nullptr;
}

namespace core {

namespace {

TermPtr make(Term::Node n) {
  return std::make_shared<const Term>(Term{std::move(n)});
}

void require_precision(const ValueType& precise, const ValueType& imprecise) {
  if (!precision(precise, imprecise)) {
    throw GreffError(ErrorKind::CastUnjustified,
                     fmt::format("cast endpoints {} and {} are not related "
                                 "by precision",
                                 to_string(precise), to_string(imprecise)));
  }
}

void require_precision(const EffectType& precise, const EffectType& imprecise) {
  if (!precision(precise, imprecise)) {
    throw GreffError(ErrorKind::CastUnjustified,
                     fmt::format("cast endpoints {} and {} are not related "
                                 "by precision",
                                 to_string(precise), to_string(imprecise)));
  }
}

}  // namespace

TermPtr var(std::string name) { return make(node::Var{std::move(name)}); }

TermPtr boolean(bool v) {
  static const TermPtr t = make(node::BoolLit{true});
  static const TermPtr f = make(node::BoolLit{false});
  return v ? t : f;
}

TermPtr unit() {
  static const TermPtr u = make(node::UnitLit{});
  return u;
}

TermPtr str(std::string s) { return make(node::StrLit{std::move(s)}); }

TermPtr err() {
  static const TermPtr e = make(node::Err{});
  return e;
}

TermPtr lambda(std::string x, ValueType a, EffectType eff, ValueType b,
               TermPtr body) {
  return make(node::Lambda{std::move(x), std::move(a), std::move(eff),
                           std::move(b), std::move(body)});
}

TermPtr app(TermPtr f, TermPtr a) {
  return make(node::App{std::move(f), std::move(a)});
}

TermPtr let(std::string x, TermPtr bound, TermPtr body) {
  return make(node::Let{std::move(x), std::move(bound), std::move(body)});
}

TermPtr if_(TermPtr c, TermPtr t, TermPtr e) {
  return make(node::If{std::move(c), std::move(t), std::move(e)});
}

TermPtr raise(std::string op, ValueType req, ValueType resp, TermPtr arg) {
  return make(node::Raise{std::move(op), std::move(req), std::move(resp),
                          std::move(arg)});
}

TermPtr handle(node::Handle h) {
  std::sort(h.clauses.begin(), h.clauses.end(),
            [](const auto& a, const auto& b) { return a.op < b.op; });
  for (std::size_t i = 1; i < h.clauses.size(); ++i) {
    if (h.clauses[i].op == h.clauses[i - 1].op) {
      throw GreffError(ErrorKind::DuplicateClause,
                       "duplicate clause for " + h.clauses[i].op);
    }
  }
  return make(std::move(h));
}

TermPtr val_cast(CastDir dir, ValueType precise, ValueType imprecise,
                 TermPtr body) {
  require_precision(precise, imprecise);
  return make(node::ValCast{dir, std::move(precise), std::move(imprecise),
                            std::move(body)});
}

TermPtr eff_cast(CastDir dir, EffectType precise, EffectType imprecise,
                 TermPtr body) {
  require_precision(precise, imprecise);
  return make(node::EffCast{dir, std::move(precise), std::move(imprecise),
                            std::move(body)});
}

TermPtr val_up(ValueType precise, ValueType imprecise, TermPtr body) {
  return val_cast(CastDir::Up, std::move(precise), std::move(imprecise),
                  std::move(body));
}

TermPtr val_down(ValueType precise, ValueType imprecise, TermPtr body) {
  return val_cast(CastDir::Down, std::move(precise), std::move(imprecise),
                  std::move(body));
}

TermPtr eff_up(EffectType precise, EffectType imprecise, TermPtr body) {
  return eff_cast(CastDir::Up, std::move(precise), std::move(imprecise),
                  std::move(body));
}

TermPtr eff_down(EffectType precise, EffectType imprecise, TermPtr body) {
  return eff_cast(CastDir::Down, std::move(precise), std::move(imprecise),
                  std::move(body));
}

TermPtr fix(std::string f, ValueType a, TermPtr body) {
  return make(node::Fix{std::move(f), std::move(a), std::move(body)});
}

TermPtr empty_queue(ValueType elem) {
  return make(node::EmptyQueue{std::move(elem)});
}

TermPtr queue_lit(ValueType elem, std::vector<TermPtr> items) {
  return make(node::QueueLit{std::move(elem), std::move(items)});
}

TermPtr enqueue(TermPtr q, TermPtr x) {
  return make(node::Enqueue{std::move(q), std::move(x)});
}

TermPtr case_queue(TermPtr q, TermPtr empty, std::string h, std::string t,
                   TermPtr cons) {
  return make(node::CaseQueue{std::move(q), std::move(empty), std::move(h),
                              std::move(t), std::move(cons)});
}

TermPtr concat(TermPtr a, TermPtr b) {
  return make(node::Concat{std::move(a), std::move(b)});
}

}  // namespace core

bool is_value(const Term& t) {
  return std::visit(
      [](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::BoolLit> ||
                      std::is_same_v<T, node::UnitLit> ||
                      std::is_same_v<T, node::StrLit> ||
                      std::is_same_v<T, node::Lambda> ||
                      std::is_same_v<T, node::EmptyQueue>) {
          return true;
        } else if constexpr (std::is_same_v<T, node::QueueLit>) {
          return std::all_of(n.items.begin(), n.items.end(),
                             [](const TermPtr& i) { return is_value(*i); });
        } else if constexpr (std::is_same_v<T, node::ValCast>) {
          // Function proxies.
          return n.precise.is_arrow() && is_value(*n.body);
        } else {
          return false;
        }
      },
      t.node);
}

bool is_value(const TermPtr& t) { return is_value(*t); }

namespace {

TermPtr subst(const TermPtr& t, const std::string& x, const TermPtr& v);

// Substitutes into `body` unless one of `binders` shadows x.
TermPtr under(const TermPtr& body, std::initializer_list<const std::string*> binders,
              const std::string& x, const TermPtr& v) {
  for (const std::string* b : binders) {
    if (*b == x) return body;
  }
  return subst(body, x, v);
}

TermPtr subst(const TermPtr& t, const std::string& x, const TermPtr& v) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Var>) {
          return n.name == x ? v : t;
        } else if constexpr (std::is_same_v<T, node::BoolLit> ||
                             std::is_same_v<T, node::UnitLit> ||
                             std::is_same_v<T, node::StrLit> ||
                             std::is_same_v<T, node::Err> ||
                             std::is_same_v<T, node::EmptyQueue>) {
          return t;
        } else if constexpr (std::is_same_v<T, node::Lambda>) {
          TermPtr b = under(n.body, {&n.param}, x, v);
          if (b == n.body) return t;
          return core::lambda(n.param, n.param_type, n.eff, n.cod, b);
        } else if constexpr (std::is_same_v<T, node::App>) {
          TermPtr f = subst(n.fn, x, v), a = subst(n.arg, x, v);
          if (f == n.fn && a == n.arg) return t;
          return core::app(f, a);
        } else if constexpr (std::is_same_v<T, node::Let>) {
          TermPtr b = subst(n.bound, x, v);
          TermPtr body = under(n.body, {&n.name}, x, v);
          if (b == n.bound && body == n.body) return t;
          return core::let(n.name, b, body);
        } else if constexpr (std::is_same_v<T, node::If>) {
          TermPtr c = subst(n.cond, x, v), a = subst(n.then_branch, x, v),
                  b = subst(n.else_branch, x, v);
          if (c == n.cond && a == n.then_branch && b == n.else_branch) return t;
          return core::if_(c, a, b);
        } else if constexpr (std::is_same_v<T, node::Raise>) {
          TermPtr a = subst(n.arg, x, v);
          if (a == n.arg) return t;
          return core::raise(n.op, n.req, n.resp, a);
        } else if constexpr (std::is_same_v<T, node::Handle>) {
          node::Handle h = n;
          bool changed = false;
          h.scrutinee = subst(n.scrutinee, x, v);
          h.ret_body = under(n.ret_body, {&n.ret_var}, x, v);
          changed = h.scrutinee != n.scrutinee || h.ret_body != n.ret_body;
          for (auto& c : h.clauses) {
            TermPtr b = under(c.body, {&c.payload, &c.cont}, x, v);
            changed = changed || b != c.body;
            c.body = b;
          }
          if (!changed) return t;
          return std::make_shared<const Term>(Term{std::move(h)});
        } else if constexpr (std::is_same_v<T, node::ValCast>) {
          TermPtr b = subst(n.body, x, v);
          if (b == n.body) return t;
          return std::make_shared<const Term>(
              Term{node::ValCast{n.dir, n.precise, n.imprecise, b}});
        } else if constexpr (std::is_same_v<T, node::EffCast>) {
          TermPtr b = subst(n.body, x, v);
          if (b == n.body) return t;
          return std::make_shared<const Term>(
              Term{node::EffCast{n.dir, n.precise, n.imprecise, b}});
        } else if constexpr (std::is_same_v<T, node::Fix>) {
          TermPtr b = under(n.body, {&n.name}, x, v);
          if (b == n.body) return t;
          return core::fix(n.name, n.type, b);
        } else if constexpr (std::is_same_v<T, node::QueueLit>) {
          std::vector<TermPtr> items;
          bool changed = false;
          for (const auto& i : n.items) {
            items.push_back(subst(i, x, v));
            changed = changed || items.back() != i;
          }
          if (!changed) return t;
          return core::queue_lit(n.elem, std::move(items));
        } else if constexpr (std::is_same_v<T, node::Enqueue>) {
          TermPtr q = subst(n.queue, x, v), i = subst(n.item, x, v);
          if (q == n.queue && i == n.item) return t;
          return core::enqueue(q, i);
        } else if constexpr (std::is_same_v<T, node::CaseQueue>) {
          TermPtr q = subst(n.scrutinee, x, v);
          TermPtr e = subst(n.empty_branch, x, v);
          TermPtr c = under(n.cons_branch, {&n.head, &n.tail}, x, v);
          if (q == n.scrutinee && e == n.empty_branch && c == n.cons_branch) {
            return t;
          }
          return core::case_queue(q, e, n.head, n.tail, c);
        } else if constexpr (std::is_same_v<T, node::Concat>) {
          TermPtr a = subst(n.lhs, x, v), b = subst(n.rhs, x, v);
          if (a == n.lhs && b == n.rhs) return t;
          return core::concat(a, b);
        }
      },
      t->node);
}

}  // namespace

TermPtr substitute(const TermPtr& in, const std::string& x, const TermPtr& v) {
  return subst(in, x, v);
}

bool structurally_equal(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  return print_term(a) == print_term(b);
}

std::size_t term_size(const TermPtr& t) {
  return std::visit(
      [](const auto& n) -> std::size_t {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, node::Lambda>) {
          return 1 + term_size(n.body);
        } else if constexpr (std::is_same_v<T, node::App>) {
          return 1 + term_size(n.fn) + term_size(n.arg);
        } else if constexpr (std::is_same_v<T, node::Let>) {
          return 1 + term_size(n.bound) + term_size(n.body);
        } else if constexpr (std::is_same_v<T, node::If>) {
          return 1 + term_size(n.cond) + term_size(n.then_branch) +
                 term_size(n.else_branch);
        } else if constexpr (std::is_same_v<T, node::Raise> ) {
          return 1 + term_size(n.arg);
        } else if constexpr (std::is_same_v<T, node::Handle>) {
          std::size_t s = 1 + term_size(n.scrutinee) + term_size(n.ret_body);
          for (const auto& c : n.clauses) s += term_size(c.body);
          return s;
        } else if constexpr (std::is_same_v<T, node::ValCast> ||
                             std::is_same_v<T, node::EffCast> ||
                             std::is_same_v<T, node::Fix>) {
          return 1 + term_size(n.body);
        } else if constexpr (std::is_same_v<T, node::QueueLit>) {
          std::size_t s = 1;
          for (const auto& i : n.items) s += term_size(i);
          return s;
        } else if constexpr (std::is_same_v<T, node::Enqueue>) {
          return 1 + term_size(n.queue) + term_size(n.item);
        } else if constexpr (std::is_same_v<T, node::CaseQueue>) {
          return 1 + term_size(n.scrutinee) + term_size(n.empty_branch) +
                 term_size(n.cons_branch);
        } else if constexpr (std::is_same_v<T, node::Concat>) {
          return 1 + term_size(n.lhs) + term_size(n.rhs);
        } else {
          return 1;
        }
      },
      t->node);
}

}  // namespace greff
