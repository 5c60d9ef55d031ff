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

#include "support/reference_eval.hpp"

#include <functional>
#include <stdexcept>
#include <variant>

namespace greff::reference {
namespace {

using Ctx = std::function<TermPtr(TermPtr)>;

TermPtr mk(Term::Node n) { return std::make_shared<const Term>(Term{std::move(n)}); }

bool value(const TermPtr& t) {
  const Term& n = *t;
  if (n.is<node::Lambda>() || n.is<node::BoolLit>() || n.is<node::UnitLit>() ||
      n.is<node::StrLit>() || n.is<node::EmptyQueue>())
    return true;
  if (auto* q = n.as<node::QueueLit>()) {
    for (const auto& i : q->items)
      if (!value(i)) return false;
    return true;
  }
  if (auto* c = n.as<node::ValCast>()) return c->precise.is_arrow() && value(c->body);
  return false;
}

TermPtr subst(const TermPtr& t, const std::string& x, const TermPtr& v);

TermPtr under(const TermPtr& body, const std::string& binder, const std::string& x,
              const TermPtr& v) {
  return binder == x ? body : subst(body, x, v);
}

TermPtr subst(const TermPtr& t, const std::string& x, const TermPtr& v) {
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, node::Var>) {
          return n.name == x ? v : t;
        } else if constexpr (std::is_same_v<N, node::Lambda>) {
          N m = n;
          m.body = under(n.body, n.param, x, v);
          return mk(m);
        } else if constexpr (std::is_same_v<N, node::App>) {
          return mk(N{subst(n.fn, x, v), subst(n.arg, x, v)});
        } else if constexpr (std::is_same_v<N, node::Let>) {
          return mk(N{n.name, subst(n.bound, x, v), under(n.body, n.name, x, v)});
        } else if constexpr (std::is_same_v<N, node::If>) {
          return mk(N{subst(n.cond, x, v), subst(n.then_branch, x, v),
                      subst(n.else_branch, x, v)});
        } else if constexpr (std::is_same_v<N, node::Raise>) {
          N m = n;
          m.arg = subst(n.arg, x, v);
          return mk(m);
        } else if constexpr (std::is_same_v<N, node::Handle>) {
          N m = n;
          m.scrutinee = subst(n.scrutinee, x, v);
          m.ret_body = under(n.ret_body, n.ret_var, x, v);
          for (auto& c : m.clauses)
            if (c.payload != x && c.cont != x) c.body = subst(c.body, x, v);
          return mk(m);
        } else if constexpr (std::is_same_v<N, node::ValCast> ||
                             std::is_same_v<N, node::EffCast>) {
          N m = n;
          m.body = subst(n.body, x, v);
          return mk(m);
        } else if constexpr (std::is_same_v<N, node::Fix>) {
          N m = n;
          m.body = under(n.body, n.name, x, v);
          return mk(m);
        } else if constexpr (std::is_same_v<N, node::QueueLit>) {
          N m = n;
          for (auto& i : m.items) i = subst(i, x, v);
          return mk(m);
        } else if constexpr (std::is_same_v<N, node::Enqueue>) {
          return mk(N{subst(n.queue, x, v), subst(n.item, x, v)});
        } else if constexpr (std::is_same_v<N, node::CaseQueue>) {
          N m = n;
          m.scrutinee = subst(n.scrutinee, x, v);
          m.empty_branch = subst(n.empty_branch, x, v);
          if (n.head != x && n.tail != x) m.cons_branch = subst(n.cons_branch, x, v);
          return mk(m);
        } else if constexpr (std::is_same_v<N, node::Concat>) {
          return mk(N{subst(n.lhs, x, v), subst(n.rhs, x, v)});
        } else {
          return t;
        }
      },
      t->node);
}

struct Stuck : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One step from the root.
struct Step {
  enum class Kind { Value, Next, Error, Raised } kind;
  TermPtr term;  // Next: the reduct; Raised: the payload
  std::string op;
  ValueType req, resp;
  Ctx ctx;  // Raised: the context between the raise and the root
};

class Reducer {
 public:
  explicit Reducer(const Signature& sig) : sig_(sig) {}
  std::size_t fired = 0;

  Step step(const TermPtr& t) {
    if (value(t)) return {Step::Kind::Value, t, {}, {}, {}, {}};
    const Term& n = *t;
    if (n.is<node::Err>()) return fire_err();
    if (auto* a = n.as<node::App>()) {
      if (!value(a->fn)) return inside(a->fn, [a](TermPtr h) { return mk(node::App{h, a->arg}); });
      if (!value(a->arg)) return inside(a->arg, [a](TermPtr h) { return mk(node::App{a->fn, h}); });
      return next(apply(a->fn, a->arg));
    }
    if (auto* l = n.as<node::Let>()) {
      if (!value(l->bound))
        return inside(l->bound, [l](TermPtr h) { return mk(node::Let{l->name, h, l->body}); });
      return next(subst(l->body, l->name, l->bound));
    }
    if (auto* i = n.as<node::If>()) {
      if (!value(i->cond))
        return inside(i->cond, [i](TermPtr h) {
          return mk(node::If{h, i->then_branch, i->else_branch});
        });
      auto* b = i->cond->as<node::BoolLit>();
      if (!b) throw Stuck("if on a non-boolean");
      return next(b->value ? i->then_branch : i->else_branch);
    }
    if (auto* r = n.as<node::Raise>()) {
      if (!value(r->arg))
        return inside(r->arg, [r](TermPtr h) {
          return mk(node::Raise{r->op, r->req, r->resp, h});
        });
      Step s{Step::Kind::Raised, r->arg, r->op, r->req, r->resp, [](TermPtr h) { return h; }};
      return s;
    }
    if (auto* h = n.as<node::Handle>()) return handle(*h);
    if (auto* c = n.as<node::ValCast>()) {
      if (!value(c->body))
        return inside(c->body, [c](TermPtr h) {
          return mk(node::ValCast{c->dir, c->precise, c->imprecise, h});
        });
      return next(retag(c->dir, c->precise, c->imprecise, c->body));
    }
    if (auto* c = n.as<node::EffCast>()) return eff_cast(*c);
    if (auto* f = n.as<node::Fix>()) return next(subst(f->body, f->name, t));
    if (auto* e = n.as<node::Enqueue>()) {
      if (!value(e->queue))
        return inside(e->queue, [e](TermPtr h) { return mk(node::Enqueue{h, e->item}); });
      if (!value(e->item))
        return inside(e->item, [e](TermPtr h) { return mk(node::Enqueue{e->queue, h}); });
      auto [elem, items] = contents(e->queue);
      items.push_back(e->item);
      return next(mk(node::QueueLit{elem, items}));
    }
    if (auto* c = n.as<node::CaseQueue>()) {
      if (!value(c->scrutinee))
        return inside(c->scrutinee, [c](TermPtr h) {
          return mk(node::CaseQueue{h, c->empty_branch, c->head, c->tail, c->cons_branch});
        });
      auto [elem, items] = contents(c->scrutinee);
      if (items.empty()) return next(c->empty_branch);
      TermPtr head = items.front();
      items.erase(items.begin());
      TermPtr tail = items.empty() ? mk(node::EmptyQueue{elem}) : mk(node::QueueLit{elem, items});
      TermPtr body = subst(c->cons_branch, c->tail, tail);
      if (c->head != c->tail) body = subst(body, c->head, head);
      return next(body);
    }
    if (auto* c = n.as<node::Concat>()) {
      if (!value(c->lhs))
        return inside(c->lhs, [c](TermPtr h) { return mk(node::Concat{h, c->rhs}); });
      if (!value(c->rhs))
        return inside(c->rhs, [c](TermPtr h) { return mk(node::Concat{c->lhs, h}); });
      auto* a = c->lhs->as<node::StrLit>();
      auto* b = c->rhs->as<node::StrLit>();
      if (!a || !b) throw Stuck("concat on non-strings");
      return next(mk(node::StrLit{a->value + b->value}));
    }
    throw Stuck("no rule applies");
  }

 private:
  const Signature& sig_;
  std::size_t counter_ = 0;

  Step next(TermPtr t) {
    ++fired;
    return {Step::Kind::Next, std::move(t), {}, {}, {}, {}};
  }
  Step fire_err() {
    ++fired;
    return {Step::Kind::Error, nullptr, {}, {}, {}, {}};
  }

  // Steps a subterm and rebuilds the enclosing frame around the result.
  Step inside(const TermPtr& sub, Ctx frame) {
    Step s = step(sub);
    switch (s.kind) {
      case Step::Kind::Next: s.term = frame(s.term); break;
      case Step::Kind::Raised: {
        Ctx inner = s.ctx;
        s.ctx = [frame, inner](TermPtr h) { return frame(inner(h)); };
        break;
      }
      default: break;
    }
    return s;
  }

  static std::pair<ValueType, std::vector<TermPtr>> contents(const TermPtr& q) {
    if (auto* e = q->as<node::EmptyQueue>()) return {e->elem, {}};
    if (auto* l = q->as<node::QueueLit>()) return {l->elem, l->items};
    throw Stuck("expected a queue");
  }

  TermPtr retag(CastDir dir, const ValueType& p, const ValueType& i, const TermPtr& v) {
    if (p.is_arrow()) return mk(node::ValCast{dir, p, i, v});
    if (!p.is(ValueType::Kind::Queue)) return v;
    auto [elem, items] = contents(v);
    const ValueType target = dir == CastDir::Up ? i.elem() : p.elem();
    if (items.empty()) return mk(node::EmptyQueue{target});
    for (auto& x : items) x = retag(dir, p.elem(), i.elem(), x);
    return mk(node::QueueLit{target, items});
  }

  TermPtr apply(const TermPtr& f, const TermPtr& a) {
    if (auto* l = f->as<node::Lambda>()) return subst(l->body, l->param, a);
    auto* c = f->as<node::ValCast>();
    if (!c) throw Stuck("applying a non-function");
    const ValueType& p = c->precise;
    const ValueType& i = c->imprecise;
    const CastDir back = c->dir == CastDir::Up ? CastDir::Down : CastDir::Up;
    TermPtr call = mk(node::App{c->body, mk(node::ValCast{back, p.dom(), i.dom(), a})});
    return mk(node::ValCast{c->dir, p.cod(), i.cod(),
                            mk(node::EffCast{c->dir, p.eff(), i.eff(), call})});
  }

  Step handle(const node::Handle& h) {
    Step s = step(h.scrutinee);
    switch (s.kind) {
      case Step::Kind::Value: return next(subst(h.ret_body, h.ret_var, s.term));
      case Step::Kind::Error: return s;
      case Step::Kind::Next: {
        node::Handle m = h;
        m.scrutinee = s.term;
        s.term = mk(m);
        return s;
      }
      case Step::Kind::Raised: break;
    }
    const node::Clause* cl = nullptr;
    for (const auto& c : h.clauses)
      if (c.op == s.op) cl = &c;
    if (!cl) {
      Ctx inner = s.ctx;
      s.ctx = [h, inner](TermPtr x) {
        node::Handle m = h;
        m.scrutinee = inner(x);
        return mk(m);
      };
      return s;
    }
    const std::string y = "%ref" + std::to_string(counter_++);
    TermPtr resumed = s.ctx(mk(node::Var{y}));
    TermPtr k;
    if (h.kind == HandlerKind::Deep) {
      node::Handle again = h;
      again.scrutinee = resumed;
      k = mk(node::Lambda{y, cl->resp, h.result_eff, h.result_type, mk(again)});
    } else {
      k = mk(node::Lambda{y, cl->resp, h.scrut_eff, h.scrut_type, resumed});
    }
    TermPtr body = subst(cl->body, cl->cont, k);
    if (cl->payload != cl->cont) body = subst(body, cl->payload, s.term);
    return next(body);
  }

  Step eff_cast(const node::EffCast& c) {
    Step s = step(c.body);
    auto rewrap = [c](TermPtr b) {
      return mk(node::EffCast{c.dir, c.precise, c.imprecise, b});
    };
    switch (s.kind) {
      case Step::Kind::Value: return next(s.term);
      case Step::Kind::Error: return s;
      case Step::Kind::Next: s.term = rewrap(s.term); return s;
      case Step::Kind::Raised: break;
    }
    const auto src = lookup_op(c.precise, sig_, s.op);
    const auto tgt = lookup_op(c.imprecise, sig_, s.op);
    const bool passes = c.dir == CastDir::Up ? (!src && !tgt) : !tgt;
    if (passes) {
      Ctx inner = s.ctx;
      s.ctx = [rewrap, inner](TermPtr x) { return rewrap(inner(x)); };
      return s;
    }
    if (c.dir == CastDir::Down && !src) return fire_err();
    if (!src || !tgt) throw Stuck("effect cast missing " + s.op);
    const std::string x = "%ref" + std::to_string(counter_++);
    const OpSig& to = c.dir == CastDir::Up ? *tgt : *src;
    const CastDir back = c.dir == CastDir::Up ? CastDir::Down : CastDir::Up;
    // Re-raise at the other side's entry, casting payload and answer.
    TermPtr payload = mk(node::ValCast{c.dir, src->req, tgt->req, s.term});
    TermPtr reraise = mk(node::ValCast{back, src->resp, tgt->resp,
                                       mk(node::Raise{s.op, to.req, to.resp, payload})});
    return next(mk(node::Let{x, reraise, rewrap(s.ctx(mk(node::Var{x})))}));
  }
};

}  // namespace

Result evaluate(const Signature& sig, const TermPtr& program, std::size_t fuel) {
  Reducer r(sig);
  TermPtr t = program;
  for (;;) {
    if (r.fired >= fuel) return {Result::Kind::FuelExhausted, nullptr, {}, r.fired};
    Step s = r.step(t);
    switch (s.kind) {
      case Step::Kind::Value: return {Result::Kind::Value, t, {}, r.fired};
      case Step::Kind::Error: return {Result::Kind::Error, nullptr, {}, r.fired};
      case Step::Kind::Raised: return {Result::Kind::UncaughtRaise, s.term, s.op, r.fired};
      case Step::Kind::Next: t = s.term; break;
    }
  }
}

namespace {

std::string show_term(const TermPtr& v) {
  if (auto* b = v->as<node::BoolLit>()) return b->value ? "true" : "false";
  if (v->is<node::UnitLit>()) return "()";
  if (auto* s = v->as<node::StrLit>()) return "\"" + s->value + "\"";
  if (v->is<node::EmptyQueue>()) return "[]";
  if (auto* q = v->as<node::QueueLit>()) {
    std::string out = "[";
    for (std::size_t i = 0; i < q->items.size(); ++i) {
      if (i) out += ", ";
      out += show_term(q->items[i]);
    }
    return out + "]";
  }
  return "<fun>";
}

}  // namespace

std::string show(const Result& r) {
  switch (r.kind) {
    case Result::Kind::Value: return show_term(r.value);
    case Result::Kind::Error: return "error";
    case Result::Kind::UncaughtRaise: return "uncaught " + r.op;
    case Result::Kind::FuelExhausted: return "out of fuel";
  }
  return "?";
}

}  // namespace greff::reference
