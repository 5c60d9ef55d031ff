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

#include "greff/conformance.hpp"
#include "greff/error.hpp"

namespace greff::conformance {
namespace {

// Names restart at each outermost call, so output depends only on inputs.
thread_local unsigned long counter = 0;
thread_local int depth = 0;

struct NameScope {
  NameScope() {
    if (depth++ == 0) counter = 0;
  }
  ~NameScope() { --depth; }
  NameScope(const NameScope&) = delete;
  NameScope& operator=(const NameScope&) = delete;
};

std::string fresh(const char* base) {
  return fmt::format("%{}{}", base, ++counter);
}

[[noreturn]] void precondition(const std::string& msg) {
  throw GreffError(ErrorKind::PreconditionViolated, msg);
}

}  // namespace

TermPtr expand_effect_cast_as_handler(const Signature& sig, CastDir dir,
                                      const EffectType& precise,
                                      const EffectType& imprecise, TermPtr m,
                                      const ValueType& type) {
  NameScope names;
  if (!greff::precision(precise, imprecise)) {
    precondition(fmt::format("{} is not below {}", to_string(precise),
                             to_string(imprecise)));
  }
  const bool up = dir == CastDir::Up;
  if (up && precise.is_dyn()) precondition("effect upcast from ?");
  const EffectType& from = up ? precise : imprecise;
  const EffectType& to = up ? imprecise : precise;

  node::Handle h;
  h.kind = HandlerKind::Deep;
  h.scrutinee = std::move(m);
  h.ret_var = fresh("x");
  h.ret_body = core::var(h.ret_var);
  h.result_eff = to;
  h.result_type = type;
  h.scrut_eff = from;
  h.scrut_type = type;
  for (const std::string& op : effect_names(from, sig)) {
    const OpSig src = *lookup_op(from, sig, op);
    node::Clause c;
    c.op = op;
    c.payload = fresh("p");
    c.cont = fresh("k");
    c.req = src.req;
    c.resp = src.resp;
    auto tgt = lookup_op(to, sig, op);
    if (!tgt) {
      c.body = core::err();
    } else if (up) {
      c.body = core::app(
          core::var(c.cont),
          core::val_down(src.resp, tgt->resp,
                         core::raise(op, tgt->req, tgt->resp,
                                     core::val_up(src.req, tgt->req,
                                                  core::var(c.payload)))));
    } else {
      c.body = core::app(
          core::var(c.cont),
          core::val_up(tgt->resp, src.resp,
                       core::raise(op, tgt->req, tgt->resp,
                                   core::val_down(tgt->req, src.req,
                                                  core::var(c.payload)))));
    }
    h.clauses.push_back(std::move(c));
  }
  return core::handle(std::move(h));
}

TermPtr expand_fun_cast(CastDir dir, const ValueType& precise,
                        const ValueType& imprecise, TermPtr f) {
  NameScope names;
  if (!precise.is_arrow() || !imprecise.is_arrow() ||
      !greff::precision(precise, imprecise)) {
    precondition(fmt::format("no function cast between {} and {}",
                             to_string(precise), to_string(imprecise)));
  }
  const std::string x = fresh("a");
  if (dir == CastDir::Up) {
    TermPtr call = core::app(
        std::move(f), core::val_down(precise.dom(), imprecise.dom(), core::var(x)));
    return core::lambda(
        x, imprecise.dom(), imprecise.eff(), imprecise.cod(),
        core::val_up(precise.cod(), imprecise.cod(),
                     core::eff_up(precise.eff(), imprecise.eff(), call)));
  }
  TermPtr call = core::app(
      std::move(f), core::val_up(precise.dom(), imprecise.dom(), core::var(x)));
  return core::lambda(
      x, precise.dom(), precise.eff(), precise.cod(),
      core::val_down(precise.cod(), imprecise.cod(),
                     core::eff_down(precise.eff(), imprecise.eff(), call)));
}

namespace {

class CastExpander {
 public:
  explicit CastExpander(const Signature& sig) : sig_(sig) {}

  TermPtr go(const TermPtr& t) {
    const Term& n = *t;
    if (auto* c = n.as<node::EffCast>()) {
      TermPtr body = go(c->body);
      if (c->precise.is_dyn() && c->imprecise.is_dyn()) return body;
      Typing ty = typecheck(sig_, env_, c->body);
      if (!ty.type) return core::eff_cast(c->dir, c->precise, c->imprecise, body);
      return expand_effect_cast_as_handler(sig_, c->dir, c->precise,
                                           c->imprecise, body, *ty.type);
    }
    if (auto* l = n.as<node::Lambda>()) {
      return core::lambda(l->param, l->param_type, l->eff, l->cod,
                          under({{l->param, l->param_type}}, l->body));
    }
    if (auto* a = n.as<node::App>()) return core::app(go(a->fn), go(a->arg));
    if (auto* l = n.as<node::Let>()) {
      Typing ty = typecheck(sig_, env_, l->bound);
      TermPtr bound = go(l->bound);
      if (!ty.type) return core::let(l->name, bound, l->body);
      return core::let(l->name, bound, under({{l->name, *ty.type}}, l->body));
    }
    if (auto* i = n.as<node::If>())
      return core::if_(go(i->cond), go(i->then_branch), go(i->else_branch));
    if (auto* r = n.as<node::Raise>())
      return core::raise(r->op, r->req, r->resp, go(r->arg));
    if (auto* h = n.as<node::Handle>()) {
      Typing ty = typecheck(sig_, env_, h->scrutinee);
      node::Handle out = *h;
      out.scrutinee = go(h->scrutinee);
      if (ty.type) out.ret_body = under({{h->ret_var, *ty.type}}, h->ret_body);
      for (node::Clause& c : out.clauses) {
        ValueType k = h->kind == HandlerKind::Deep
                          ? ValueType::arrow(c.resp, h->result_eff, h->result_type)
                          : ValueType::arrow(c.resp, h->scrut_eff, h->scrut_type);
        c.body = under({{c.payload, c.req}, {c.cont, k}}, c.body);
      }
      return core::handle(std::move(out));
    }
    if (auto* c = n.as<node::ValCast>())
      return core::val_cast(c->dir, c->precise, c->imprecise, go(c->body));
    if (auto* f = n.as<node::Fix>())
      return core::fix(f->name, f->type, under({{f->name, f->type}}, f->body));
    if (auto* e = n.as<node::Enqueue>())
      return core::enqueue(go(e->queue), go(e->item));
    if (auto* q = n.as<node::QueueLit>()) {
      std::vector<TermPtr> items;
      for (const TermPtr& i : q->items) items.push_back(go(i));
      return core::queue_lit(q->elem, std::move(items));
    }
    if (auto* c = n.as<node::CaseQueue>()) {
      Typing ty = typecheck(sig_, env_, c->scrutinee);
      TermPtr scrut = go(c->scrutinee);
      TermPtr cons = c->cons_branch;
      if (ty.type && ty.type->is(ValueType::Kind::Queue)) {
        cons = under({{c->head, ty.type->elem()}, {c->tail, *ty.type}}, cons);
      }
      return core::case_queue(scrut, go(c->empty_branch), c->head, c->tail, cons);
    }
    if (auto* c = n.as<node::Concat>()) return core::concat(go(c->lhs), go(c->rhs));
    return t;
  }

 private:
  TermPtr under(TypeEnv binds, const TermPtr& body) {
    const std::size_t mark = env_.size();
    for (auto& b : binds) env_.push_back(std::move(b));
    TermPtr out = go(body);
    env_.resize(mark);
    return out;
  }

  const Signature& sig_;
  TypeEnv env_;
};

struct EffFact {
  EffectType a, a_h, d_l, d_h, b_l, b;
};

[[noreturn]] void failed(const std::string& what) {
  throw GreffError(ErrorKind::DecompositionFailed, what);
}

EffFact decompose_eff(const EffectType& s, const EffectType& t) {
  if (s.is_dyn() && t.is_dyn()) return {s, s, s, s, s, s};
  const EffectType dyn = EffectType::dyn();
  if (s.is_dyn()) return {s, dyn, dyn, dyn, t, t};
  if (t.is_dyn()) return {s, s, dyn, dyn, dyn, t};
  OpMap a_h, d_l, d_h, b_l;
  for (const auto& [op, e] : s.ops()) {
    auto it = t.ops().find(op);
    if (it == t.ops().end()) failed(op + " missing on the right");
    Factorization r = decompose(e.req, it->second.req);
    Factorization p = decompose(it->second.resp, e.resp);
    a_h.emplace(op, OpSig{r.a_h, p.b_l});
    d_h.emplace(op, OpSig{r.d_h, p.d_l});
    d_l.emplace(op, OpSig{r.d_l, p.d_h});
    b_l.emplace(op, OpSig{r.b_l, p.a_h});
  }
  for (const auto& [op, e] : t.ops()) {
    if (s.has(op)) continue;
    a_h.emplace(op, e);
    d_h.emplace(op, e);
  }
  return {s, EffectType::concrete(std::move(a_h)),
          EffectType::concrete(std::move(d_l)),
          EffectType::concrete(std::move(d_h)),
          EffectType::concrete(std::move(b_l)), t};
}

}  // namespace

TermPtr expand_effect_casts(const Signature& sig, const TermPtr& m) {
  NameScope names;
  return CastExpander(sig).go(m);
}

Factorization decompose(const ValueType& a, const ValueType& b) {
  if (a.kind() != b.kind()) {
    failed(fmt::format("{} and {} differ in shape", to_string(a), to_string(b)));
  }
  switch (a.kind()) {
    case ValueType::Kind::Queue: {
      Factorization e = decompose(a.elem(), b.elem());
      auto q = [](const ValueType& x) { return ValueType::queue(x); };
      return {q(e.a), q(e.a_h), q(e.d_l), q(e.d_h), q(e.b_l), q(e.b), q(e.d)};
    }
    case ValueType::Kind::Arrow: {
      Factorization dom = decompose(b.dom(), a.dom());
      EffFact eff = decompose_eff(a.eff(), b.eff());
      Factorization cod = decompose(a.cod(), b.cod());
      auto arr = ValueType::arrow;
      return {a,
              arr(dom.b_l, eff.a_h, cod.a_h),
              arr(dom.d_h, eff.d_l, cod.d_l),
              arr(dom.d_l, eff.d_h, cod.d_h),
              arr(dom.a_h, eff.b_l, cod.b_l),
              b,
              erase(a)};
    }
    default:
      return {a, a, a, a, a, a, a};
  }
}

bool valid(const Factorization& f) {
  return subtype(f.a, f.a_h) && subtype(f.b_l, f.b) && subtype(f.d_l, f.d_h) &&
         greff::precision(f.a, f.d_l) && greff::precision(f.a_h, f.d_h) &&
         greff::precision(f.b_l, f.d_l) && greff::precision(f.b, f.d_h) &&
         greff::precision(f.d_l, f.d) && greff::precision(f.d_h, f.d) &&
         f.d == erase(f.a) && f.d == erase(f.b);
}

std::array<TermPtr, 4> cast_factorizations(const ValueType& a,
                                           const ValueType& b, TermPtr m) {
  const Factorization f = decompose(a, b);
  if (!valid(f)) {
    failed(fmt::format("inconsistent decomposition of {} and {}", to_string(a),
                       to_string(b)));
  }
  using core::val_down;
  using core::val_up;
  return {val_down(f.b, f.d_h, val_up(f.a_h, f.d_h, m)),
          val_down(f.b, f.d_h, val_up(f.a, f.d_l, m)),
          val_down(f.b_l, f.d_l, val_up(f.a, f.d_l, m)),
          val_down(f.b, f.d, val_up(f.a, f.d, m))};
}

}  // namespace greff::conformance
