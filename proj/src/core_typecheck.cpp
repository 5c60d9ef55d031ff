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

#include "greff/core.hpp"
#include "greff/error.hpp"

namespace greff {

EffectBound EffectBound::exactly(const EffectType& e) {
  if (e.is_dyn()) return dyn_only();
  return bounded(e.ops(), false);
}

bool EffectBound::admits(const EffectType& e) const {
  switch (kind) {
    case Kind::Pure: return true;
    case Kind::DynOnly: return e.is_dyn();
    case Kind::Bounded:
      if (e.is_dyn()) return dyn_ok;
      return subtype(EffectType::concrete(ops), e);
  }
  return false;
}

EffectType EffectBound::minimal() const {
  switch (kind) {
    case Kind::Pure: return EffectType::empty();
    case Kind::DynOnly: return EffectType::dyn();
    case Kind::Bounded: return EffectType::concrete(ops);
  }
  return EffectType::empty();
}

bool wellformed(const Signature& sig, const EffectType& e) {
  if (e.is_dyn()) return true;
  for (const auto& [name, s] : e.ops()) {
    const OpSig* global = sig.find(name);
    if (!global) return false;
    if (!(erase(s.req) == global->req) || !(erase(s.resp) == global->resp)) {
      return false;
    }
    if (!wellformed(sig, s.req) || !wellformed(sig, s.resp)) return false;
  }
  return true;
}

bool wellformed(const Signature& sig, const ValueType& t) {
  switch (t.kind()) {
    case ValueType::Kind::Queue:
      return wellformed(sig, t.elem());
    case ValueType::Kind::Arrow:
      return wellformed(sig, t.dom()) && wellformed(sig, t.eff()) &&
             wellformed(sig, t.cod());
    default:
      return true;
  }
}

namespace {

std::string snippet(const TermPtr& t) {
  std::string s = print_term(t);
  if (s.size() > 120) s = s.substr(0, 117) + "...";
  return s;
}

class Checker {
 public:
  Checker(const Signature& sig, TypeEnv env) : sig_(sig), env_(std::move(env)) {}

  Typing synth(const TermPtr& t) {
    return std::visit([&](const auto& n) { return rule(t, n); }, t->node);
  }

  void check_at(const TermPtr& t, const EffectType& eff, const ValueType& type,
                std::string_view rule_name) {
    Typing got = synth(t);
    if (!got.effect.admits(eff)) {
      fail(rule_name, t,
           fmt::format("effect {} not admitted at {}",
                       to_string(got.effect.minimal()), to_string(eff)));
    }
    if (got.type && !subtype(*got.type, type)) {
      fail(rule_name, t,
           fmt::format("type {} is not a subtype of {}", to_string(*got.type),
                       to_string(type)));
    }
  }

 private:
  struct Scope {
    Checker& c;
    std::size_t n = 0;
    explicit Scope(Checker& checker) : c(checker) {}
    void bind(const std::string& x, const ValueType& a) {
      c.env_.emplace_back(x, a);
      ++n;
    }
    ~Scope() { c.env_.resize(c.env_.size() - n); }
  };

  [[noreturn]] void fail(std::string_view rule_name, const TermPtr& t,
                         const std::string& msg) {
    throw GreffError(ErrorKind::TypeError,
                     fmt::format("[{}] {} in {}", rule_name, msg, snippet(t)));
  }

  void require_wf(const ValueType& a, const TermPtr& t) {
    if (!wellformed(sig_, a)) {
      throw GreffError(ErrorKind::WellFormedness,
                       fmt::format("type {} disagrees with the signature in {}",
                                   to_string(a), snippet(t)));
    }
  }

  void require_wf(const EffectType& e, const TermPtr& t) {
    if (!wellformed(sig_, e)) {
      throw GreffError(ErrorKind::WellFormedness,
                       fmt::format("effect {} disagrees with the signature in {}",
                                   to_string(e), snippet(t)));
    }
  }

  void require_op(const std::string& op, const ValueType& req,
                  const ValueType& resp, const TermPtr& t) {
    const OpSig* global = sig_.find(op);
    if (!global || !(erase(req) == global->req) ||
        !(erase(resp) == global->resp)) {
      throw GreffError(
          ErrorKind::WellFormedness,
          fmt::format("{}@{}~>{} is not in the signature in {}", op,
                      to_string(req), to_string(resp), snippet(t)));
    }
    require_wf(req, t);
    require_wf(resp, t);
  }

  EffectBound meet(const EffectBound& a, const EffectBound& b,
                   std::string_view rule_name, const TermPtr& t) {
    using K = EffectBound::Kind;
    if (a.kind == K::Pure) return b;
    if (b.kind == K::Pure) return a;
    if (a.kind == K::DynOnly || b.kind == K::DynOnly) {
      if (a.dyn_ok && b.dyn_ok) return EffectBound::dyn_only();
      fail(rule_name, t,
           fmt::format("effects {} and {} have no common type",
                       to_string(a.minimal()), to_string(b.minimal())));
    }
    auto j = subtype_join(EffectType::concrete(a.ops),
                          EffectType::concrete(b.ops));
    if (j) return EffectBound::bounded(j->ops(), a.dyn_ok && b.dyn_ok);
    if (a.dyn_ok && b.dyn_ok) return EffectBound::dyn_only();
    fail(rule_name, t,
         fmt::format("effects {} and {} have no upper bound",
                     to_string(a.minimal()), to_string(b.minimal())));
  }

  std::optional<ValueType> lookup(const std::string& x) const {
    for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
      if (it->first == x) return it->second;
    }
    return std::nullopt;
  }

  ValueType need_type(const Typing& ty, std::string_view rule_name,
                      const TermPtr& t) {
    if (!ty.type) fail(rule_name, t, "cannot determine the type of an error term");
    return *ty.type;
  }

  void sub(const std::optional<ValueType>& got, const ValueType& want,
           std::string_view rule_name, const TermPtr& t) {
    if (got && !subtype(*got, want)) {
      fail(rule_name, t,
           fmt::format("expected a subtype of {}, got {}", to_string(want),
                       to_string(*got)));
    }
  }

  Typing rule(const TermPtr& t, const node::Var& n) {
    auto a = lookup(n.name);
    if (!a) fail("Var", t, "unbound variable " + n.name);
    return {EffectBound::pure(), *a};
  }
  Typing rule(const TermPtr&, const node::BoolLit&) {
    return {EffectBound::pure(), ValueType::boolean()};
  }
  Typing rule(const TermPtr&, const node::UnitLit&) {
    return {EffectBound::pure(), ValueType::unit()};
  }
  Typing rule(const TermPtr&, const node::StrLit&) {
    return {EffectBound::pure(), ValueType::str()};
  }
  Typing rule(const TermPtr&, const node::Err&) {
    return {EffectBound::pure(), std::nullopt};
  }

  Typing rule(const TermPtr& t, const node::Lambda& n) {
    require_wf(n.param_type, t);
    require_wf(n.eff, t);
    require_wf(n.cod, t);
    {
      Scope s(*this);
      s.bind(n.param, n.param_type);
      check_at(n.body, n.eff, n.cod, "Lam");
    }
    return {EffectBound::pure(), ValueType::arrow(n.param_type, n.eff, n.cod)};
  }

  Typing rule(const TermPtr& t, const node::App& n) {
    Typing f = synth(n.fn);
    Typing a = synth(n.arg);
    EffectBound eff = meet(f.effect, a.effect, "App", t);
    if (!f.type) return {eff, std::nullopt};
    if (!f.type->is_arrow()) {
      fail("App", t, "applying a non-function of type " + to_string(*f.type));
    }
    sub(a.type, f.type->dom(), "App", t);
    eff = meet(eff, EffectBound::exactly(f.type->eff()), "App", t);
    return {eff, f.type->cod()};
  }

  Typing rule(const TermPtr& t, const node::Let& n) {
    Typing b = synth(n.bound);
    ValueType a = need_type(b, "Let", t);
    Scope s(*this);
    s.bind(n.name, a);
    Typing body = synth(n.body);
    return {meet(b.effect, body.effect, "Let", t), body.type};
  }

  std::optional<ValueType> join_types(const std::optional<ValueType>& a,
                                      const std::optional<ValueType>& b,
                                      std::string_view rule_name,
                                      const TermPtr& t) {
    if (!a) return b;
    if (!b) return a;
    auto j = subtype_join(*a, *b);
    if (!j) {
      fail(rule_name, t,
           fmt::format("branches of types {} and {} have no upper bound",
                       to_string(*a), to_string(*b)));
    }
    return j;
  }

  Typing rule(const TermPtr& t, const node::If& n) {
    Typing c = synth(n.cond);
    sub(c.type, ValueType::boolean(), "If", t);
    Typing x = synth(n.then_branch);
    Typing y = synth(n.else_branch);
    EffectBound eff = meet(meet(c.effect, x.effect, "If", t), y.effect, "If", t);
    return {eff, join_types(x.type, y.type, "If", t)};
  }

  Typing rule(const TermPtr& t, const node::Raise& n) {
    require_op(n.op, n.req, n.resp, t);
    Typing a = synth(n.arg);
    sub(a.type, n.req, "Raise", t);
    const OpSig* global = sig_.find(n.op);
    bool dyn_ok = subtype(n.req, global->req) && subtype(global->resp, n.resp);
    EffectBound own =
        EffectBound::bounded(OpMap{{n.op, OpSig{n.req, n.resp}}}, dyn_ok);
    return {meet(a.effect, own, "Raise", t), n.resp};
  }

  Typing rule(const TermPtr& t, const node::Handle& n) {
    require_wf(n.result_eff, t);
    require_wf(n.result_type, t);
    EffectType scrut_eff;
    ValueType scrut_type;
    if (n.kind == HandlerKind::Shallow) {
      require_wf(n.scrut_eff, t);
      require_wf(n.scrut_type, t);
      check_at(n.scrutinee, n.scrut_eff, n.scrut_type, "ShallowHandle");
      scrut_eff = n.scrut_eff;
      scrut_type = n.scrut_type;
    } else {
      Typing m = synth(n.scrutinee);
      scrut_type = need_type(m, "Handle", t);
      scrut_eff = m.effect.minimal();
    }
    {
      Scope s(*this);
      s.bind(n.ret_var, scrut_type);
      check_at(n.ret_body, n.result_eff, n.result_type, "Handle");
    }
    for (const std::string& op : effect_names(scrut_eff, sig_)) {
      OpSig e = *lookup_op(scrut_eff, sig_, op);
      if (const node::Clause* c = n.find(op)) {
        if (!subtype(e.req, c->req) || !subtype(c->resp, e.resp)) {
          fail("Handle", t,
               fmt::format("clause for {} typed {}~>{} cannot handle {}", op,
                           to_string(c->req), to_string(c->resp), to_string(e)));
        }
        continue;
      }
      auto out = lookup_op(n.result_eff, sig_, op);
      if (!out || !subtype(e.req, out->req) || !subtype(out->resp, e.resp)) {
        fail("Handle", t,
             fmt::format("unhandled {}@{} is not in the result effect {}", op,
                         to_string(e), to_string(n.result_eff)));
      }
    }
    for (const auto& c : n.clauses) {
      require_op(c.op, c.req, c.resp, t);
      ValueType k = n.kind == HandlerKind::Deep
                        ? ValueType::arrow(c.resp, n.result_eff, n.result_type)
                        : ValueType::arrow(c.resp, scrut_eff, scrut_type);
      Scope s(*this);
      s.bind(c.payload, c.req);
      s.bind(c.cont, k);
      check_at(c.body, n.result_eff, n.result_type, "Handle");
    }
    return {EffectBound::exactly(n.result_eff), n.result_type};
  }

  Typing rule(const TermPtr& t, const node::ValCast& n) {
    require_wf(n.precise, t);
    require_wf(n.imprecise, t);
    const bool up = n.dir == CastDir::Up;
    Typing m = synth(n.body);
    sub(m.type, up ? n.precise : n.imprecise, up ? "ValUp" : "ValDown", t);
    return {m.effect, up ? n.imprecise : n.precise};
  }

  Typing rule(const TermPtr& t, const node::EffCast& n) {
    require_wf(n.precise, t);
    require_wf(n.imprecise, t);
    const bool up = n.dir == CastDir::Up;
    Typing m = synth(n.body);
    const EffectType& from = up ? n.precise : n.imprecise;
    if (!m.effect.admits(from)) {
      fail(up ? "EffUp" : "EffDown", t,
           fmt::format("body effect {} not admitted at {}",
                       to_string(m.effect.minimal()), to_string(from)));
    }
    return {EffectBound::exactly(up ? n.imprecise : n.precise), m.type};
  }

  Typing rule(const TermPtr& t, const node::Fix& n) {
    require_wf(n.type, t);
    if (!is_value(n.body)) fail("Fix", t, "fixpoint body must be a value");
    Scope s(*this);
    s.bind(n.name, n.type);
    check_at(n.body, EffectType::empty(), n.type, "Fix");
    return {EffectBound::pure(), n.type};
  }

  Typing rule(const TermPtr& t, const node::EmptyQueue& n) {
    require_wf(n.elem, t);
    return {EffectBound::pure(), ValueType::queue(n.elem)};
  }

  Typing rule(const TermPtr& t, const node::QueueLit& n) {
    require_wf(n.elem, t);
    EffectBound eff;
    for (const auto& i : n.items) {
      Typing it = synth(i);
      sub(it.type, n.elem, "Queue", t);
      eff = meet(eff, it.effect, "Queue", t);
    }
    return {eff, ValueType::queue(n.elem)};
  }

  Typing rule(const TermPtr& t, const node::Enqueue& n) {
    Typing q = synth(n.queue);
    Typing x = synth(n.item);
    EffectBound eff = meet(q.effect, x.effect, "Enqueue", t);
    if (!q.type) {
      if (!x.type) return {eff, std::nullopt};
      return {eff, ValueType::queue(*x.type)};
    }
    if (!q.type->is(ValueType::Kind::Queue)) {
      fail("Enqueue", t, "not a queue: " + to_string(*q.type));
    }
    sub(x.type, q.type->elem(), "Enqueue", t);
    return {eff, q.type};
  }

  Typing rule(const TermPtr& t, const node::CaseQueue& n) {
    Typing q = synth(n.scrutinee);
    ValueType qt = need_type(q, "CaseQueue", t);
    if (!qt.is(ValueType::Kind::Queue)) {
      fail("CaseQueue", t, "not a queue: " + to_string(qt));
    }
    Typing e = synth(n.empty_branch);
    Typing c;
    {
      Scope s(*this);
      s.bind(n.head, qt.elem());
      s.bind(n.tail, qt);
      c = synth(n.cons_branch);
    }
    EffectBound eff =
        meet(meet(q.effect, e.effect, "CaseQueue", t), c.effect, "CaseQueue", t);
    return {eff, join_types(e.type, c.type, "CaseQueue", t)};
  }

  Typing rule(const TermPtr& t, const node::Concat& n) {
    Typing a = synth(n.lhs);
    Typing b = synth(n.rhs);
    sub(a.type, ValueType::str(), "Concat", t);
    sub(b.type, ValueType::str(), "Concat", t);
    return {meet(a.effect, b.effect, "Concat", t), ValueType::str()};
  }

  const Signature& sig_;
  TypeEnv env_;
};

}  // namespace

Typing typecheck(const Signature& sig, const TypeEnv& env, const TermPtr& m) {
  return Checker(sig, env).synth(m);
}

void check(const Signature& sig, const TypeEnv& env, const TermPtr& m,
           const EffectType& eff, const ValueType& type) {
  Checker(sig, env).check_at(m, eff, type, "Check");
}

bool checks(const Signature& sig, const TypeEnv& env, const TermPtr& m,
            const EffectType& eff, const ValueType& type) {
  try {
    check(sig, env, m, eff, type);
    return true;
  } catch (const GreffError&) {
    return false;
  }
}

}  // namespace greff
