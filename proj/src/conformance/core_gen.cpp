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

#include "greff/conformance.hpp"

namespace greff::conformance {
namespace {

const char* const kOpNames[] = {"ask", "emit", "tick"};

std::vector<std::pair<std::string, ValueType>> vars_of(const TypeEnv& env,
                                                       const ValueType& t) {
  std::vector<std::pair<std::string, ValueType>> out;
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    bool shadowed = std::any_of(out.begin(), out.end(),
                                [&](const auto& o) { return o.first == it->first; });
    if (!shadowed) out.push_back(*it);
  }
  std::erase_if(out, [&](const auto& o) { return !(o.second == t); });
  return out;
}

TypeEnv extend(TypeEnv env, std::string x, ValueType t) {
  env.emplace_back(std::move(x), std::move(t));
  return env;
}

}  // namespace

CoreGen::CoreGen(std::uint64_t seed, GenOptions options)
    : rng_(seed), opt_(options) {
  const int n = 1 + pick(std::max(1, opt_.max_effects));
  for (int i = 0; i < n; ++i) {
    // Later operations may mention earlier ones in their types.
    ValueType req = type(1);
    ValueType resp = type(1);
    const std::string name = kOpNames[i];
    local_.emplace(name, OpSig{req, resp});
    sig_.declare(name, erase(OpSig{req, resp}));
    ops_.push_back(name);
  }
}

int CoreGen::pick(int n) {
  return static_cast<int>(std::uniform_int_distribution<int>(0, n - 1)(rng_));
}

bool CoreGen::chance(int percent) { return pick(100) < percent; }

std::string CoreGen::fresh(const char* base) {
  return fmt::format("{}{}", base, ++fresh_);
}

ValueType CoreGen::type(int depth) {
  const int r = pick(depth > 0 ? 10 : 6);
  if (r < 3) return ValueType::boolean();
  if (r < 4) return ValueType::unit();
  if (r < 6) return ValueType::str();
  if (r < 7) return ValueType::queue(type(0));
  return ValueType::arrow(type(depth - 1), effect(), type(depth - 1));
}

EffectType CoreGen::effect(bool allow_dyn) {
  if (allow_dyn && chance(25)) return EffectType::dyn();
  OpMap ops;
  for (const auto& [name, s] : local_)
    if (chance(50)) ops.emplace(name, s);
  return EffectType::concrete(std::move(ops));
}

EffectType CoreGen::precisify(const EffectType& e) {
  return e.is_dyn() ? effect(false) : e;
}

ValueType CoreGen::precisify(const ValueType& t) {
  switch (t.kind()) {
    case ValueType::Kind::Queue: return ValueType::queue(precisify(t.elem()));
    case ValueType::Kind::Arrow:
      return ValueType::arrow(precisify(t.dom()),
                              chance(70) ? precisify(t.eff()) : t.eff(),
                              precisify(t.cod()));
    default: return t;
  }
}

ValueType CoreGen::imprecisify(const ValueType& t) {
  switch (t.kind()) {
    case ValueType::Kind::Queue: return ValueType::queue(imprecisify(t.elem()));
    case ValueType::Kind::Arrow:
      return ValueType::arrow(imprecisify(t.dom()),
                              chance(60) ? EffectType::dyn() : t.eff(),
                              imprecisify(t.cod()));
    default: return t;
  }
}

EffectType CoreGen::sub_effect(const EffectType& eff) {
  // ∅ is not below ? in ≤, so latent effects under ? stay ?.
  if (eff.is_dyn()) return eff;
  OpMap ops;
  for (const auto& [name, s] : eff.ops())
    if (chance(60)) ops.emplace(name, s);
  return EffectType::concrete(std::move(ops));
}

TermPtr CoreGen::value(const ValueType& t, int depth) {
  return value_in({}, t, depth);
}

TermPtr CoreGen::value_in(const TypeEnv& env, const ValueType& t, int depth) {
  switch (t.kind()) {
    case ValueType::Kind::Bool: return core::boolean(chance(50));
    case ValueType::Kind::Unit: return core::unit();
    case ValueType::Kind::Str: {
      static const char* const words[] = {"", "a", "b", "cd"};
      return core::str(words[pick(4)]);
    }
    case ValueType::Kind::Queue: return core::empty_queue(t.elem());
    case ValueType::Kind::Arrow: {
      if (opt_.cast_weight > 0 && depth > 0 && chance(15)) {
        ValueType p = precisify(t);
        if (!(p == t))
          return core::val_up(p, t, value_in(env, p, depth - 1));
      }
      const std::string x = fresh("v");
      return core::lambda(x, t.dom(), t.eff(), t.cod(),
                          term(extend(env, x, t.dom()), t.cod(), t.eff(),
                               depth - 1));
    }
  }
  return core::unit();
}

TermPtr CoreGen::raise_at(const TypeEnv& env, const ValueType& t,
                          const EffectType& eff, int depth) {
  std::vector<std::string> ops;
  for (const std::string& op : effect_names(eff, sig_)) {
    const OpSig s = *lookup_op(eff, sig_, op);
    if (eff.is_dyn() ? erase(t) == s.resp : t == s.resp) ops.push_back(op);
  }
  if (ops.empty()) return nullptr;
  const std::string& op = ops[pick(static_cast<int>(ops.size()))];
  const OpSig s = *lookup_op(eff, sig_, op);
  TermPtr payload;
  if (eff.is_dyn() && chance(50)) {
    const ValueType& precise = local_.at(op).req;
    payload = core::val_up(precise, s.req, term(env, precise, eff, depth - 1));
  } else {
    payload = term(env, s.req, eff, depth - 1);
  }
  TermPtr r = core::raise(op, s.req, s.resp, std::move(payload));
  return t == s.resp ? r : core::val_down(t, s.resp, std::move(r));
}

TermPtr CoreGen::handle_at(const TypeEnv& env, const ValueType& t,
                           const EffectType& eff, int depth) {
  node::Handle h;
  h.kind = chance(30) ? HandlerKind::Shallow : HandlerKind::Deep;
  const ValueType b = type(1);
  OpMap handled;
  if (eff.is_dyn()) {
    h.scrut_eff = eff;
    for (const auto& op : ops_)
      if (chance(60)) handled.emplace(op, *sig_.find(op));
  } else {
    OpMap scrut = sub_effect(eff).ops();
    for (const auto& [op, s] : local_) {
      if (chance(50)) {
        handled.emplace(op, s);
        scrut.emplace(op, s);
      }
    }
    h.scrut_eff = EffectType::concrete(std::move(scrut));
  }
  h.scrut_type = b;
  h.result_eff = eff;
  h.result_type = t;
  h.scrutinee = term(env, b, h.scrut_eff, depth - 1);
  h.ret_var = fresh("v");
  h.ret_body = term(extend(env, h.ret_var, b), t, eff, depth - 1);
  // A shallow continuation may only be resumed when its effect fits here.
  const bool resumable =
      h.kind == HandlerKind::Deep ||
      (eff.is_dyn() ? h.scrut_eff.is_dyn() : subtype(h.scrut_eff, eff));
  for (const auto& [op, s] : handled) {
    node::Clause c;
    c.op = op;
    c.payload = fresh("p");
    c.cont = fresh("k");
    c.req = s.req;
    c.resp = s.resp;
    const ValueType k = h.kind == HandlerKind::Deep
                            ? ValueType::arrow(s.resp, eff, t)
                            : ValueType::arrow(s.resp, h.scrut_eff, b);
    TypeEnv inner = extend(extend(env, c.payload, s.req), c.cont, k);
    if (resumable && chance(70)) {
      TermPtr resumed =
          core::app(core::var(c.cont), term(inner, s.resp, eff, depth - 1));
      if (h.kind == HandlerKind::Deep) {
        c.body = resumed;
      } else {
        const std::string y = fresh("v");
        c.body = core::let(y, resumed,
                           term(extend(inner, y, b), t, eff, depth - 1));
      }
    } else {
      c.body = term(inner, t, eff, depth - 1);
    }
    h.clauses.push_back(std::move(c));
  }
  return core::handle(std::move(h));
}

TermPtr CoreGen::term(const TypeEnv& env, const ValueType& t,
                      const EffectType& eff, int depth) {
  auto leaf = [&]() -> TermPtr {
    auto vs = vars_of(env, t);
    if (!vs.empty() && chance(60))
      return core::var(vs[pick(static_cast<int>(vs.size()))].first);
    return value_in(env, t, std::min(depth, 1));
  };
  if (depth <= 0) return leaf();
  if (pick(10) < opt_.raise_weight) {
    if (TermPtr r = raise_at(env, t, eff, depth)) return r;
  }
  for (;;) {
    switch (pick(16)) {
      case 0:
      case 1:
        return leaf();
      case 2:
        return core::if_(term(env, ValueType::boolean(), eff, depth - 1),
                         term(env, t, eff, depth - 1),
                         term(env, t, eff, depth - 1));
      case 3: {
        const ValueType b = type(1);
        const std::string x = fresh("v");
        TermPtr bound = term(env, b, eff, depth - 1);
        return core::let(x, bound, term(extend(env, x, b), t, eff, depth - 1));
      }
      case 4:
      case 5: {
        const ValueType b = type(1);
        const ValueType f = ValueType::arrow(b, sub_effect(eff), t);
        TermPtr fn = term(env, f, eff, depth - 1);
        return core::app(fn, term(env, b, eff, depth - 1));
      }
      case 6:
      case 7:
        if (TermPtr r = raise_at(env, t, eff, depth)) return r;
        break;
      case 8:
      case 9:
        return handle_at(env, t, eff, depth);
      case 10: {
        if (pick(4) >= opt_.cast_weight) break;
        if (chance(50)) {
          ValueType p = precisify(t);
          if (p == t) break;
          return core::val_up(p, t, term(env, p, eff, depth - 1));
        }
        ValueType i = imprecisify(t);
        if (i == t) break;
        return core::val_down(t, i, term(env, i, eff, depth - 1));
      }
      case 11: {
        if (pick(4) >= opt_.cast_weight) break;
        if (eff.is_dyn()) {
          EffectType p = precisify(eff);
          return core::eff_up(p, eff, term(env, t, p, depth - 1));
        }
        if (chance(50))
          return core::eff_up(eff, eff, term(env, t, eff, depth - 1));
        return core::eff_down(eff, EffectType::dyn(),
                              term(env, t, EffectType::dyn(), depth - 1));
      }
      case 12:
        if (pick(20) >= opt_.error_weight) break;
        // ℧ has no synthesized type; a sibling branch supplies it.
        if (chance(50))
          return core::if_(term(env, ValueType::boolean(), eff, depth - 1),
                           core::err(), term(env, t, eff, depth - 1));
        return core::if_(term(env, ValueType::boolean(), eff, depth - 1),
                         term(env, t, eff, depth - 1), core::err());
      case 13: {
        // A self-call that terminates after one unfolding.
        const EffectType latent = sub_effect(eff);
        const ValueType ft =
            ValueType::arrow(ValueType::boolean(), latent, t);
        const std::string f = fresh("f"), x = fresh("v");
        TermPtr body = core::lambda(
            x, ValueType::boolean(), latent, t,
            core::if_(core::var(x),
                      term(extend(env, x, ValueType::boolean()), t, latent,
                           depth - 1),
                      core::app(core::var(f), core::boolean(true))));
        return core::app(core::fix(f, ft, body), core::boolean(chance(50)));
      }
      case 14: {
        const ValueType b = type(0);
        const std::string hd = fresh("v"), tl = fresh("v");
        TermPtr q = term(env, ValueType::queue(b), eff, depth - 1);
        TypeEnv inner = extend(extend(env, hd, b), tl, ValueType::queue(b));
        return core::case_queue(q, term(env, t, eff, depth - 1), hd, tl,
                                term(inner, t, eff, depth - 1));
      }
      case 15:
        if (t.is(ValueType::Kind::Queue)) {
          return core::enqueue(term(env, t, eff, depth - 1),
                               term(env, t.elem(), eff, depth - 1));
        }
        if (t.is(ValueType::Kind::Str)) {
          return core::concat(term(env, t, eff, depth - 1),
                              term(env, t, eff, depth - 1));
        }
        break;
    }
  }
}

CoreProgram generate_core_program(std::uint64_t seed, GenOptions options) {
  CoreGen g(seed, options);
  CoreProgram p;
  p.type = ValueType::boolean();
  p.eff = EffectType::empty();
  p.term = g.term({}, p.type, p.eff, options.depth);
  p.sig = g.sig();
  return p;
}

}  // namespace greff::conformance
