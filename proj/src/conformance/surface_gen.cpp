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
#include <map>

#include <fmt/format.h>

#include "greff/conformance.hpp"

namespace greff::conformance {
namespace {

using surface::Decl;
using surface::Effect;
using surface::Type;
using surface::TypePtr;
using STerm = surface::Term;
using STermPtr = surface::TermPtr;
using Kind = surface::Term::Kind;

struct OpTypes {
  TypePtr req, resp;
};

bool same(const TypePtr& a, const TypePtr& b) { return surface::equal(*a, *b); }

Effect join(const Effect& a, const Effect& b) {
  if (a.dynamic || b.dynamic) return Effect::dyn();
  std::vector<std::string> names = a.names;
  names.insert(names.end(), b.names.begin(), b.names.end());
  return Effect::of(std::move(names));
}

bool within(const Effect& e, const Effect& bound) {
  if (bound.dynamic) return true;
  if (e.dynamic) return false;
  return std::includes(bound.names.begin(), bound.names.end(), e.names.begin(),
                       e.names.end());
}

STermPtr node(Kind k, std::vector<STermPtr> kids = {}, std::string name = {}) {
  STerm t;
  t.kind = k;
  t.kids = std::move(kids);
  t.name = std::move(name);
  return surface::make_term(std::move(t));
}

STermPtr ascribe(STermPtr m, const Effect& e) {
  STerm t;
  t.kind = Kind::AscribeEff;
  t.kids = {std::move(m)};
  t.eff = e;
  return surface::make_term(std::move(t));
}

STermPtr ascribe(STermPtr m, TypePtr a) {
  STerm t;
  t.kind = Kind::AscribeType;
  t.kids = {std::move(m)};
  t.type = std::move(a);
  return surface::make_term(std::move(t));
}

class SurfaceGen {
 public:
  using Env = std::vector<std::pair<std::string, TypePtr>>;
  struct Out {
    STermPtr t;
    Effect e;
  };

  explicit SurfaceGen(std::uint64_t seed) : rng_(seed) {}

  int pick(int n) {
    return std::uniform_int_distribution<int>(0, n - 1)(rng_);
  }
  bool chance(int percent) { return pick(100) < percent; }
  std::string fresh(const char* base) { return fmt::format("{}{}", base, ++fresh_); }

  std::map<std::string, OpTypes>& effects() { return effects_; }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& [n, _] : effects_) out.push_back(n);
    return out;
  }

  Effect effect(bool allow_dyn) {
    if (allow_dyn && chance(25)) return Effect::dyn();
    std::vector<std::string> out;
    for (const auto& n : names())
      if (chance(50)) out.push_back(n);
    return Effect::of(std::move(out));
  }

  Effect subset(const Effect& e) {
    if (e.dynamic) return chance(50) ? e : effect(false);
    std::vector<std::string> out;
    for (const auto& n : e.names)
      if (chance(60)) out.push_back(n);
    return Effect::of(std::move(out));
  }

  TypePtr type(int depth) {
    const int r = pick(depth > 0 ? 10 : 6);
    if (r < 3) return Type::boolean();
    if (r < 4) return Type::unit();
    if (r < 6) return Type::str();
    if (r < 7) return Type::queue(type(0));
    return Type::arrow(type(depth - 1), effect(true), type(depth - 1));
  }

  TypePtr imprecise(const TypePtr& t) {
    switch (t->kind) {
      case Type::Kind::Queue: return Type::queue(imprecise(t->a));
      case Type::Kind::Arrow:
        return Type::arrow(imprecise(t->a), chance(50) ? Effect::dyn() : t->eff,
                           imprecise(t->b));
      default: return t;
    }
  }

  STermPtr value(const Env& env, const TypePtr& a, int depth) {
    switch (a->kind) {
      case Type::Kind::Bool: return node(chance(50) ? Kind::True : Kind::False);
      case Type::Kind::Unit: return node(Kind::Unit);
      case Type::Kind::Str: {
        static const char* const words[] = {"", "a", "b", "cd"};
        return node(Kind::Str, {}, words[pick(4)]);
      }
      case Type::Kind::Queue: return ascribe(node(Kind::Empty), a);
      case Type::Kind::Arrow: {
        const std::string x = fresh("x");
        Env inner = env;
        inner.emplace_back(x, a->a);
        Out body = gen(inner, a->b, a->eff, depth - 1);
        STermPtr b = body.e == a->eff ? body.t : ascribe(body.t, a->eff);
        STerm t;
        t.kind = Kind::Lambda;
        t.name = x;
        t.type = a->a;
        t.kids = {b};
        return surface::make_term(std::move(t));
      }
    }
    return node(Kind::Unit);
  }

  Out leaf(const Env& env, const TypePtr& a, int depth) {
    std::vector<std::string> vs;
    for (auto it = env.rbegin(); it != env.rend(); ++it) {
      bool shadowed = false;
      for (auto jt = env.rbegin(); jt != it; ++jt)
        if (jt->first == it->first) shadowed = true;
      if (!shadowed && same(it->second, a)) vs.push_back(it->first);
    }
    if (!vs.empty() && chance(60))
      return {node(Kind::Var, {}, vs[pick(static_cast<int>(vs.size()))]), Effect{}};
    return {value(env, a, std::min(depth, 1)), Effect{}};
  }

  Out gen(const Env& env, const TypePtr& a, const Effect& allowed, int depth) {
    if (depth <= 0) return leaf(env, a, depth);
    for (;;) {
      switch (pick(14)) {
        case 0:
        case 1:
          return leaf(env, a, depth);
        case 2: {
          Out c = gen(env, Type::boolean(), allowed, depth - 1);
          Out x = gen(env, a, allowed, depth - 1);
          Out y = gen(env, a, allowed, depth - 1);
          return {node(Kind::If, {c.t, x.t, y.t}), join(join(c.e, x.e), y.e)};
        }
        case 3: {
          const TypePtr b = type(1);
          const std::string x = fresh("x");
          Out m = gen(env, b, allowed, depth - 1);
          Env inner = env;
          inner.emplace_back(x, b);
          Out n = gen(inner, a, allowed, depth - 1);
          return {node(Kind::Let, {m.t, n.t}, x), join(m.e, n.e)};
        }
        case 4: {
          Out m = gen(env, Type::unit(), allowed, depth - 1);
          Out n = gen(env, a, allowed, depth - 1);
          return {node(Kind::Seq, {m.t, n.t}), join(m.e, n.e)};
        }
        case 5:
        case 6: {
          const TypePtr b = type(1);
          Effect latent = subset(allowed);
          bool recast = false;
          if (!allowed.dynamic && chance(15)) {
            latent = Effect::dyn();
            recast = true;
          }
          Out f = gen(env, Type::arrow(b, latent, a), allowed, depth - 1);
          Out x = gen(env, b, allowed, depth - 1);
          STermPtr arg = chance(20) ? ascribe(x.t, imprecise(b)) : x.t;
          STermPtr app = node(Kind::App, {f.t, arg});
          Effect e = join(join(f.e, x.e), latent);
          if (recast) return {ascribe(app, allowed), allowed};
          return {app, e};
        }
        case 7:
        case 8: {
          std::vector<std::string> ops;
          for (const auto& [op, t] : effects_)
            if (same(t.resp, a) && within(Effect::of({op}), allowed))
              ops.push_back(op);
          if (ops.empty()) break;
          const std::string op = ops[pick(static_cast<int>(ops.size()))];
          Out p = gen(env, effects_.at(op).req, allowed, depth - 1);
          return {node(Kind::Raise, {p.t}, op), join(Effect::of({op}), p.e)};
        }
        case 9:
        case 10:
          return handle(env, a, allowed, depth);
        case 11: {
          Effect inner = subset(allowed);
          Out m = gen(env, a, inner, depth - 1);
          Effect to = allowed.dynamic ? (chance(50) ? Effect::dyn() : join(m.e, inner))
                                      : allowed;
          if (!within(m.e, to)) to = Effect::dyn();
          if (!within(to, allowed)) break;
          return {ascribe(m.t, to), to};
        }
        case 12: {
          const TypePtr b = type(0);
          const std::string h = fresh("x"), t = fresh("x");
          Out q = gen(env, Type::queue(b), allowed, depth - 1);
          Out e = gen(env, a, allowed, depth - 1);
          Env inner = env;
          inner.emplace_back(h, b);
          inner.emplace_back(t, Type::queue(b));
          Out c = gen(inner, a, allowed, depth - 1);
          STerm m;
          m.kind = Kind::Match;
          m.kids = {q.t, e.t, c.t};
          m.head = h;
          m.tail = t;
          return {surface::make_term(std::move(m)), join(join(q.e, e.e), c.e)};
        }
        case 13:
          if (a->kind == Type::Kind::Queue) {
            Out q = gen(env, a, allowed, depth - 1);
            Out x = gen(env, a->a, allowed, depth - 1);
            return {node(Kind::Enqueue, {q.t, x.t}), join(q.e, x.e)};
          }
          if (a->kind == Type::Kind::Str) {
            Out x = gen(env, a, allowed, depth - 1);
            Out y = gen(env, a, allowed, depth - 1);
            return {node(Kind::Concat, {x.t, y.t}), join(x.e, y.e)};
          }
          break;
      }
    }
  }

  Out handle(const Env& env, const TypePtr& a, const Effect& allowed, int depth) {
    const Effect result = subset(allowed);
    std::vector<std::string> handled;
    for (const auto& n : names())
      if (chance(50)) handled.push_back(n);
    const Effect scrut_bound =
        result.dynamic ? result : join(result, Effect::of(handled));
    const TypePtr b = type(1);
    const bool shallow = chance(25);
    Out m = gen(env, b, scrut_bound, depth - 1);
    STerm h;
    h.kind = Kind::Handle;
    h.shallow = shallow;
    h.type = a;
    h.eff = result;
    h.ret_var = fresh("x");
    Env ret_env = env;
    ret_env.emplace_back(h.ret_var, b);
    Out ret = gen(ret_env, a, result, depth - 1);
    h.kids = {m.t, ret.t};
    for (const auto& op : handled) {
      surface::Clause c;
      c.op = op;
      c.payload = fresh("x");
      c.cont = fresh("k");
      const OpTypes& ty = effects_.at(op);
      Env inner = env;
      inner.emplace_back(c.payload, ty.req);
      if (!shallow) {
        inner.emplace_back(c.cont, Type::arrow(ty.resp, result, a));
        if (chance(70)) {
          Out v = gen(inner, ty.resp, result, depth - 1);
          c.body = node(Kind::App, {node(Kind::Var, {}, c.cont), v.t});
        }
      }
      if (!c.body) c.body = gen(inner, a, result, depth - 1).t;
      h.clauses.push_back(std::move(c));
    }
    return {surface::make_term(std::move(h)), result};
  }

 private:
  Rng rng_;
  int fresh_ = 0;
  std::map<std::string, OpTypes> effects_;
};

Decl effect_decl(Decl::Kind k, std::string module, std::string name,
                 const OpTypes& t) {
  Decl d;
  d.kind = k;
  d.module = std::move(module);
  d.name = std::move(name);
  d.req = t.req;
  d.resp = t.resp;
  return d;
}

}  // namespace

surface::Program generate_surface_program(std::uint64_t seed) {
  SurfaceGen g(seed);
  surface::Program p;
  const int depth = 6;
  const bool library = g.pick(5) != 0;
  SurfaceGen::Env main_env;
  std::map<std::string, OpTypes> exported;

  if (library) {
    surface::Module lib;
    lib.name = "Lib";
    static const char* const ops[] = {"ping", "poke"};
    const int n = 1 + g.pick(2);
    for (int i = 0; i < n; ++i) {
      OpTypes t{g.type(1), g.type(1)};
      g.effects().emplace(ops[i], t);
      exported.emplace(ops[i], t);
      lib.decls.push_back(effect_decl(Decl::Kind::NewEffect, {}, ops[i], t));
    }
    SurfaceGen::Env env;
    const int defs = 1 + g.pick(3);
    for (int i = 0; i < defs; ++i) {
      Decl d;
      d.kind = Decl::Kind::DefineValue;
      d.name = fmt::format("f{}", i);
      d.type = Type::arrow(g.type(1), g.effect(true), g.type(1));
      d.body = g.value(env, d.type, depth - 2);
      lib.decls.push_back(d);
      env.emplace_back(d.name, d.type);
    }
    // Main's view of the library.
    for (const auto& [op, t] : exported) {
      OpTypes view = g.chance(30) ? OpTypes{g.imprecise(t.req), g.imprecise(t.resp)} : t;
      p.main_decls.push_back(effect_decl(Decl::Kind::ImportEffect, "Lib", op, view));
      g.effects()[op] = view;
    }
    for (const auto& [name, type] : env) {
      if (!g.chance(80)) continue;
      Decl d;
      d.kind = Decl::Kind::ImportValue;
      d.module = "Lib";
      d.name = name;
      d.local = "g" + name.substr(1);
      d.type = g.chance(30) ? g.imprecise(type) : type;
      p.main_decls.push_back(d);
      main_env.emplace_back(d.local, d.type);
    }
    p.modules.push_back(std::move(lib));
  } else {
    g.effects().clear();
  }
  if (!library || g.chance(40)) {
    OpTypes t{g.type(1), g.type(1)};
    p.main_decls.push_back(effect_decl(Decl::Kind::NewEffect, {}, "note", t));
    g.effects().emplace("note", t);
  }

  const Effect inner = g.chance(20) ? Effect::dyn() : Effect::of(g.names());
  auto body = g.gen(main_env, Type::boolean(), inner, depth - 1);
  STerm h;
  h.kind = Kind::Handle;
  h.type = Type::boolean();
  h.eff = Effect{};
  h.ret_var = "result";
  h.kids = {body.t, node(Kind::Var, {}, "result")};
  for (const auto& [op, t] : g.effects()) {
    surface::Clause c;
    c.op = op;
    c.payload = "req";
    c.cont = "k";
    c.body = node(Kind::App, {node(Kind::Var, {}, "k"), g.value({}, t.resp, 2)});
    h.clauses.push_back(std::move(c));
  }
  p.main_term = surface::make_term(std::move(h));
  return p;
}

}  // namespace greff::conformance
