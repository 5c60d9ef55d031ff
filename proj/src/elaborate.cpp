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

#include "greff/elaborate.hpp"

#include <set>

#include <fmt/format.h>

#include "greff/error.hpp"

namespace greff {

using surface::Decl;
using STerm = surface::Term;
using Kind = surface::Term::Kind;

const OpSig* ModuleContext::effect(const std::string& name) const {
  auto it = effects.find(name);
  return it == effects.end() ? nullptr : &it->second;
}

const ModuleContext::Value* ModuleContext::value(const std::string& name) const {
  auto it = values.find(name);
  return it == values.end() ? nullptr : &it->second;
}

TermPtr oblique_cast(const ValueType& target, const ValueType& source,
                     TermPtr m) {
  if (!gradual_subtype(source, target)) {
    throw GreffError(ErrorKind::CastUnjustified,
                     fmt::format("{} is not a gradual subtype of {}",
                                 to_string(source), to_string(target)));
  }
  return core::val_down(target, erase(target),
                        core::val_up(source, erase(source), std::move(m)));
}

TermPtr oblique_cast(const EffectType& target, const EffectType& source,
                     TermPtr m) {
  if (!gradual_subtype(source, target)) {
    throw GreffError(ErrorKind::CastUnjustified,
                     fmt::format("{} is not a gradual subtype of {}",
                                 to_string(source), to_string(target)));
  }
  return core::eff_down(target, EffectType::dyn(),
                        core::eff_up(source, EffectType::dyn(), std::move(m)));
}

EffectType elab_effect(const ModuleContext& ctx, const surface::Effect& e,
                       SourcePos pos) {
  if (e.dynamic) return EffectType::dyn();
  OpMap ops;
  for (const auto& name : e.names) {
    const OpSig* s = ctx.effect(name);
    if (!s) {
      throw GreffError(ErrorKind::UnknownEffect, "unknown effect " + name, pos);
    }
    ops.emplace(name, *s);
  }
  return EffectType::concrete(std::move(ops));
}

ValueType elab_type(const ModuleContext& ctx, const surface::TypePtr& t) {
  using TK = surface::Type::Kind;
  switch (t->kind) {
    case TK::Bool: return ValueType::boolean();
    case TK::Unit: return ValueType::unit();
    case TK::Str: return ValueType::str();
    case TK::Queue: return ValueType::queue(elab_type(ctx, t->a));
    case TK::Arrow:
      return ValueType::arrow(elab_type(ctx, t->a),
                              elab_effect(ctx, t->eff, t->pos),
                              elab_type(ctx, t->b));
  }
  return ValueType::boolean();
}

EffectType handle_scrutinee_type(const ModuleContext& ctx,
                                 const EffectType& scrutinee,
                                 const EffectType& result,
                                 const std::vector<std::string>& handled,
                                 SourcePos pos) {
  std::set<std::string> hs(handled.begin(), handled.end());
  auto local = [&](const std::string& name) {
    const OpSig* s = ctx.effect(name);
    if (!s) {
      throw GreffError(ErrorKind::UnknownEffect, "unknown effect " + name, pos);
    }
    return *s;
  };
  if (result.is_concrete()) {
    if (scrutinee.is_concrete()) {
      for (const auto& [name, _] : scrutinee.ops()) {
        if (!result.has(name) && !hs.count(name)) {
          throw GreffError(ErrorKind::UnhandledEffect,
                           fmt::format("effect {} is neither handled nor in "
                                       "the result effect {}",
                                       name, to_string(result)),
                           pos);
        }
      }
    }
    OpMap ops = result.ops();
    for (const auto& name : hs) ops[name] = local(name);
    return EffectType::concrete(std::move(ops));
  }
  if (scrutinee.is_dyn()) return EffectType::dyn();
  OpMap ops;
  for (const auto& [name, s] : scrutinee.ops()) {
    if (hs.count(name)) {
      ops.emplace(name, s);
    } else {
      ops.emplace(name, erase(local(name)));
    }
  }
  return EffectType::concrete(std::move(ops));
}

namespace {

class Elaborator {
 public:
  Elaborator(const Signature& sig, const ModuleContext& ctx)
      : sig_(sig), ctx_(ctx) {}

  void set_counter(int c) { counter_ = c; }
  int counter() const { return counter_; }

  TermElaboration term(const STerm& t) {
    switch (t.kind) {
      case Kind::Var: return var(t);
      case Kind::True: return pure(core::boolean(true), ValueType::boolean());
      case Kind::False: return pure(core::boolean(false), ValueType::boolean());
      case Kind::Str: return pure(core::str(t.name), ValueType::str());
      case Kind::Unit: return pure(core::unit(), ValueType::unit());
      case Kind::Empty:
        throw GreffError(ErrorKind::TypeMismatch,
                         "cannot infer the element type of 'empty'; ascribe "
                         "it with a queue type",
                         t.pos);
      case Kind::Lambda: return lambda(t);
      case Kind::App: return app(t);
      case Kind::Let: return let(t.name, *t.kids[0], *t.kids[1], t.pos);
      case Kind::Seq: return let(fresh(), *t.kids[0], *t.kids[1], t.pos);
      case Kind::If: return if_(t);
      case Kind::Raise: return raise(t.name, *t.kids[0], t.pos);
      case Kind::Handle: return handle(t);
      case Kind::AscribeType: return ascribe_type(t);
      case Kind::AscribeEff: {
        TermElaboration m = term(*t.kids[0]);
        EffectType target = elab_effect(ctx_, t.eff, t.pos);
        require_gsub(m.eff, target, t.pos, "ascription");
        return {oblique_cast(target, m.eff, m.term), target, m.type};
      }
      case Kind::Concat: return concat(t);
      case Kind::Enqueue: return enqueue(t);
      case Kind::Match: return match(t);
    }
    throw GreffError(ErrorKind::Syntax, "unknown term form", t.pos);
  }

  // A `define` body; recursion goes through a fixpoint at the annotation.
  TermPtr define(const std::string& name, const std::string& core_name,
                 const ValueType& ann, const STerm& body) {
    const bool recursive = surface::mentions_free(body, name);
    if (recursive && body.kind != Kind::Lambda) {
      throw GreffError(ErrorKind::TypeMismatch,
                       "only functions may be defined recursively", body.pos);
    }
    std::size_t mark = locals_.size();
    if (recursive) locals_.push_back({name, {core_name, ann}});
    TermElaboration v = typed_value(body, ann);
    locals_.resize(mark);
    require_gsub(v.type, ann, body.pos, "definition of " + name);
    TermPtr out = v.type == ann ? v.term : oblique_cast(ann, v.type, v.term);
    if (recursive) out = core::fix(core_name, ann, out);
    return out;
  }

  TermElaboration typed_value(const STerm& body, const ValueType& ann) {
    if (body.kind == Kind::Empty) {
      if (!ann.is(ValueType::Kind::Queue)) {
        throw GreffError(ErrorKind::TypeMismatch,
                         "'empty' needs a queue type, not " + to_string(ann),
                         body.pos);
      }
      return pure(core::empty_queue(ann.elem()), ann);
    }
    return term(body);
  }

 private:
  struct Local {
    std::string name;
    ModuleContext::Value value;
  };

  static TermElaboration pure(TermPtr t, ValueType a) {
    return {std::move(t), EffectType::empty(), std::move(a)};
  }

  std::string fresh() { return "%" + std::to_string(++counter_); }

  const ModuleContext::Value* lookup(const std::string& name) const {
    for (auto it = locals_.rbegin(); it != locals_.rend(); ++it) {
      if (it->name == name) return &it->value;
    }
    return ctx_.value(name);
  }

  void bind(const std::string& name, const ValueType& a) {
    locals_.push_back({name, {name, a}});
  }

  void require_gsub(const ValueType& from, const ValueType& to, SourcePos pos,
                    const std::string& where) {
    if (!gradual_subtype(from, to)) {
      throw GreffError(ErrorKind::TypeMismatch,
                       fmt::format("{}: {} is not a gradual subtype of {}",
                                   where, to_string(from), to_string(to)),
                       pos);
    }
  }

  void require_gsub(const EffectType& from, const EffectType& to,
                    SourcePos pos, const std::string& where) {
    if (!gradual_subtype(from, to)) {
      throw GreffError(ErrorKind::TypeMismatch,
                       fmt::format("{}: effect {} is not a gradual subtype of {}",
                                   where, to_string(from), to_string(to)),
                       pos);
    }
  }

  EffectType join(const EffectType& a, const EffectType& b, SourcePos pos) {
    try {
      return gradual_join(a, b);
    } catch (const GreffError& e) {
      throw GreffError(ErrorKind::TypeMismatch, e.detail(), pos);
    }
  }

  ValueType join(const ValueType& a, const ValueType& b, SourcePos pos) {
    try {
      return gradual_join(a, b);
    } catch (const GreffError& e) {
      throw GreffError(ErrorKind::TypeMismatch, e.detail(), pos);
    }
  }

  TermElaboration var(const STerm& t) {
    if (const ModuleContext::Value* v = lookup(t.name)) {
      return pure(core::var(v->core_name), v->type);
    }
    if (ctx_.effect(t.name)) {
      throw GreffError(ErrorKind::UnknownName,
                       "effect " + t.name + " used as a value", t.pos);
    }
    throw GreffError(ErrorKind::UnknownName, "unknown name " + t.name, t.pos);
  }

  TermElaboration lambda(const STerm& t) {
    ValueType a = elab_type(ctx_, t.type);
    bind(t.name, a);
    TermElaboration body = term(*t.kids[0]);
    locals_.pop_back();
    return pure(core::lambda(t.name, a, body.eff, body.type, body.term),
                ValueType::arrow(a, body.eff, body.type));
  }

  TermElaboration app(const STerm& t) {
    const STerm& f = *t.kids[0];
    if (f.kind == Kind::Var && !lookup(f.name) && ctx_.effect(f.name)) {
      return raise(f.name, *t.kids[1], t.pos);
    }
    TermElaboration m = term(f);
    if (!m.type.is_arrow()) {
      throw GreffError(ErrorKind::TypeMismatch,
                       "applying a non-function of type " + to_string(m.type),
                       t.pos);
    }
    TermElaboration n = term(*t.kids[1]);
    const ValueType& fn = m.type;
    require_gsub(n.type, fn.dom(), t.kids[1]->pos, "argument");
    EffectType eff = join(join(m.eff, n.eff, t.pos), fn.eff(), t.pos);
    TermPtr head = oblique_cast(eff, m.eff, m.term);
    if (!subtype(fn.eff(), eff)) {
      // The latent effect must fit under the application's effect.
      head = oblique_cast(ValueType::arrow(fn.dom(), eff, fn.cod()), fn, head);
    }
    TermPtr arg = oblique_cast(fn.dom(), n.type, oblique_cast(eff, n.eff, n.term));
    return {core::app(head, arg), eff, fn.cod()};
  }

  TermElaboration let(const std::string& x, const STerm& bound, const STerm& body,
                      SourcePos pos) {
    TermElaboration m = term(bound);
    bind(x, m.type);
    TermElaboration n = term(body);
    locals_.pop_back();
    EffectType eff = join(m.eff, n.eff, pos);
    return {core::let(x, oblique_cast(eff, m.eff, m.term),
                      oblique_cast(eff, n.eff, n.term)),
            eff, n.type};
  }

  TermElaboration if_(const STerm& t) {
    TermElaboration c = term(*t.kids[0]);
    if (!c.type.is(ValueType::Kind::Bool)) {
      throw GreffError(ErrorKind::TypeMismatch,
                       "condition has type " + to_string(c.type), t.kids[0]->pos);
    }
    TermElaboration a = term(*t.kids[1]);
    TermElaboration b = term(*t.kids[2]);
    ValueType ty = join(a.type, b.type, t.pos);
    EffectType eff = join(join(c.eff, a.eff, t.pos), b.eff, t.pos);
    require_gsub(a.type, ty, t.kids[1]->pos, "branch");
    require_gsub(b.type, ty, t.kids[2]->pos, "branch");
    return {core::if_(oblique_cast(eff, c.eff, c.term),
                      oblique_cast(eff, a.eff, oblique_cast(ty, a.type, a.term)),
                      oblique_cast(eff, b.eff, oblique_cast(ty, b.type, b.term))),
            eff, ty};
  }

  TermElaboration raise(const std::string& op, const STerm& arg, SourcePos pos) {
    const OpSig* s = ctx_.effect(op);
    if (!s) throw GreffError(ErrorKind::UnknownEffect, "unknown effect " + op, pos);
    TermElaboration m = term(arg);
    require_gsub(m.type, s->req, arg.pos, "payload of " + op);
    EffectType own = EffectType::concrete(OpMap{{op, *s}});
    EffectType eff = join(m.eff, own, pos);
    std::string x = fresh();
    TermPtr payload = oblique_cast(s->req, m.type, core::var(x));
    TermPtr r = core::raise(op, s->req, s->resp, payload);
    return {core::let(x, oblique_cast(eff, m.eff, m.term),
                      oblique_cast(eff, own, r)),
            eff, s->resp};
  }

  TermElaboration ascribe_type(const STerm& t) {
    ValueType target = elab_type(ctx_, t.type);
    const STerm& inner = *t.kids[0];
    if (inner.kind == Kind::Empty) return typed_value(inner, target);
    TermElaboration m = term(inner);
    require_gsub(m.type, target, t.pos, "ascription");
    return {oblique_cast(target, m.type, m.term), m.eff, target};
  }

  TermElaboration concat(const STerm& t) {
    TermElaboration a = term(*t.kids[0]);
    TermElaboration b = term(*t.kids[1]);
    require_gsub(a.type, ValueType::str(), t.kids[0]->pos, "'++' operand");
    require_gsub(b.type, ValueType::str(), t.kids[1]->pos, "'++' operand");
    EffectType eff = join(a.eff, b.eff, t.pos);
    return {core::concat(oblique_cast(eff, a.eff, a.term),
                         oblique_cast(eff, b.eff, b.term)),
            eff, ValueType::str()};
  }

  TermElaboration enqueue(const STerm& t) {
    const STerm& q = *t.kids[0];
    TermElaboration x = term(*t.kids[1]);
    TermElaboration qe = q.kind == Kind::Empty
                             ? pure(core::empty_queue(x.type),
                                    ValueType::queue(x.type))
                             : term(q);
    if (!qe.type.is(ValueType::Kind::Queue)) {
      throw GreffError(ErrorKind::TypeMismatch,
                       "enqueue onto a non-queue of type " + to_string(qe.type),
                       q.pos);
    }
    const ValueType& elem = qe.type.elem();
    require_gsub(x.type, elem, t.kids[1]->pos, "queued item");
    EffectType eff = join(qe.eff, x.eff, t.pos);
    return {core::enqueue(oblique_cast(eff, qe.eff, qe.term),
                          oblique_cast(elem, x.type,
                                       oblique_cast(eff, x.eff, x.term))),
            eff, qe.type};
  }

  TermElaboration match(const STerm& t) {
    TermElaboration q = term(*t.kids[0]);
    if (!q.type.is(ValueType::Kind::Queue)) {
      throw GreffError(ErrorKind::TypeMismatch,
                       "match on a non-queue of type " + to_string(q.type),
                       t.kids[0]->pos);
    }
    TermElaboration e = term(*t.kids[1]);
    bind(t.head, q.type.elem());
    bind(t.tail, q.type);
    TermElaboration c = term(*t.kids[2]);
    locals_.pop_back();
    locals_.pop_back();
    ValueType ty = join(e.type, c.type, t.pos);
    EffectType eff = join(join(q.eff, e.eff, t.pos), c.eff, t.pos);
    require_gsub(e.type, ty, t.kids[1]->pos, "match branch");
    require_gsub(c.type, ty, t.kids[2]->pos, "match branch");
    return {core::case_queue(
                oblique_cast(eff, q.eff, q.term),
                oblique_cast(eff, e.eff, oblique_cast(ty, e.type, e.term)),
                t.head, t.tail,
                oblique_cast(eff, c.eff, oblique_cast(ty, c.type, c.term))),
            eff, ty};
  }

  TermElaboration handle(const STerm& t) {
    ValueType ty = elab_type(ctx_, t.type);
    EffectType eff = elab_effect(ctx_, t.eff, t.pos);
    TermElaboration m = term(*t.kids[0]);

    std::vector<std::string> handled;
    for (const auto& c : t.clauses) {
      if (!ctx_.effect(c.op)) {
        throw GreffError(ErrorKind::UnknownEffect, "unknown effect " + c.op,
                         c.pos);
      }
      handled.push_back(c.op);
    }
    EffectType scrut = handle_scrutinee_type(ctx_, m.eff, eff, handled, t.pos);
    require_gsub(m.eff, scrut, t.kids[0]->pos, "handled computation");

    bind(t.ret_var, m.type);
    TermElaboration ret = term(*t.kids[1]);
    locals_.pop_back();
    require_gsub(ret.eff, eff, t.kids[1]->pos, "return clause");
    require_gsub(ret.type, ty, t.kids[1]->pos, "return clause");

    node::Handle h;
    h.kind = t.shallow ? HandlerKind::Shallow : HandlerKind::Deep;
    h.scrutinee = oblique_cast(scrut, m.eff, m.term);
    h.ret_var = t.ret_var;
    h.ret_body = oblique_cast(eff, ret.eff, oblique_cast(ty, ret.type, ret.term));
    h.result_eff = eff;
    h.result_type = ty;
    h.scrut_eff = scrut;
    h.scrut_type = m.type;

    for (const auto& c : t.clauses) {
      const OpSig local = *ctx_.effect(c.op);
      ValueType k = t.shallow ? ValueType::arrow(local.resp, scrut, m.type)
                              : ValueType::arrow(local.resp, eff, ty);
      bind(c.payload, local.req);
      bind(c.cont, k);
      TermElaboration n = term(*c.body);
      locals_.pop_back();
      locals_.pop_back();
      require_gsub(n.eff, eff, c.body->pos, "clause for " + c.op);
      require_gsub(n.type, ty, c.body->pos, "clause for " + c.op);
      TermPtr body = oblique_cast(eff, n.eff, oblique_cast(ty, n.type, n.term));

      // A scrutinee left at ? raises at the signature's typing, so the
      // clause receives that and converts to the local view.
      const OpSig* global = sig_.find(c.op);
      if (scrut.is_dyn() && !(*global == local)) {
        std::string x = fresh(), kr = fresh(), y = fresh();
        TermPtr k_local = core::lambda(
            y, local.resp, k.eff(), k.cod(),
            core::app(core::var(kr),
                      oblique_cast(global->resp, local.resp, core::var(y))));
        body = core::let(c.payload,
                         oblique_cast(local.req, global->req, core::var(x)),
                         core::let(c.cont, k_local, body));
        h.clauses.push_back(
            node::Clause{c.op, x, kr, global->req, global->resp, body});
      } else {
        h.clauses.push_back(
            node::Clause{c.op, c.payload, c.cont, local.req, local.resp, body});
      }
    }
    return {core::handle(std::move(h)), eff, ty};
  }

  const Signature& sig_;
  const ModuleContext& ctx_;
  std::vector<Local> locals_;
  int counter_ = 0;
};

class ProgramElaborator {
 public:
  Elaboration run(const surface::Program& source) {
    const surface::Program p = surface::desugar_main(source);
    for (const auto& m : p.modules) {
      ModuleContext ctx = declarations(m.name, m.decls);
      out_.modules.emplace(m.name, std::move(ctx));
    }
    ModuleContext main_ctx = declarations("main", p.main_decls);
    Elaborator e(out_.sig, main_ctx);
    e.set_counter(counter_);
    TermElaboration body = e.term(*p.main_term);
    TermPtr result = body.term;
    for (auto it = bindings_.rbegin(); it != bindings_.rend(); ++it) {
      result = core::let(it->first, it->second, result);
    }
    out_.term = result;
    out_.eff = body.eff;
    out_.type = body.type;
    return std::move(out_);
  }

 private:
  std::string core_name(const std::string& module, const std::string& name) {
    std::string base = module + "." + name;
    int n = ++uses_[base];
    return n == 1 ? base : base + "#" + std::to_string(n);
  }

  ModuleContext declarations(const std::string& module,
                             const std::vector<Decl>& decls) {
    ModuleContext ctx;
    for (const Decl& d : decls) {
      switch (d.kind) {
        case Decl::Kind::NewEffect: {
          if (ctx.effect(d.name)) {
            throw GreffError(ErrorKind::DuplicateEffect,
                             "effect " + d.name + " already declared here",
                             d.pos);
          }
          OpSig local{elab_type(ctx, d.req), elab_type(ctx, d.resp)};
          if (!out_.sig.declare(d.name, erase(local))) {
            throw GreffError(ErrorKind::DuplicateEffect,
                             "effect " + d.name + " is already declared",
                             d.pos);
          }
          ctx.effects.emplace(d.name, local);
          break;
        }
        case Decl::Kind::ImportEffect: {
          const OpSig& theirs = exported_effect(d);
          if (ctx.effect(d.name)) {
            throw GreffError(ErrorKind::DuplicateEffect,
                             "effect " + d.name + " already declared here",
                             d.pos);
          }
          OpSig local{elab_type(ctx, d.req), elab_type(ctx, d.resp)};
          if (!compatible(local.req, theirs.req) ||
              !compatible(local.resp, theirs.resp)) {
            throw GreffError(
                ErrorKind::IncompatibleEffectImport,
                fmt::format("{}.{} is declared {} but imported as {}", d.module,
                            d.name, to_string(theirs), to_string(local)),
                d.pos);
          }
          ctx.effects.emplace(d.name, local);
          break;
        }
        case Decl::Kind::ImportValue: {
          const ModuleContext::Value& theirs = exported_value(d);
          ValueType a = elab_type(ctx, d.type);
          if (!gradual_subtype(theirs.type, a)) {
            throw GreffError(
                ErrorKind::IncompatibleValueImport,
                fmt::format("{}.{} has type {} which is not a gradual "
                            "subtype of {}",
                            d.module, d.name, to_string(theirs.type),
                            to_string(a)),
                d.pos);
          }
          std::string name = core_name(module, d.local);
          bindings_.emplace_back(
              name, oblique_cast(a, theirs.type, core::var(theirs.core_name)));
          ctx.values[d.local] = {name, a};
          break;
        }
        case Decl::Kind::DefineValue: {
          if (!surface::is_value_form(*d.body)) {
            throw GreffError(ErrorKind::TypeMismatch,
                             "definition of " + d.name + " is not a value",
                             d.pos);
          }
          ValueType a = elab_type(ctx, d.type);
          std::string name = core_name(module, d.name);
          Elaborator e(out_.sig, ctx);
          e.set_counter(counter_);
          TermPtr v = e.define(d.name, name, a, *d.body);
          counter_ = e.counter();
          bindings_.emplace_back(name, v);
          ctx.values[d.name] = {name, a};
          break;
        }
      }
    }
    return ctx;
  }

  const ModuleContext& exporter(const Decl& d) {
    auto it = out_.modules.find(d.module);
    if (it == out_.modules.end()) {
      throw GreffError(ErrorKind::UnknownModule, "unknown module " + d.module,
                       d.pos);
    }
    return it->second;
  }

  const OpSig& exported_effect(const Decl& d) {
    const OpSig* s = exporter(d).effect(d.name);
    if (!s) {
      throw GreffError(ErrorKind::UnknownName,
                       fmt::format("module {} has no effect {}", d.module, d.name),
                       d.pos);
    }
    return *s;
  }

  const ModuleContext::Value& exported_value(const Decl& d) {
    const ModuleContext::Value* v = exporter(d).value(d.name);
    if (!v) {
      throw GreffError(ErrorKind::UnknownName,
                       fmt::format("module {} has no value {}", d.module, d.name),
                       d.pos);
    }
    return *v;
  }

  Elaboration out_;
  std::vector<std::pair<std::string, TermPtr>> bindings_;
  std::map<std::string, int> uses_;
  int counter_ = 0;
};

}  // namespace

Elaboration elab_program(const surface::Program& program) {
  return ProgramElaborator().run(program);
}

TermElaboration elab_term(const Signature& sig, const ModuleContext& ctx,
                          const surface::TermPtr& term) {
  return Elaborator(sig, ctx).term(*term);
}

}  // namespace greff
