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

#include <functional>

#include <fmt/format.h>

#include "greff/conformance.hpp"
#include "greff/elaborate.hpp"
#include "greff/error.hpp"

namespace greff::conformance {
namespace {

using surface::Decl;
using surface::Effect;
using surface::Type;
using surface::TypePtr;
using STerm = surface::Term;
using STermPtr = surface::TermPtr;

// Rebuilds a program with every effect annotation passed through `edit`.
class EffectEditor {
 public:
  using Edit = std::function<Effect(const Effect&, const std::string&, SourcePos)>;

  explicit EffectEditor(Edit edit) : edit_(std::move(edit)) {}

  surface::Program program(const surface::Program& p) {
    surface::Program out = p;
    for (auto& m : out.modules) {
      for (auto& d : m.decls) d = decl(d, m.name);
    }
    for (auto& d : out.main_decls) d = decl(d, "main");
    where_ = "main term";
    if (p.main_term) out.main_term = term(p.main_term);
    return out;
  }

 private:
  Decl decl(const Decl& d, const std::string& module) {
    Decl out = d;
    where_ = fmt::format("{} {}", module, d.local.empty() ? d.name : d.local);
    if (out.req) out.req = type(out.req);
    if (out.resp) out.resp = type(out.resp);
    if (out.type) out.type = type(out.type);
    if (out.body) out.body = term(out.body);
    return out;
  }

  TypePtr type(const TypePtr& t) {
    switch (t->kind) {
      case Type::Kind::Queue: return Type::queue(type(t->a), t->pos);
      case Type::Kind::Arrow: {
        TypePtr dom = type(t->a);
        Effect eff = edit_(t->eff, where_, t->pos);
        return Type::arrow(dom, std::move(eff), type(t->b), t->pos);
      }
      default: return t;
    }
  }

  STermPtr term(const STermPtr& t) {
    STerm out = *t;
    if (out.type) out.type = type(out.type);
    if (out.kind == STerm::Kind::AscribeEff || out.kind == STerm::Kind::Handle)
      out.eff = edit_(out.eff, where_, out.pos);
    for (auto& k : out.kids) k = term(k);
    for (auto& c : out.clauses) c.body = term(c.body);
    return surface::make_term(std::move(out));
  }

  Edit edit_;
  std::string where_;
};

bool prec(const Effect& a, const Effect& b) { return b.dynamic || a == b; }

bool prec(const TypePtr& a, const TypePtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Type::Kind::Queue: return prec(a->a, b->a);
    case Type::Kind::Arrow:
      return prec(a->a, b->a) && prec(a->eff, b->eff) && prec(a->b, b->b);
    default: return true;
  }
}

bool prec(const STermPtr& a, const STermPtr& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind || a->name != b->name || a->shallow != b->shallow ||
      a->ret_var != b->ret_var || a->head != b->head || a->tail != b->tail ||
      a->kids.size() != b->kids.size() || a->clauses.size() != b->clauses.size())
    return false;
  if (!prec(a->type, b->type) || !prec(a->eff, b->eff)) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!prec(a->kids[i], b->kids[i])) return false;
  for (std::size_t i = 0; i < a->clauses.size(); ++i) {
    const auto& x = a->clauses[i];
    const auto& y = b->clauses[i];
    if (x.op != y.op || x.payload != y.payload || x.cont != y.cont ||
        !prec(x.body, y.body))
      return false;
  }
  return true;
}

bool prec(const Decl& a, const Decl& b) {
  return a.kind == b.kind && a.module == b.module && a.name == b.name &&
         a.local == b.local && prec(a.req, b.req) && prec(a.resp, b.resp) &&
         prec(a.type, b.type) && prec(a.body, b.body);
}

bool prec(const std::vector<Decl>& a, const std::vector<Decl>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!prec(a[i], b[i])) return false;
  return true;
}

}  // namespace

bool syntactic_precision(const surface::Program& p, const surface::Program& q) {
  if (p.modules.size() != q.modules.size()) return false;
  for (std::size_t i = 0; i < p.modules.size(); ++i) {
    if (p.modules[i].name != q.modules[i].name ||
        !prec(p.modules[i].decls, q.modules[i].decls))
      return false;
  }
  return prec(p.main_decls, q.main_decls) && prec(p.main_term, q.main_term);
}

PrecisionPair imprecisify(const surface::Program& p, std::uint64_t seed) {
  // Only annotations that are not already ? can be loosened.
  std::size_t sites = 0;
  EffectEditor([&](const Effect& e, const std::string&, SourcePos) {
    if (!e.dynamic) ++sites;
    return e;
  }).program(p);
  if (sites == 0) {
    throw GreffError(ErrorKind::PreconditionViolated,
                     "program has no effect annotation to loosen");
  }
  Rng rng(seed);
  std::vector<bool> chosen(sites);
  const int percent = std::uniform_int_distribution<int>(10, 60)(rng);
  bool any = false;
  for (std::size_t i = 0; i < sites; ++i) {
    chosen[i] = std::uniform_int_distribution<int>(0, 99)(rng) < percent;
    any = any || chosen[i];
  }
  if (!any) chosen[std::uniform_int_distribution<std::size_t>(0, sites - 1)(rng)] = true;

  PrecisionPair pair;
  pair.precise = p;
  std::size_t index = 0;
  pair.imprecise = EffectEditor([&](const Effect& e, const std::string& where,
                                    SourcePos pos) {
    if (e.dynamic) return e;
    if (!chosen[index++]) return e;
    pair.witness.push_back({where, pos});
    return Effect::dyn();
  }).program(p);
  return pair;
}

OrderVerdict check_graduality_pair(const PrecisionPair& pair, std::size_t fuel,
                                   const Harness& h) {
  OrderVerdict v;
  Elaboration precise;
  try {
    precise = elab_program(pair.precise);
  } catch (const GreffError& e) {
    v.reason = std::string("precise side is ill typed: ") + e.what();
    return v;
  }
  Elaboration imprecise;
  try {
    imprecise = elab_program(pair.imprecise);
  } catch (const GreffError& e) {
    v.kind = OrderVerdict::Kind::Violated;
    v.reason = std::string("static: imprecise side is ill typed: ") + e.what();
    return v;
  }
  if (!(precise.sig == imprecise.sig)) {
    v.kind = OrderVerdict::Kind::Violated;
    v.reason = "signatures differ";
    return v;
  }
  TermPtr left = observe(precise.sig, precise.type, precise.eff, precise.term, h);
  TermPtr right =
      observe(imprecise.sig, imprecise.type, imprecise.eff, imprecise.term, h);
  return semantic_order(precise.sig, left, right, fuel);
}

}  // namespace greff::conformance
