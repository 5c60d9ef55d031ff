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

#include "greff/types.hpp"

#include <fmt/format.h>

#include <utility>

#include "greff/error.hpp"

namespace greff {

struct ValueType::Node {
  Kind kind;
  ValueType a;  // queue element or arrow domain
  EffectType eff;
  ValueType b;  // arrow codomain

  explicit Node(Kind k) : kind(k), a(nullptr), b(nullptr) {}
};

ValueType::ValueType(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

ValueType::ValueType() : ValueType(boolean()) {}

ValueType ValueType::boolean() {
  static const auto node = std::make_shared<const Node>(Kind::Bool);
  return ValueType(node);
}

ValueType ValueType::unit() {
  static const auto node = std::make_shared<const Node>(Kind::Unit);
  return ValueType(node);
}

ValueType ValueType::str() {
  static const auto node = std::make_shared<const Node>(Kind::Str);
  return ValueType(node);
}

ValueType ValueType::queue(ValueType elem) {
  auto node = std::make_shared<Node>(Kind::Queue);
  node->a = std::move(elem);
  return ValueType(std::move(node));
}

ValueType ValueType::arrow(ValueType dom, EffectType eff, ValueType cod) {
  auto node = std::make_shared<Node>(Kind::Arrow);
  node->a = std::move(dom);
  node->eff = std::move(eff);
  node->b = std::move(cod);
  return ValueType(std::move(node));
}

ValueType::Kind ValueType::kind() const { return node_->kind; }
const ValueType& ValueType::elem() const { return node_->a; }
const ValueType& ValueType::dom() const { return node_->a; }
const EffectType& ValueType::eff() const { return node_->eff; }
const ValueType& ValueType::cod() const { return node_->b; }

bool operator==(const ValueType& x, const ValueType& y) {
  if (x.node_ == y.node_) return true;
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case ValueType::Kind::Bool:
    case ValueType::Kind::Unit:
    case ValueType::Kind::Str:
      return true;
    case ValueType::Kind::Queue:
      return x.elem() == y.elem();
    case ValueType::Kind::Arrow:
      return x.dom() == y.dom() && x.eff() == y.eff() && x.cod() == y.cod();
  }
  return false;
}

EffectType EffectType::dyn() {
  EffectType e;
  e.dyn_ = true;
  return e;
}

EffectType EffectType::concrete(OpMap ops) {
  EffectType e;
  e.ops_ = std::move(ops);
  return e;
}

bool EffectType::has(const std::string& op) const {
  return !dyn_ && ops_.count(op) != 0;
}

bool Signature::declare(const std::string& name, OpSig sig) {
  return ops_.emplace(name, std::move(sig)).second;
}

const OpSig* Signature::find(const std::string& name) const {
  auto it = ops_.find(name);
  return it == ops_.end() ? nullptr : &it->second;
}

std::optional<OpSig> lookup_op(const EffectType& eff, const Signature& sig,
                               const std::string& op) {
  if (eff.is_dyn()) {
    if (const OpSig* s = sig.find(op)) return *s;
    return std::nullopt;
  }
  auto it = eff.ops().find(op);
  if (it == eff.ops().end()) return std::nullopt;
  return it->second;
}

bool effect_mentions(const EffectType& eff, const Signature& sig,
                     const std::string& op) {
  return eff.is_dyn() ? sig.contains(op) : eff.has(op);
}

std::vector<std::string> effect_names(const EffectType& eff,
                                      const Signature& sig) {
  const OpMap& ops = eff.is_dyn() ? sig.ops() : eff.ops();
  std::vector<std::string> names;
  names.reserve(ops.size());
  for (const auto& [name, _] : ops) names.push_back(name);
  return names;
}

ValueType erase(const ValueType& t) {
  switch (t.kind()) {
    case ValueType::Kind::Bool:
    case ValueType::Kind::Unit:
    case ValueType::Kind::Str:
      return t;
    case ValueType::Kind::Queue:
      return ValueType::queue(erase(t.elem()));
    case ValueType::Kind::Arrow:
      return ValueType::arrow(erase(t.dom()), EffectType::dyn(),
                              erase(t.cod()));
  }
  return t;
}

OpSig erase(const OpSig& s) { return {erase(s.req), erase(s.resp)}; }

bool non_tracking(const ValueType& t) {
  switch (t.kind()) {
    case ValueType::Kind::Queue:
      return non_tracking(t.elem());
    case ValueType::Kind::Arrow:
      return t.eff().is_dyn() && non_tracking(t.dom()) && non_tracking(t.cod());
    default:
      return true;
  }
}

namespace {

// Shared shape for ≤ and ≲; `gradual` adds the two axioms for ?.
bool sub_value(const ValueType& a, const ValueType& b, bool gradual);

bool sub_effect(const EffectType& a, const EffectType& b, bool gradual) {
  if (a.is_dyn() || b.is_dyn()) {
    return gradual || (a.is_dyn() && b.is_dyn());
  }
  for (const auto& [name, s] : a.ops()) {
    auto it = b.ops().find(name);
    if (it == b.ops().end()) return false;
    if (!sub_value(s.req, it->second.req, gradual)) return false;
    if (!sub_value(it->second.resp, s.resp, gradual)) return false;
  }
  return true;
}

bool sub_value(const ValueType& a, const ValueType& b, bool gradual) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ValueType::Kind::Bool:
    case ValueType::Kind::Unit:
    case ValueType::Kind::Str:
      return true;
    case ValueType::Kind::Queue:
      return sub_value(a.elem(), b.elem(), gradual);
    case ValueType::Kind::Arrow:
      return sub_value(b.dom(), a.dom(), gradual) &&
             sub_effect(a.eff(), b.eff(), gradual) &&
             sub_value(a.cod(), b.cod(), gradual);
  }
  return false;
}

}  // namespace

bool subtype(const ValueType& a, const ValueType& b) {
  return sub_value(a, b, false);
}
bool subtype(const EffectType& a, const EffectType& b) {
  return sub_effect(a, b, false);
}
bool gradual_subtype(const ValueType& a, const ValueType& b) {
  return sub_value(a, b, true);
}
bool gradual_subtype(const EffectType& a, const EffectType& b) {
  return sub_effect(a, b, true);
}
bool compatible(const ValueType& a, const ValueType& b) {
  return gradual_subtype(a, b) && gradual_subtype(b, a);
}
bool compatible(const EffectType& a, const EffectType& b) {
  return gradual_subtype(a, b) && gradual_subtype(b, a);
}

bool precision(const EffectType& a, const EffectType& b) {
  if (b.is_dyn()) return true;
  if (a.is_dyn()) return false;
  if (a.ops().size() != b.ops().size()) return false;
  auto it = b.ops().begin();
  for (const auto& [name, s] : a.ops()) {
    if (it->first != name) return false;
    if (!precision(s.req, it->second.req)) return false;
    if (!precision(s.resp, it->second.resp)) return false;
    ++it;
  }
  return true;
}

bool precision(const ValueType& a, const ValueType& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ValueType::Kind::Bool:
    case ValueType::Kind::Unit:
    case ValueType::Kind::Str:
      return true;
    case ValueType::Kind::Queue:
      return precision(a.elem(), b.elem());
    case ValueType::Kind::Arrow:
      return precision(a.dom(), b.dom()) && precision(a.eff(), b.eff()) &&
             precision(a.cod(), b.cod());
  }
  return false;
}

namespace {

[[noreturn]] void join_undefined(const std::string& a, const std::string& b) {
  throw GreffError(ErrorKind::JoinUndefined,
                   fmt::format("no gradual join/meet of {} and {}", a, b));
}

ValueType gjoin(const ValueType& a, const ValueType& b, bool join);

EffectType gjoin(const EffectType& a, const EffectType& b, bool join) {
  // ? absorbs on both sides.
  if (a.is_dyn() || b.is_dyn()) return EffectType::dyn();
  OpMap out;
  for (const auto& [name, s] : a.ops()) {
    auto it = b.ops().find(name);
    if (it == b.ops().end()) {
      if (join) out.emplace(name, s);
      continue;
    }
    out.emplace(name, OpSig{gjoin(s.req, it->second.req, join),
                            gjoin(s.resp, it->second.resp, !join)});
  }
  if (join) {
    for (const auto& [name, s] : b.ops()) {
      if (!a.ops().count(name)) out.emplace(name, s);
    }
  }
  return EffectType::concrete(std::move(out));
}

ValueType gjoin(const ValueType& a, const ValueType& b, bool join) {
  if (a.kind() != b.kind()) join_undefined(to_string(a), to_string(b));
  switch (a.kind()) {
    case ValueType::Kind::Bool:
    case ValueType::Kind::Unit:
    case ValueType::Kind::Str:
      return a;
    case ValueType::Kind::Queue:
      return ValueType::queue(gjoin(a.elem(), b.elem(), join));
    case ValueType::Kind::Arrow:
      return ValueType::arrow(gjoin(a.dom(), b.dom(), !join),
                              gjoin(a.eff(), b.eff(), join),
                              gjoin(a.cod(), b.cod(), join));
  }
  join_undefined(to_string(a), to_string(b));
}

std::optional<ValueType> lub(const ValueType& a, const ValueType& b, bool up);

std::optional<EffectType> lub(const EffectType& a, const EffectType& b,
                              bool up) {
  if (a.is_dyn() || b.is_dyn()) {
    if (a.is_dyn() && b.is_dyn()) return EffectType::dyn();
    return std::nullopt;
  }
  OpMap out;
  for (const auto& [name, s] : a.ops()) {
    auto it = b.ops().find(name);
    if (it == b.ops().end()) {
      if (up) out.emplace(name, s);
      continue;
    }
    auto req = lub(s.req, it->second.req, up);
    auto resp = lub(s.resp, it->second.resp, !up);
    if (!req || !resp) {
      // An upper bound must keep the name; a lower bound may drop it.
      if (up) return std::nullopt;
      continue;
    }
    out.emplace(name, OpSig{*req, *resp});
  }
  if (up) {
    for (const auto& [name, s] : b.ops()) {
      if (!a.ops().count(name)) out.emplace(name, s);
    }
  }
  return EffectType::concrete(std::move(out));
}

std::optional<ValueType> lub(const ValueType& a, const ValueType& b, bool up) {
  if (a.kind() != b.kind()) return std::nullopt;
  switch (a.kind()) {
    case ValueType::Kind::Bool:
    case ValueType::Kind::Unit:
    case ValueType::Kind::Str:
      return a;
    case ValueType::Kind::Queue: {
      auto e = lub(a.elem(), b.elem(), up);
      if (!e) return std::nullopt;
      return ValueType::queue(*e);
    }
    case ValueType::Kind::Arrow: {
      auto d = lub(a.dom(), b.dom(), !up);
      auto e = lub(a.eff(), b.eff(), up);
      auto c = lub(a.cod(), b.cod(), up);
      if (!d || !e || !c) return std::nullopt;
      return ValueType::arrow(*d, *e, *c);
    }
  }
  return std::nullopt;
}

}  // namespace

ValueType gradual_join(const ValueType& a, const ValueType& b) {
  return gjoin(a, b, true);
}
ValueType gradual_meet(const ValueType& a, const ValueType& b) {
  return gjoin(a, b, false);
}
EffectType gradual_join(const EffectType& a, const EffectType& b) {
  return gjoin(a, b, true);
}
EffectType gradual_meet(const EffectType& a, const EffectType& b) {
  return gjoin(a, b, false);
}

std::optional<ValueType> subtype_join(const ValueType& a, const ValueType& b) {
  return lub(a, b, true);
}
std::optional<ValueType> subtype_meet(const ValueType& a, const ValueType& b) {
  return lub(a, b, false);
}
std::optional<EffectType> subtype_join(const EffectType& a,
                                       const EffectType& b) {
  return lub(a, b, true);
}
std::optional<EffectType> subtype_meet(const EffectType& a,
                                       const EffectType& b) {
  return lub(a, b, false);
}

namespace {

std::string atom_string(const ValueType& t) {
  if (t.is_arrow() || t.is(ValueType::Kind::Queue)) {
    return "(" + to_string(t) + ")";
  }
  return to_string(t);
}

}  // namespace

std::string to_string(const OpSig& s) {
  return atom_string(s.req) + "~>" + atom_string(s.resp);
}

std::string to_string(const EffectType& e) {
  if (e.is_dyn()) return "?";
  std::string out = "{";
  bool first = true;
  for (const auto& [name, s] : e.ops()) {
    if (!first) out += ", ";
    first = false;
    out += name + "@" + to_string(s);
  }
  return out + "}";
}

std::string to_string(const ValueType& t) {
  switch (t.kind()) {
    case ValueType::Kind::Bool: return "bool";
    case ValueType::Kind::Unit: return "1";
    case ValueType::Kind::Str: return "str";
    case ValueType::Kind::Queue: return "Queue " + atom_string(t.elem());
    case ValueType::Kind::Arrow:
      return atom_string(t.dom()) + " -[" + to_string(t.eff()) + "]> " +
             to_string(t.cod());
  }
  return "?";
}

}  // namespace greff
