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

#include "greff/precision.hpp"

#include <fmt/format.h>

#include "greff/error.hpp"

namespace greff {

struct PrecisionDerivation::Node {
  Rule rule;
  ValueType left;
  ValueType right;
  std::optional<PrecisionDerivation> a;  // inner or dom
  std::optional<EffectPrecisionDerivation> eff;
  std::optional<PrecisionDerivation> b;  // cod
};

struct EffectPrecisionDerivation::Node {
  Rule rule;
  EffectType left;
  EffectType right;
  std::optional<EffectPrecisionDerivation> injected;
  EntryDerivations entries;
};

PrecisionDerivation::PrecisionDerivation(std::shared_ptr<const Node> n)
    : node_(std::move(n)) {}

PrecisionDerivation PrecisionDerivation::bool_refl() {
  return PrecisionDerivation(std::make_shared<const Node>(
      Node{Rule::BoolRefl, ValueType::boolean(), ValueType::boolean(), {}, {}, {}}));
}

PrecisionDerivation PrecisionDerivation::unit_refl() {
  return PrecisionDerivation(std::make_shared<const Node>(
      Node{Rule::UnitRefl, ValueType::unit(), ValueType::unit(), {}, {}, {}}));
}

PrecisionDerivation PrecisionDerivation::str_refl() {
  return PrecisionDerivation(std::make_shared<const Node>(
      Node{Rule::StrRefl, ValueType::str(), ValueType::str(), {}, {}, {}}));
}

PrecisionDerivation PrecisionDerivation::queue_cong(PrecisionDerivation inner) {
  ValueType l = ValueType::queue(inner.left());
  ValueType r = ValueType::queue(inner.right());
  return PrecisionDerivation(std::make_shared<const Node>(
      Node{Rule::QueueCong, l, r, std::move(inner), {}, {}}));
}

PrecisionDerivation PrecisionDerivation::arrow_cong(
    PrecisionDerivation dom, EffectPrecisionDerivation eff,
    PrecisionDerivation cod) {
  ValueType l = ValueType::arrow(dom.left(), eff.left(), cod.left());
  ValueType r = ValueType::arrow(dom.right(), eff.right(), cod.right());
  return PrecisionDerivation(std::make_shared<const Node>(
      Node{Rule::ArrowCong, l, r, std::move(dom), std::move(eff), std::move(cod)}));
}

PrecisionDerivation::Rule PrecisionDerivation::rule() const { return node_->rule; }
const ValueType& PrecisionDerivation::left() const { return node_->left; }
const ValueType& PrecisionDerivation::right() const { return node_->right; }
const PrecisionDerivation& PrecisionDerivation::inner() const { return *node_->a; }
const PrecisionDerivation& PrecisionDerivation::dom() const { return *node_->a; }
const EffectPrecisionDerivation& PrecisionDerivation::eff() const {
  return *node_->eff;
}
const PrecisionDerivation& PrecisionDerivation::cod() const { return *node_->b; }

bool operator==(const PrecisionDerivation& x, const PrecisionDerivation& y) {
  if (x.rule() != y.rule()) return false;
  switch (x.rule()) {
    case PrecisionDerivation::Rule::QueueCong:
      return x.inner() == y.inner();
    case PrecisionDerivation::Rule::ArrowCong:
      return x.dom() == y.dom() && x.eff() == y.eff() && x.cod() == y.cod();
    default:
      return true;
  }
}

EffectPrecisionDerivation::EffectPrecisionDerivation(
    std::shared_ptr<const Node> n)
    : node_(std::move(n)) {}

EffectPrecisionDerivation EffectPrecisionDerivation::dyn_refl() {
  return EffectPrecisionDerivation(std::make_shared<const Node>(
      Node{Rule::DynRefl, EffectType::dyn(), EffectType::dyn(), {}, {}}));
}

EffectPrecisionDerivation EffectPrecisionDerivation::inj(
    EffectPrecisionDerivation concrete) {
  if (concrete.rule() != Rule::ConcreteCong) {
    throw GreffError(ErrorKind::PreconditionViolated,
                     "inj expects a concrete derivation");
  }
  EffectType l = concrete.left();
  return EffectPrecisionDerivation(std::make_shared<const Node>(
      Node{Rule::Inj, l, EffectType::dyn(), std::move(concrete), {}}));
}

EffectPrecisionDerivation EffectPrecisionDerivation::concrete_cong(
    EntryDerivations entries) {
  OpMap l, r;
  for (const auto& [name, ds] : entries) {
    l.emplace(name, OpSig{ds.first.left(), ds.second.left()});
    r.emplace(name, OpSig{ds.first.right(), ds.second.right()});
  }
  return EffectPrecisionDerivation(std::make_shared<const Node>(
      Node{Rule::ConcreteCong, EffectType::concrete(std::move(l)),
           EffectType::concrete(std::move(r)), {}, std::move(entries)}));
}

EffectPrecisionDerivation::Rule EffectPrecisionDerivation::rule() const {
  return node_->rule;
}
const EffectType& EffectPrecisionDerivation::left() const { return node_->left; }
const EffectType& EffectPrecisionDerivation::right() const {
  return node_->right;
}
const EffectPrecisionDerivation& EffectPrecisionDerivation::injected() const {
  return *node_->injected;
}
const EntryDerivations& EffectPrecisionDerivation::entries() const {
  return node_->entries;
}

bool operator==(const EffectPrecisionDerivation& x,
                const EffectPrecisionDerivation& y) {
  if (x.rule() != y.rule()) return false;
  switch (x.rule()) {
    case EffectPrecisionDerivation::Rule::DynRefl:
      return true;
    case EffectPrecisionDerivation::Rule::Inj:
      return x.injected() == y.injected();
    case EffectPrecisionDerivation::Rule::ConcreteCong:
      return x.entries() == y.entries();
  }
  return false;
}

std::optional<EffectPrecisionDerivation> derive_precision(
    const Signature& sig, const EffectType& a, const EffectType& b) {
  if (a.is_dyn()) {
    if (b.is_dyn()) return EffectPrecisionDerivation::dyn_refl();
    return std::nullopt;
  }
  if (b.is_dyn()) {
    OpMap restricted;
    for (const auto& [name, _] : a.ops()) {
      const OpSig* s = sig.find(name);
      if (!s) return std::nullopt;
      restricted.emplace(name, *s);
    }
    auto d = derive_precision(sig, a, EffectType::concrete(restricted));
    if (!d) return std::nullopt;
    return EffectPrecisionDerivation::inj(std::move(*d));
  }
  if (a.ops().size() != b.ops().size()) return std::nullopt;
  EntryDerivations entries;
  for (const auto& [name, s] : a.ops()) {
    auto it = b.ops().find(name);
    if (it == b.ops().end()) return std::nullopt;
    auto req = derive_precision(sig, s.req, it->second.req);
    auto resp = derive_precision(sig, s.resp, it->second.resp);
    if (!req || !resp) return std::nullopt;
    entries.emplace(name, std::make_pair(std::move(*req), std::move(*resp)));
  }
  return EffectPrecisionDerivation::concrete_cong(std::move(entries));
}

std::optional<PrecisionDerivation> derive_precision(const Signature& sig,
                                                    const ValueType& a,
                                                    const ValueType& b) {
  if (a.kind() != b.kind()) return std::nullopt;
  switch (a.kind()) {
    case ValueType::Kind::Bool: return PrecisionDerivation::bool_refl();
    case ValueType::Kind::Unit: return PrecisionDerivation::unit_refl();
    case ValueType::Kind::Str: return PrecisionDerivation::str_refl();
    case ValueType::Kind::Queue: {
      auto d = derive_precision(sig, a.elem(), b.elem());
      if (!d) return std::nullopt;
      return PrecisionDerivation::queue_cong(std::move(*d));
    }
    case ValueType::Kind::Arrow: {
      auto d = derive_precision(sig, a.dom(), b.dom());
      auto e = derive_precision(sig, a.eff(), b.eff());
      auto c = derive_precision(sig, a.cod(), b.cod());
      if (!d || !e || !c) return std::nullopt;
      return PrecisionDerivation::arrow_cong(std::move(*d), std::move(*e),
                                             std::move(*c));
    }
  }
  return std::nullopt;
}

PrecisionDerivation reflexivity(const Signature& sig, const ValueType& a) {
  auto d = derive_precision(sig, a, a);
  if (!d) {
    throw GreffError(ErrorKind::PreconditionViolated,
                     "no reflexivity derivation for " + to_string(a));
  }
  return *d;
}

EffectPrecisionDerivation reflexivity(const Signature& sig,
                                      const EffectType& a) {
  auto d = derive_precision(sig, a, a);
  if (!d) {
    throw GreffError(ErrorKind::PreconditionViolated,
                     "no reflexivity derivation for " + to_string(a));
  }
  return *d;
}

namespace {

[[noreturn]] void mismatch(const std::string& r, const std::string& l) {
  throw GreffError(ErrorKind::EndpointMismatch,
                   fmt::format("cannot compose: right endpoint {} differs "
                               "from left endpoint {}",
                               r, l));
}

}  // namespace

PrecisionDerivation compose_derivations(const PrecisionDerivation& c,
                                        const PrecisionDerivation& d) {
  if (!(c.right() == d.left())) {
    mismatch(to_string(c.right()), to_string(d.left()));
  }
  switch (c.rule()) {
    case PrecisionDerivation::Rule::QueueCong:
      return PrecisionDerivation::queue_cong(
          compose_derivations(c.inner(), d.inner()));
    case PrecisionDerivation::Rule::ArrowCong:
      return PrecisionDerivation::arrow_cong(
          compose_derivations(c.dom(), d.dom()),
          compose_derivations(c.eff(), d.eff()),
          compose_derivations(c.cod(), d.cod()));
    default:
      return c;
  }
}

EffectPrecisionDerivation compose_derivations(
    const EffectPrecisionDerivation& c, const EffectPrecisionDerivation& d) {
  using Rule = EffectPrecisionDerivation::Rule;
  if (!(c.right() == d.left())) {
    mismatch(to_string(c.right()), to_string(d.left()));
  }
  if (d.rule() == Rule::DynRefl) return c;  // ? ∘ ? and inj(d) ∘ ?
  if (d.rule() == Rule::Inj) {
    return EffectPrecisionDerivation::inj(compose_derivations(c, d.injected()));
  }
  EntryDerivations out;
  auto it = d.entries().begin();
  for (const auto& [name, ds] : c.entries()) {
    out.emplace(name,
                std::make_pair(compose_derivations(ds.first, it->second.first),
                               compose_derivations(ds.second, it->second.second)));
    ++it;
  }
  return EffectPrecisionDerivation::concrete_cong(std::move(out));
}

std::string to_string(const PrecisionDerivation& d) {
  switch (d.rule()) {
    case PrecisionDerivation::Rule::BoolRefl: return "bool";
    case PrecisionDerivation::Rule::UnitRefl: return "1";
    case PrecisionDerivation::Rule::StrRefl: return "str";
    case PrecisionDerivation::Rule::QueueCong:
      return "Queue(" + to_string(d.inner()) + ")";
    case PrecisionDerivation::Rule::ArrowCong:
      return "(" + to_string(d.dom()) + " -[" + to_string(d.eff()) + "]> " +
             to_string(d.cod()) + ")";
  }
  return "";
}

std::string to_string(const EffectPrecisionDerivation& d) {
  switch (d.rule()) {
    case EffectPrecisionDerivation::Rule::DynRefl: return "?";
    case EffectPrecisionDerivation::Rule::Inj:
      return "inj(" + to_string(d.injected()) + ")";
    case EffectPrecisionDerivation::Rule::ConcreteCong: {
      std::string out = "{";
      bool first = true;
      for (const auto& [name, ds] : d.entries()) {
        if (!first) out += ", ";
        first = false;
        out += name + "@" + to_string(ds.first) + "~>" + to_string(ds.second);
      }
      return out + "}";
    }
  }
  return "";
}

}  // namespace greff
