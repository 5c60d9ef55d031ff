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

#ifndef GREFF_TYPES_HPP_
#define GREFF_TYPES_HPP_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace greff {

class EffectType;

class ValueType {
 public:
  enum class Kind { Bool, Unit, Str, Queue, Arrow };

  // Defaults to bool so types can live in containers.
  ValueType();

  static ValueType boolean();
  static ValueType unit();
  static ValueType str();
  static ValueType queue(ValueType elem);
  static ValueType arrow(ValueType dom, EffectType eff, ValueType cod);

  Kind kind() const;
  bool is(Kind k) const { return kind() == k; }
  bool is_arrow() const { return kind() == Kind::Arrow; }

  // Queue only.
  const ValueType& elem() const;
  // Arrow only.
  const ValueType& dom() const;
  const EffectType& eff() const;
  const ValueType& cod() const;

  friend bool operator==(const ValueType& a, const ValueType& b);

 private:
  struct Node;
  explicit ValueType(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

struct OpSig {
  ValueType req;
  ValueType resp;

  friend bool operator==(const OpSig&, const OpSig&) = default;
};

// std::map keeps operations in lexicographic order, which is the canonical
// order for equality and printing.
using OpMap = std::map<std::string, OpSig>;

class EffectType {
 public:
  // Defaults to the empty concrete effect.
  EffectType() = default;

  static EffectType dyn();
  static EffectType concrete(OpMap ops);
  static EffectType empty() { return EffectType(); }

  bool is_dyn() const { return dyn_; }
  bool is_concrete() const { return !dyn_; }
  const OpMap& ops() const { return ops_; }
  bool has(const std::string& op) const;

  friend bool operator==(const EffectType&, const EffectType&) = default;

 private:
  bool dyn_ = false;
  OpMap ops_;
};

class Signature {
 public:
  // False when the name is already present.
  bool declare(const std::string& name, OpSig sig);
  const OpSig* find(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name) != nullptr; }
  const OpMap& ops() const { return ops_; }

  friend bool operator==(const Signature&, const Signature&) = default;

 private:
  OpMap ops_;
};

// The typing of op in σ; for ? it is the signature's entry.
std::optional<OpSig> lookup_op(const EffectType& eff, const Signature& sig,
                               const std::string& op);
// ε ∈ σ in the sense of the cast rules (? contains everything in Σ).
bool effect_mentions(const EffectType& eff, const Signature& sig,
                     const std::string& op);
// The operation names of σ, resolving ? through Σ.
std::vector<std::string> effect_names(const EffectType& eff,
                                      const Signature& sig);

ValueType erase(const ValueType& t);
OpSig erase(const OpSig& s);
bool non_tracking(const ValueType& t);

bool subtype(const ValueType& a, const ValueType& b);
bool subtype(const EffectType& a, const EffectType& b);
bool precision(const ValueType& a, const ValueType& b);
bool precision(const EffectType& a, const EffectType& b);
bool gradual_subtype(const ValueType& a, const ValueType& b);
bool gradual_subtype(const EffectType& a, const EffectType& b);
bool compatible(const ValueType& a, const ValueType& b);
bool compatible(const EffectType& a, const EffectType& b);

// Throw GreffError(JoinUndefined) when the head constructors differ.
ValueType gradual_join(const ValueType& a, const ValueType& b);
ValueType gradual_meet(const ValueType& a, const ValueType& b);
EffectType gradual_join(const EffectType& a, const EffectType& b);
EffectType gradual_meet(const EffectType& a, const EffectType& b);

// Least upper / greatest lower bounds in ≤, used by the core checker.
std::optional<ValueType> subtype_join(const ValueType& a, const ValueType& b);
std::optional<ValueType> subtype_meet(const ValueType& a, const ValueType& b);
std::optional<EffectType> subtype_join(const EffectType& a,
                                       const EffectType& b);
std::optional<EffectType> subtype_meet(const EffectType& a,
                                       const EffectType& b);

std::string to_string(const ValueType& t);
std::string to_string(const EffectType& e);
std::string to_string(const OpSig& s);

}  // namespace greff

#endif  // GREFF_TYPES_HPP_
