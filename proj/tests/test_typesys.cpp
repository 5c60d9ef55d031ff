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

#include <gtest/gtest.h>

#include <vector>

#include "greff/error.hpp"
#include "greff/precision.hpp"
#include "greff/types.hpp"
#include "support/printers.hpp"

namespace greff {
namespace {

const ValueType B = ValueType::boolean();
const ValueType U = ValueType::unit();
const ValueType S = ValueType::str();

ValueType arrow(ValueType a, EffectType e, ValueType b) {
  return ValueType::arrow(std::move(a), std::move(e), std::move(b));
}

EffectType eff(OpMap ops) { return EffectType::concrete(std::move(ops)); }

const EffectType kDyn = EffectType::dyn();
const EffectType kNone = EffectType::empty();
const EffectType kPrint = eff({{"print", {S, U}}});
const EffectType kYield = eff({{"yield", {U, U}}});
const EffectType kPrintYield = eff({{"print", {S, U}}, {"yield", {U, U}}});

// Rules restated directly for the oracle.
bool o_prec(const ValueType& a, const ValueType& b);
bool o_prec(const EffectType& a, const EffectType& b) {
  if (b.is_dyn()) return true;
  if (a.is_dyn()) return false;
  if (a.ops().size() != b.ops().size()) return false;
  for (const auto& [n, s] : a.ops()) {
    if (!b.has(n)) return false;
    const OpSig& t = b.ops().at(n);
    if (!o_prec(s.req, t.req) || !o_prec(s.resp, t.resp)) return false;
  }
  return true;
}
bool o_prec(const ValueType& a, const ValueType& b) {
  if (a.kind() != b.kind()) return false;
  if (a.is(ValueType::Kind::Queue)) return o_prec(a.elem(), b.elem());
  if (a.is_arrow())
    return o_prec(a.dom(), b.dom()) && o_prec(a.eff(), b.eff()) && o_prec(a.cod(), b.cod());
  return true;
}

// `gradual` lets ? sit below and above everything.
bool o_sub(const ValueType& a, const ValueType& b, bool gradual);
bool o_sub(const EffectType& a, const EffectType& b, bool gradual) {
  if (a.is_dyn() || b.is_dyn()) return gradual || (a.is_dyn() && b.is_dyn());
  for (const auto& [n, s] : a.ops()) {
    if (!b.has(n)) return false;
    const OpSig& t = b.ops().at(n);
    if (!o_sub(s.req, t.req, gradual) || !o_sub(t.resp, s.resp, gradual)) return false;
  }
  return true;
}
bool o_sub(const ValueType& a, const ValueType& b, bool gradual) {
  if (a.kind() != b.kind()) return false;
  if (a.is(ValueType::Kind::Queue)) return o_sub(a.elem(), b.elem(), gradual);
  if (a.is_arrow())
    return o_sub(b.dom(), a.dom(), gradual) && o_sub(a.eff(), b.eff(), gradual) &&
           o_sub(a.cod(), b.cod(), gradual);
  return true;
}

// Every entry is below its signature entry, so all members are well formed.
std::vector<EffectType> effect_universe() {
  const ValueType bb = arrow(B, kNone, B);
  return {kDyn,
          kNone,
          eff({{"e", {B, B}}}),
          eff({{"e", {B, B}}, {"f", {U, S}}}),
          eff({{"f", {U, S}}}),
          eff({{"g", {bb, B}}}),
          eff({{"g", {arrow(B, kDyn, B), B}}}),
          eff({{"h", {B, bb}}})};
}

std::vector<ValueType> type_universe() {
  std::vector<ValueType> out = {B, U, S, ValueType::queue(B)};
  for (const EffectType& e : effect_universe()) {
    out.push_back(arrow(B, e, B));
    out.push_back(arrow(arrow(B, e, B), kNone, B));
    out.push_back(ValueType::queue(arrow(U, e, U)));
  }
  return out;
}

Signature sigma() {
  Signature s;
  s.declare("e", {B, B});
  s.declare("f", {U, S});
  s.declare("g", {arrow(B, kDyn, B), B});
  s.declare("h", {B, arrow(B, kDyn, B)});
  s.declare("print", {S, U});
  s.declare("yield", {U, U});
  return s;
}

TEST(Relations, AgreeWithRuleOracleOnEffects) {
  const auto u = effect_universe();
  for (const auto& a : u)
    for (const auto& b : u) {
      SCOPED_TRACE(to_string(a) + " vs " + to_string(b));
      EXPECT_EQ(precision(a, b), o_prec(a, b));
      EXPECT_EQ(subtype(a, b), o_sub(a, b, false));
      EXPECT_EQ(gradual_subtype(a, b), o_sub(a, b, true));
      EXPECT_EQ(compatible(a, b), o_sub(a, b, true) && o_sub(b, a, true));
    }
}

TEST(Relations, AgreeWithRuleOracleOnTypes) {
  const auto u = type_universe();
  for (const auto& a : u)
    for (const auto& b : u) {
      SCOPED_TRACE(to_string(a) + " vs " + to_string(b));
      EXPECT_EQ(precision(a, b), o_prec(a, b));
      EXPECT_EQ(subtype(a, b), o_sub(a, b, false));
      EXPECT_EQ(gradual_subtype(a, b), o_sub(a, b, true));
    }
}

TEST(Relations, PartialOrdersAndInclusions) {
  const auto u = type_universe();
  for (const auto& a : u) {
    EXPECT_TRUE(precision(a, a));
    EXPECT_TRUE(subtype(a, a));
    EXPECT_TRUE(precision(a, erase(a)));
    EXPECT_EQ(erase(erase(a)), erase(a));
    for (const auto& b : u) {
      if (subtype(a, b)) EXPECT_TRUE(gradual_subtype(a, b));
      if (precision(a, b) && precision(b, a)) EXPECT_EQ(a, b);
      for (const auto& c : u) {
        if (precision(a, b) && precision(b, c)) EXPECT_TRUE(precision(a, c));
        if (subtype(a, b) && subtype(b, c)) EXPECT_TRUE(subtype(a, c));
      }
    }
  }
}

TEST(Relations, WorkedExamples) {
  EXPECT_TRUE(subtype(kPrint, kPrintYield));
  EXPECT_FALSE(subtype(kDyn, kPrint));
  EXPECT_TRUE(subtype(arrow(U, kPrint, U), arrow(U, kPrintYield, U)));
  EXPECT_TRUE(precision(eff({{"fork", {arrow(U, kPrintYield, U), U}}}), kDyn));
  EXPECT_FALSE(precision(eff({{"e", {B, B}}}), eff({{"e", {B, B}}, {"f", {B, B}}})));
  EXPECT_TRUE(gradual_subtype(kDyn, kPrint));
  EXPECT_TRUE(gradual_subtype(kPrint, kDyn));
  EXPECT_FALSE(gradual_subtype(B, arrow(B, kDyn, B)));
  EXPECT_TRUE(compatible(arrow(U, kDyn, U), arrow(U, kPrintYield, U)));
  EXPECT_FALSE(compatible(arrow(B, kNone, B), arrow(B, eff({{"e", {B, B}}}), B)));
}

TEST(Relations, DepthRuleTakesResponsesContravariantly) {
  const ValueType narrow = arrow(B, kNone, B);
  const ValueType wide = arrow(B, kPrint, B);
  // narrow ≤ wide, so a request of narrow is below a request of wide.
  EXPECT_TRUE(subtype(eff({{"e", {narrow, B}}}), eff({{"e", {wide, B}}})));
  EXPECT_FALSE(subtype(eff({{"e", {wide, B}}}), eff({{"e", {narrow, B}}})));
  EXPECT_TRUE(subtype(eff({{"e", {B, wide}}}), eff({{"e", {B, narrow}}})));
  EXPECT_FALSE(subtype(eff({{"e", {B, narrow}}}), eff({{"e", {B, wide}}})));
}

TEST(Join, ConcreteUnionAndIdempotence) {
  const EffectType a = eff({{"e", {B, B}}});
  const EffectType b = eff({{"f", {S, U}}});
  EXPECT_EQ(gradual_join(a, b), eff({{"e", {B, B}}, {"f", {S, U}}}));
  EXPECT_EQ(gradual_meet(a, b), kNone);
  for (const auto& e : effect_universe()) {
    EXPECT_EQ(gradual_join(e, e), e);
    EXPECT_EQ(gradual_meet(e, e), e);
  }
}

TEST(Join, DynAbsorbsOnBothSides) {
  for (const auto& e : effect_universe()) {
    EXPECT_EQ(gradual_join(e, kDyn), kDyn);
    EXPECT_EQ(gradual_join(kDyn, e), kDyn);
    EXPECT_EQ(gradual_meet(e, kDyn), kDyn);
  }
}

TEST(Join, JoinIsAnUpperBoundUpToDyn) {
  const auto u = effect_universe();
  for (const auto& a : u)
    for (const auto& b : u) {
      EffectType j;
      try {
        j = gradual_join(a, b);
      } catch (const GreffError&) {
        continue;
      }
      EXPECT_TRUE(gradual_subtype(a, j)) << to_string(a) << " " << to_string(b);
      EXPECT_TRUE(gradual_subtype(b, j)) << to_string(a) << " " << to_string(b);
      EXPECT_EQ(j, gradual_join(b, a));
    }
}

TEST(Join, HeadMismatchIsUndefined) {
  EXPECT_THROW(gradual_join(B, arrow(B, kNone, B)), GreffError);
  EXPECT_THROW(gradual_meet(U, S), GreffError);
  EXPECT_THROW(gradual_join(eff({{"e", {B, B}}}), eff({{"e", {S, S}}})), GreffError);
}

TEST(Derivations, ExistExactlyWhenPrecisionHolds) {
  const Signature sig = sigma();
  const auto u = type_universe();
  for (const auto& a : u)
    for (const auto& b : u) {
      auto d = derive_precision(sig, a, b);
      EXPECT_EQ(d.has_value(), precision(a, b));
      if (d) {
        EXPECT_EQ(d->left(), a);
        EXPECT_EQ(d->right(), b);
      }
    }
}

TEST(Derivations, CompositionIsCutAndReflexivityIsIdentity) {
  const Signature sig = sigma();
  const auto u = type_universe();
  for (const auto& a : u)
    for (const auto& b : u) {
      auto ab = derive_precision(sig, a, b);
      if (!ab) continue;
      EXPECT_EQ(compose_derivations(*ab, reflexivity(sig, b)), *ab);
      EXPECT_EQ(compose_derivations(reflexivity(sig, a), *ab), *ab);
      for (const auto& c : u) {
        auto bc = derive_precision(sig, b, c);
        if (!bc) continue;
        // Derivations are unique, so the cut must be the direct one.
        EXPECT_EQ(compose_derivations(*ab, *bc), *derive_precision(sig, a, c));
      }
    }
}

TEST(Derivations, InjShapes) {
  const Signature sig = sigma();
  auto d = derive_precision(sig, kPrint, kDyn);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->rule(), EffectPrecisionDerivation::Rule::Inj);
  EXPECT_EQ(d->injected().right(), eff({{"print", {S, U}}}));
  EXPECT_EQ(derive_precision(sig, B, B)->rule(), PrecisionDerivation::Rule::BoolRefl);
  EXPECT_FALSE(derive_precision(sig, B, arrow(B, kDyn, B)));
  const auto inner = derive_precision(sig, kPrint, kPrint);
  EXPECT_EQ(compose_derivations(*inner, *d).rule(), EffectPrecisionDerivation::Rule::Inj);
  EXPECT_THROW(compose_derivations(*derive_precision(sig, B, B), *derive_precision(sig, U, U)),
               GreffError);
}

}  // namespace
}  // namespace greff
