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

#include "greff/conformance.hpp"
#include "greff/core.hpp"
#include "greff/error.hpp"
#include "support/printers.hpp"

namespace greff {
namespace {

const ValueType B = ValueType::boolean();
const ValueType U = ValueType::unit();
const ValueType S = ValueType::str();
const EffectType kDyn = EffectType::dyn();
const EffectType kNone = EffectType::empty();
const EffectType kE = EffectType::concrete({{"e", {B, B}}});
const EffectType kEF = EffectType::concrete({{"e", {B, B}}, {"f", {U, S}}});

Signature sigma() {
  Signature s;
  s.declare("e", {B, B});
  s.declare("f", {U, S});
  s.declare("g", {ValueType::arrow(B, kDyn, B), B});
  return s;
}

bool checks_at(const std::string& text, const EffectType& eff, const ValueType& t,
               const TypeEnv& env = {}) {
  return checks(sigma(), env, read_term(text), eff, t);
}

TEST(CoreText, GeneratedTermsRoundTrip) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto p = conformance::generate_core_program(seed);
    const std::string text = print_term(p.term);
    const TermPtr back = read_term(text);
    EXPECT_TRUE(structurally_equal(back, p.term)) << text;
    EXPECT_EQ(print_term(back), text);
  }
}

TEST(CoreText, TypesAndEffectsRoundTrip) {
  const ValueType t = ValueType::arrow(ValueType::queue(B), kEF, ValueType::arrow(U, kDyn, S));
  EXPECT_EQ(read_type(print_type(t)), t);
  EXPECT_EQ(read_effect(print_effect(kEF)), kEF);
  EXPECT_EQ(print_effect(kDyn), "?");
  EXPECT_THROW(read_term("(app f"), GreffError);
}

TEST(CoreTyping, ValuesArePure) {
  const Typing t = typecheck(sigma(), {}, read_term("(lambda x bool (eff (e bool bool)) bool (raise e bool bool x))"));
  EXPECT_EQ(t.effect.kind, EffectBound::Kind::Pure);
  EXPECT_EQ(*t.type, ValueType::arrow(B, kE, B));
  for (const auto& e : {kNone, kE, kDyn}) EXPECT_TRUE(checks_at("true", e, B));
}

TEST(CoreTyping, RaiseNeedsItsOperation) {
  const std::string r = "(raise e bool bool true)";
  EXPECT_TRUE(checks_at(r, kE, B));
  EXPECT_TRUE(checks_at(r, kEF, B));
  EXPECT_TRUE(checks_at(r, kDyn, B));
  EXPECT_FALSE(checks_at(r, kNone, B));
  EXPECT_FALSE(checks_at(r, kE, S));
  // The annotation must match the effect's entry.
  EXPECT_FALSE(checks_at("(raise f bool bool true)", kEF, B));
}

TEST(CoreTyping, EmptyLatentEffectIsNotBelowDyn) {
  const TypeEnv env = {{"h", ValueType::arrow(B, kNone, B)}};
  EXPECT_TRUE(checks_at("(app h true)", kNone, B, env));
  EXPECT_TRUE(checks_at("(app h true)", kE, B, env));
  EXPECT_FALSE(checks_at("(app h true)", kDyn, B, env));
  EXPECT_TRUE(checks_at("(eup (eff) ? (app h true))", kDyn, B, env));
}

TEST(CoreTyping, ErrorInhabitsEveryType) {
  const Typing t = typecheck(sigma(), {}, read_term("err"));
  EXPECT_FALSE(t.type.has_value());
  EXPECT_TRUE(checks_at("err", kNone, S));
  EXPECT_TRUE(checks_at("err", kDyn, ValueType::arrow(B, kE, B)));
  EXPECT_TRUE(checks_at("(if true err \"x\")", kNone, S));
}

TEST(CoreTyping, HandlersDischargeClausedOperations) {
  const std::string deep =
      "(handle deep (raise e bool bool true) (ret r r)"
      " (clauses (e p k bool bool (app k p))) (eff) bool)";
  EXPECT_TRUE(checks_at(deep, kNone, B));
  const std::string missing = "(handle deep (raise e bool bool true) (ret r r) (clauses) (eff) bool)";
  EXPECT_FALSE(checks_at(missing, kNone, B));
  EXPECT_TRUE(checks_at("(handle deep (raise e bool bool true) (ret r r) (clauses) (eff (e bool bool)) bool)",
                        kE, B));
  // A shallow continuation runs at the scrutinee typing, so it may still raise e.
  const std::string shallow =
      "(handle shallow (raise e bool bool true) (ret r r)"
      " (clauses (e p k bool bool (app k p))) (eff (e bool bool)) bool (eff (e bool bool)) bool)";
  EXPECT_TRUE(checks_at(shallow, kE, B));
  EXPECT_FALSE(checks_at(shallow, kNone, B));
}

TEST(CoreTyping, CastsRelatePreciseAndImprecise) {
  EXPECT_TRUE(checks_at("(eup (eff (e bool bool)) ? (raise e bool bool true))", kDyn, B));
  EXPECT_TRUE(checks_at("(edown (eff (e bool bool)) ? (raise e bool bool true))", kE, B));
  const ValueType p = ValueType::arrow(B, kE, B), i = ValueType::arrow(B, kDyn, B);
  EXPECT_NO_THROW(core::val_up(p, i, core::var("x")));
  EXPECT_THROW(core::val_up(i, p, core::var("x")), GreffError);
  EXPECT_THROW(core::eff_up(kDyn, kE, core::var("x")), GreffError);
  EXPECT_TRUE(checks(sigma(), {{"x", p}}, core::val_up(p, i, core::var("x")), kNone, i));
  EXPECT_FALSE(checks(sigma(), {{"x", i}}, core::val_up(p, i, core::var("x")), kNone, i));
}

TEST(CoreTyping, WellFormedEntriesSitBelowTheSignature) {
  const Signature sig = sigma();
  EXPECT_TRUE(wellformed(sig, EffectType::concrete({{"g", {ValueType::arrow(B, kE, B), B}}})));
  EXPECT_FALSE(wellformed(sig, EffectType::concrete({{"e", {S, B}}})));
  EXPECT_FALSE(wellformed(sig, EffectType::concrete({{"nope", {B, B}}})));
  EXPECT_TRUE(wellformed(sig, ValueType::arrow(B, kDyn, B)));
}

// Checking is closed under widening the effect and the result type.
TEST(CoreTyping, SubsumptionClosure) {
  const OpSig extra{B, B};
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto p = conformance::generate_core_program(seed);
    ASSERT_TRUE(checks(p.sig, {}, p.term, p.eff, p.type)) << seed;
    Signature wider = p.sig;
    wider.declare("zz", extra);
    OpMap ops = p.eff.ops();
    ops.emplace("zz", extra);
    EXPECT_TRUE(checks(wider, {}, p.term, EffectType::concrete(ops), p.type)) << seed;
  }
}

TEST(CoreTerms, SubstitutionRespectsBinders) {
  const TermPtr lam = read_term("(lambda x bool (eff) bool x)");
  EXPECT_TRUE(structurally_equal(substitute(lam, "x", core::boolean(true)), lam));
  const TermPtr let = read_term("(let y x (app y x))");
  EXPECT_EQ(print_term(substitute(let, "x", core::unit())), "(let y unit (app y unit))");
  const TermPtr shadow = read_term("(let x true x)");
  EXPECT_EQ(print_term(substitute(shadow, "x", core::unit())), "(let x true x)");
}

}  // namespace
}  // namespace greff
