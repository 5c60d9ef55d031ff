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
#include "greff/elaborate.hpp"
#include "greff/error.hpp"
#include "support/printers.hpp"
#include "support/paths.hpp"

namespace greff {
namespace {

const ValueType B = ValueType::boolean();
const ValueType U = ValueType::unit();
const ValueType S = ValueType::str();

Elaboration elab(const std::string& text) {
  Elaboration e = elab_program(surface::parse_program(text));
  check(e.sig, {}, e.term, e.eff, e.type);
  return e;
}

ErrorKind failure(const std::string& text) {
  try {
    elab(text);
  } catch (const GreffError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "elaborated: " << text;
  return ErrorKind::Syntax;
}

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

TEST(Elaborate, SmallestProgram) {
  const Elaboration e = elab("main { true }");
  EXPECT_TRUE(e.sig.ops().empty());
  EXPECT_EQ(print_term(e.term), "true");
  EXPECT_EQ(e.eff, EffectType::empty());
  EXPECT_EQ(e.type, B);
}

TEST(Elaborate, ThreadsPrograms) {
  for (const char* f : {"threads_precise.greff", "threads_imprecise.greff"}) {
    const Elaboration e = elab(testing::slurp(testing::corpus_file(f)));
    EXPECT_EQ(e.type, S) << f;
    // Only the precise version knows the scheduler handles everything.
    const bool precise = std::string(f) == "threads_precise.greff";
    EXPECT_EQ(e.eff, precise ? EffectType::empty() : EffectType::dyn()) << f;
    // Σ holds erased entries.
    const OpSig* fork = e.sig.find("fork");
    ASSERT_TRUE(fork);
    EXPECT_EQ(fork->req, ValueType::arrow(U, EffectType::dyn(), U));
    EXPECT_EQ(e.modules.count("Operations"), 1u);
  }
}

TEST(Elaborate, IfJoinsBranchEffectsThroughCasts) {
  const Elaboration e = elab(
      "main {\n  effect print : str ~> 1\n  effect yield : 1 ~> 1\n"
      "  (if true then raise print \"a\" else raise yield ()) :: [print,yield]\n}");
  EXPECT_EQ(e.eff, EffectType::concrete({{"print", {S, U}}, {"yield", {U, U}}}));
  const std::string core = print_term(e.term);
  EXPECT_GE(count(core, "(edown "), 3u) << core;
  EXPECT_EQ(count(core, "(edown "), count(core, "(eup ")) << core;
}

TEST(Elaborate, ObliqueCastsGoThroughTheErasure) {
  const ValueType p = ValueType::arrow(B, EffectType::concrete({{"e", {B, B}}}), B);
  const ValueType q = ValueType::arrow(B, EffectType::dyn(), B);
  const std::string dyn = print_type(erase(p));
  EXPECT_EQ(print_term(oblique_cast(q, p, core::var("x"))),
            "(down " + print_type(q) + " " + dyn + " (up " + print_type(p) + " " + dyn + " x))");
  EXPECT_EQ(print_term(oblique_cast(EffectType::empty(), EffectType::dyn(), core::var("x"))),
            "(edown (eff) ? (eup ? ? x))");
}

TEST(Elaborate, Deterministic) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const surface::Program p = conformance::generate_surface_program(seed);
    EXPECT_EQ(print_term(elab_program(p).term), print_term(elab_program(p).term));
  }
}

TEST(Elaborate, ImpreciseVersionsStillElaborate) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto pair = conformance::imprecisify(conformance::generate_surface_program(seed), seed);
    EXPECT_NO_THROW(elab(surface::print_program(pair.imprecise))) << seed;
  }
}

TEST(Elaborate, ModuleErrors) {
  EXPECT_EQ(failure(testing::slurp(testing::corpus_file("bad_import.greff"))),
            ErrorKind::IncompatibleEffectImport);
  EXPECT_EQ(failure("module A where\n  effect e : bool ~> bool\nmain {\n  effect e : bool ~> bool\n  true\n}"),
            ErrorKind::DuplicateEffect);
  EXPECT_EQ(failure("main {\n  import Nowhere.e : bool ~> bool\n  true\n}"),
            ErrorKind::UnknownModule);
  EXPECT_EQ(failure("module A where\n  define x : bool = true\n"
                    "main {\n  import A.y as y : bool\n  y\n}"),
            ErrorKind::UnknownName);
  EXPECT_EQ(failure("module A where\n  define x : bool = true\n"
                    "main {\n  import A.x as y : str\n  y\n}"),
            ErrorKind::IncompatibleValueImport);
}

TEST(Elaborate, ExpressionErrors) {
  EXPECT_EQ(failure("main { (lambda x : bool. x) \"s\" }"), ErrorKind::TypeMismatch);
  EXPECT_EQ(failure("main { raise nope true }"), ErrorKind::UnknownEffect);
  EXPECT_EQ(failure("main { zz }"), ErrorKind::UnknownName);
  EXPECT_EQ(failure("main {\n  effect e : bool ~> bool\n"
                    "  handle raise e true : bool ! [] with\n  | ret x -> x\n  end\n}"),
            ErrorKind::UnhandledEffect);
}

TEST(Elaborate, DynamicScrutineeIsCastNotRejected) {
  const Elaboration e = elab(testing::slurp(testing::corpus_file("bad_downcast.greff")));
  EXPECT_EQ(e.type, B);
  EXPECT_NE(print_term(e.term).find("(edown "), std::string::npos);
}

}  // namespace
}  // namespace greff
