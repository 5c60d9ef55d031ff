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
#include "greff/error.hpp"
#include "greff/surface.hpp"
#include "support/paths.hpp"

namespace greff::surface {
namespace {

using K = Term::Kind;

void expect_round_trip(const std::string& text) {
  const Program p = parse_program(text);
  const std::string printed = print_program(p);
  const Program q = parse_program(printed);
  EXPECT_TRUE(equal(p, q)) << printed;
  EXPECT_EQ(print_program(q), printed);
}

TEST(Parse, CorpusRoundTrips) {
  for (const char* f : {"threads_precise.greff", "threads_imprecise.greff",
                        "bad_downcast.greff", "bad_import.greff"}) {
    SCOPED_TRACE(f);
    expect_round_trip(testing::slurp(testing::corpus_file(f)));
  }
}

TEST(Parse, GeneratedProgramsRoundTrip) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    SCOPED_TRACE(seed);
    expect_round_trip(print_program(conformance::generate_surface_program(seed)));
  }
}

TEST(Parse, ThreadsStructure) {
  const Program p = parse_program(testing::slurp(testing::corpus_file("threads_precise.greff")));
  ASSERT_EQ(p.modules.size(), 3u);
  EXPECT_EQ(p.modules[0].name, "Operations");
  EXPECT_EQ(p.modules[0].decls.size(), 3u);
  EXPECT_EQ(p.modules[0].decls[2].kind, Decl::Kind::NewEffect);
  EXPECT_EQ(p.modules[0].decls[2].name, "fork");
  EXPECT_EQ(p.modules[2].name, "Main");
  EXPECT_FALSE(p.main_term);
  const Program block = desugar_main(p);
  EXPECT_EQ(block.modules.size(), 2u);
  EXPECT_EQ(block.main_decls.size(), 6u);
  ASSERT_EQ(block.main_term->kind, K::AscribeType);
  EXPECT_EQ(print_type(block.main_term->type), "str");
  const Decl& loop = p.modules[1].decls[3];
  EXPECT_EQ(loop.kind, Decl::Kind::DefineValue);
  EXPECT_EQ(loop.name, "sch-loop");
  EXPECT_EQ(print_type(loop.type),
            "Queue (1 -[fork,print,yield]> 1) -[]> str -[]> str");
}

TEST(Parse, SmallestProgram) {
  const Program p = parse_program("main { true }");
  EXPECT_TRUE(p.modules.empty());
  EXPECT_TRUE(p.main_decls.empty());
  EXPECT_EQ(p.main_term->kind, K::True);
  try {
    parse_program("main { true");
    FAIL() << "expected a syntax error";
  } catch (const GreffError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Syntax);
    EXPECT_NE(std::string(e.what()).find("end of input"), std::string::npos) << e.what();
  }
}

TEST(Parse, MainBlockDefinitionsEndAtSemicolon) {
  const Program p = parse_program(
      "main {\n  define f : 1 -[]> 1 = (lambda x : 1. x; x);\n  f ()\n}");
  ASSERT_EQ(p.main_decls.size(), 1u);
  EXPECT_EQ(p.main_decls[0].body->kids[0]->kind, K::Seq);
  EXPECT_EQ(p.main_term->kind, K::App);
  expect_round_trip(print_program(p));
}

TEST(Parse, SequencingAndApplication) {
  TermPtr t = parse_term("raise print \"a\"; f x y");
  ASSERT_EQ(t->kind, K::Seq);
  EXPECT_EQ(t->kids[0]->kind, K::Raise);
  EXPECT_EQ(t->kids[0]->name, "print");
  const TermPtr& app = t->kids[1];
  ASSERT_EQ(app->kind, K::App);
  EXPECT_EQ(app->kids[1]->name, "y");
  ASSERT_EQ(app->kids[0]->kind, K::App);
  EXPECT_EQ(app->kids[0]->kids[0]->name, "f");
}

TEST(Parse, ArrowsAssociateRightAndEffectsSort) {
  TypePtr t = parse_type("1 -[yield,print]> bool -[?]> str");
  ASSERT_EQ(t->kind, Type::Kind::Arrow);
  EXPECT_EQ(t->eff.names, (std::vector<std::string>{"print", "yield"}));
  ASSERT_EQ(t->b->kind, Type::Kind::Arrow);
  EXPECT_TRUE(t->b->eff.dynamic);
  EXPECT_EQ(t->b->b->kind, Type::Kind::Str);
  EXPECT_EQ(print_type(t), "1 -[print,yield]> bool -[?]> str");
}

TEST(Parse, Ascriptions) {
  TermPtr t = parse_term("x :: [?] :: [ok]");
  ASSERT_EQ(t->kind, K::AscribeEff);
  EXPECT_EQ(t->eff.names, std::vector<std::string>{"ok"});
  ASSERT_EQ(t->kids[0]->kind, K::AscribeEff);
  EXPECT_TRUE(t->kids[0]->eff.dynamic);
  TermPtr u = parse_term("(lambda x : bool. x) :: bool -[]> bool");
  EXPECT_EQ(u->kind, K::AscribeType);
}

TEST(Parse, ValueForms) {
  EXPECT_TRUE(is_value_form(*parse_term("lambda x : bool. raise e x")));
  EXPECT_TRUE(is_value_form(*parse_term("\"s\"")));
  EXPECT_FALSE(is_value_form(*parse_term("f x")));
  EXPECT_TRUE(mentions_free(*parse_term("lambda y : 1. x"), "x"));
  EXPECT_FALSE(mentions_free(*parse_term("lambda x : 1. x"), "x"));
}

TEST(Parse, ErrorsCarryPositions) {
  try {
    parse_program("main {\n  lambda x bool. x\n}");
    FAIL() << "expected a syntax error";
  } catch (const GreffError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Syntax);
    EXPECT_EQ(e.pos().line, 2);
  }
  try {
    parse_term("x $ y");
    FAIL() << "expected a lexical error";
  } catch (const GreffError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Lexical);
    EXPECT_EQ(e.pos().column, 3);
  }
}

}  // namespace
}  // namespace greff::surface
