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

#include "greff/core.hpp"
#include "greff/elaborate.hpp"
#include "support/paths.hpp"

namespace greff::testing {
namespace {

TEST(Cli, RunPrintsTheOutcome) {
  const CliResult r = run_cli({"run", corpus_file("threads_imprecise.greff")});
  EXPECT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(r.out, "\"1a2b\"\n");
}

TEST(Cli, CheckAcceptsEveryModuleMix) {
  for (const char* c : {"PPP", "PPI", "PIP", "PII", "IPP", "IPI", "IIP", "III"}) {
    const CliResult r = run_cli({"check", generated_file(std::string("combo_") + c + ".greff")});
    EXPECT_EQ(r.exit_code, 0) << c << r.err;
    EXPECT_EQ(r.out.rfind("str ! ", 0), 0u) << c << r.out;
  }
  EXPECT_EQ(run_cli({"check", corpus_file("threads_precise.greff")}).out, "str ! {}\n");
}

TEST(Cli, ExitCodes) {
  const CliResult down = run_cli({"run", corpus_file("bad_downcast.greff")});
  EXPECT_EQ(down.exit_code, 2);
  EXPECT_EQ(down.out, "error\n");
  const CliResult import = run_cli({"check", corpus_file("bad_import.greff")});
  EXPECT_EQ(import.exit_code, 1);
  EXPECT_NE(import.err.find("IncompatibleEffectImport"), std::string::npos) << import.err;
  const CliResult fuel = run_cli({"run", "--fuel", "10", corpus_file("threads_precise.greff")});
  EXPECT_EQ(fuel.exit_code, 3);
  EXPECT_EQ(fuel.out, "out of fuel\n");
  EXPECT_EQ(run_cli({"run", corpus_file("no_such_file.greff")}).exit_code, 1);
}

TEST(Cli, UsageErrors) {
  const CliResult none = run_cli({});
  EXPECT_EQ(none.exit_code, 64);
  EXPECT_NE(none.err.find("conformance"), std::string::npos);
  EXPECT_EQ(run_cli({"frobnicate"}).exit_code, 64);
  EXPECT_EQ(run_cli({"run", "--fuel", "0", corpus_file("threads_precise.greff")}).exit_code, 64);
  EXPECT_EQ(run_cli({"run"}).exit_code, 64);
  EXPECT_EQ(run_cli({"--help"}).exit_code, 0);
}

TEST(Cli, TraceGoesToStandardError) {
  const CliResult r = run_cli({"run", "--trace", corpus_file("threads_precise.greff")});
  EXPECT_EQ(r.out, "\"1a2b\"\n");
  EXPECT_NE(r.err.find("ShallowHandle"), std::string::npos);
}

TEST(Cli, ElabPrintsReadableCore) {
  const std::string file = corpus_file("threads_precise.greff");
  const CliResult r = run_cli({"elab", file});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const Elaboration e = elab_program(surface::parse_program(slurp(file)));
  EXPECT_TRUE(structurally_equal(read_term(r.out), e.term));
  EXPECT_GT(std::count(r.out.begin(), r.out.end(), '\n'), 10);
}

TEST(Cli, GradualityAndDeterminism) {
  const std::vector<std::string> args = {"graduality", corpus_file("threads_precise.greff"),
                                         "--seed", "4", "--cases", "6", "-v"};
  const CliResult a = run_cli(args);
  EXPECT_EQ(a.exit_code, 0) << a.out;
  EXPECT_NE(a.out.find("graduality: 6 holds, 0 violated, 0 inconclusive"), std::string::npos)
      << a.out;
  EXPECT_EQ(run_cli(args).out, a.out);
}

TEST(Cli, ConformanceBatchPasses) {
  const CliResult r = run_cli({"conformance", "--seed", "11"});
  EXPECT_EQ(r.exit_code, 0) << r.out;
  for (const char* suite : {"soundness", "casts-as-handlers", "retraction", "graduality"})
    EXPECT_NE(r.out.find(suite), std::string::npos) << suite;
}

}  // namespace
}  // namespace greff::testing
