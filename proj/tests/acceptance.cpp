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

// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <iostream>
#include <string>

#include <fmt/format.h>

#include "greff/conformance.hpp"
#include "greff/elaborate.hpp"
#include "greff/eval.hpp"
#include "greff/surface.hpp"
#include "support/paths.hpp"
#include "support/reference_eval.hpp"

namespace {

using namespace greff;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kSeed = 1;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool ok;
  std::string detail;
};

Verdict combos() {
  int passed = 0;
  double slowest = 0;
  std::string bad;
  for (const char* c : {"PPP", "PPI", "PIP", "PII", "IPP", "IPI", "IIP", "III"}) {
    const auto t0 = Clock::now();
    const auto r = testing::run_cli({"check", testing::generated_file(std::string("combo_") + c + ".greff")});
    const double s = seconds_since(t0);
    slowest = std::max(slowest, s);
    if (r.exit_code == 0 && s < 1.0) {
      ++passed;
    } else {
      bad += fmt::format(" {}(exit {}, {:.2f}s)", c, r.exit_code, s);
    }
  }
  return {passed == 8, fmt::format("{}/8 module mixes typecheck, slowest {:.3f}s{}", passed, slowest, bad)};
}

Verdict threads() {
  std::string detail;
  bool ok = true;
  for (const char* f : {"threads_imprecise.greff", "threads_precise.greff"}) {
    const Elaboration e = elab_program(surface::parse_program(testing::slurp(testing::corpus_file(f))));
    check(e.sig, {}, e.term, e.eff, e.type);
    EvalOptions o;
    o.fuel = 10'000;
    const Outcome out = evaluate(e.sig, e.term, o);
    const reference::Result ref = reference::evaluate(e.sig, e.term, 10'000);
    const bool good = to_string(out) == "\"1a2b\"" && out.steps < 10'000 &&
                      reference::show(ref) == to_string(out);
    ok = ok && good;
    detail += fmt::format("{}{} {} in {} steps (reference {})", detail.empty() ? "" : "; ", f,
                          to_string(out), out.steps, reference::show(ref));
  }
  return {ok, detail};
}

std::string counts(const conformance::SuiteReport& r) {
  return fmt::format("{} passed, {} failed, {} inconclusive, {} skipped", r.passed, r.failed,
                     r.inconclusive, r.skipped);
}

const conformance::CaseRecord* first_failure(const conformance::SuiteReport& r) {
  for (const auto& c : r.records)
    if (c.verdict == "fail") return &c;
  return nullptr;
}

Verdict suite(const std::string& name, std::size_t cases, std::size_t needed,
              double time_limit = 0) {
  const auto t0 = Clock::now();
  const auto r = conformance::run_suite(name, kSeed, cases);
  const double s = seconds_since(t0);
  bool ok = r.failed == 0 && r.passed >= needed;
  std::string detail = fmt::format("{}: {} in {:.2f}s", name, counts(r), s);
  if (time_limit > 0) ok = ok && s < time_limit;
  if (const auto* f = first_failure(r)) detail += "; first failure " + conformance::to_line(*f);
  return {ok, detail};
}

Verdict laws() {
  bool ok = true;
  std::string detail;
  for (const char* name : {"retraction", "functoriality", "commutation", "forwarding"}) {
    const Verdict v = suite(name, 250, 200);
    ok = ok && v.ok;
    detail += (detail.empty() ? "" : "; ") + v.detail;
  }
  return {ok, detail};
}

Verdict graduality() {
  const auto r = conformance::run_suite("graduality", kSeed, 350);
  const std::size_t checked = r.checked();
  const bool ok = r.failed == 0 && checked >= 300 && r.inconclusive * 10 < checked;
  std::string detail = fmt::format("{} precision pairs: {}", checked, counts(r));
  if (const auto* f = first_failure(r)) detail += "; first failure " + conformance::to_line(*f);
  return {ok, detail};
}

Verdict cli_errors() {
  const auto down = testing::run_cli({"run", testing::corpus_file("bad_downcast.greff")});
  const auto import = testing::run_cli({"run", testing::corpus_file("bad_import.greff")});
  return {down.exit_code == 2 && import.exit_code == 1,
          fmt::format("bad_downcast exit {} ({}), bad_import exit {}", down.exit_code,
                      down.out.empty() ? "no output" : down.out.substr(0, down.out.size() - 1),
                      import.exit_code)};
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    Verdict (*run)();
  };
  const Criterion criteria[] = {
      {1, "module mixes", combos},
      {2, "threads", threads},
      {3, "elaboration", [] { return suite("elaboration", 1000, 1000); }},
      {4, "soundness", [] { return suite("soundness", 1000, 1000, 60.0); }},
      {5, "casts as handlers", [] { return suite("casts-as-handlers", 600, 500); }},
      {6, "cast laws", laws},
      {7, "factorization", [] { return suite("factorization", 250, 200); }},
      {8, "graduality", graduality},
      {9, "cli exit codes", cli_errors},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.ok;
    std::cout << fmt::format("[{}] criterion {} {}: {}\n", v.ok ? "PASS" : "FAIL", c.number,
                             c.name, v.detail)
              << std::flush;
  }
  return failures == 0 ? 0 : 1;
}
