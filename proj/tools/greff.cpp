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

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "greff/conformance.hpp"
#include "greff/elaborate.hpp"
#include "greff/error.hpp"
#include "greff/eval.hpp"

namespace {

using namespace greff;

enum Exit : int {
  kOk = 0,
  kStatic = 1,
  kRuntimeError = 2,
  kFuel = 3,
  kViolation = 4,
  kUsage = 64,
};

struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

surface::Program load(const std::string& path) {
  return surface::parse_program(slurp(path));
}

// Parse, elaborate and typecheck the elaborated term.
Elaboration compile(const std::string& path) {
  Elaboration e = elab_program(load(path));
  check(e.sig, {}, e.term, e.eff, e.type);
  return e;
}

int exit_for(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::Value: return kOk;
    case Outcome::Kind::Error:
    case Outcome::Kind::UncaughtRaise: return kRuntimeError;
    case Outcome::Kind::FuelExhausted: return kFuel;
  }
  return kRuntimeError;
}

// Default case counts of the full batch.
std::size_t batch_cases(const std::string& suite) {
  if (suite == "elaboration" || suite == "soundness") return 1000;
  if (suite == "casts-as-handlers") return 600;
  if (suite == "graduality") return 400;
  return 250;
}

}  // namespace

int run_command(int argc, char** argv) {
  CLI::App app{"GrEff: gradual effect handlers"};
  app.require_subcommand(1);

  std::string file;
  std::size_t fuel = 1'000'000;
  bool trace = false;
  std::uint64_t seed = 1;
  std::size_t cases = 100;
  bool verbose = false;
  std::string report;

  auto* check_cmd = app.add_subcommand("check", "Parse, elaborate and typecheck FILE");
  check_cmd->add_option("FILE", file)->required();

  auto* elab_cmd = app.add_subcommand("elab", "Print the elaborated core term of FILE");
  elab_cmd->add_option("FILE", file)->required();

  auto* run_cmd = app.add_subcommand("run", "Evaluate FILE");
  run_cmd->add_option("FILE", file)->required();
  run_cmd->add_option("--fuel", fuel, "Maximum rule firings")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--trace", trace, "Print every rule firing to stderr");

  auto* grad_cmd = app.add_subcommand(
      "graduality", "Loosen annotations of FILE and compare both versions");
  grad_cmd->add_option("FILE", file)->required();
  grad_cmd->add_option("--seed", seed);
  grad_cmd->add_option("--cases", cases)->check(CLI::PositiveNumber);
  grad_cmd->add_option("--fuel", fuel)->check(CLI::PositiveNumber);
  grad_cmd->add_flag("-v,--verbose", verbose, "Print every pair");

  auto* conf_cmd = app.add_subcommand("conformance", "Run every property suite");
  conf_cmd->add_option("--seed", seed);
  conf_cmd->add_flag("-v,--verbose", verbose, "Print every case");
  conf_cmd->add_option("--report", report, "Write every case to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (*check_cmd) {
      const Elaboration e = compile(file);
      std::cout << to_string(e.type) << " ! " << to_string(e.eff) << "\n";
      return kOk;
    }
    if (*elab_cmd) {
      const Elaboration e = compile(file);
      std::cout << pretty_term(e.term) << "\n";
      return kOk;
    }
    if (*run_cmd) {
      const Elaboration e = compile(file);
      EvalOptions opt;
      opt.fuel = fuel;
      if (trace) opt.trace = &std::cerr;
      const Outcome o = evaluate(e.sig, e.term, opt);
      std::cout << to_string(o) << "\n";
      return exit_for(o);
    }
    if (*grad_cmd) {
      const surface::Program p = load(file);
      compile(file);
      std::size_t holds = 0, violated = 0, inconclusive = 0;
      for (std::size_t i = 0; i < cases; ++i) {
        const conformance::PrecisionPair pair = conformance::imprecisify(p, seed + i);
        const auto v = conformance::check_graduality_pair(
            pair, fuel, conformance::Harness{seed + i, false});
        switch (v.kind) {
          case conformance::OrderVerdict::Kind::Holds: ++holds; break;
          case conformance::OrderVerdict::Kind::Violated: ++violated; break;
          case conformance::OrderVerdict::Kind::Inconclusive: ++inconclusive; break;
        }
        if (verbose || v.kind != conformance::OrderVerdict::Kind::Holds) {
          std::cout << fmt::format("seed={} verdict={} sites={} left={} right={} reason={}\n",
                                   seed + i, conformance::to_string(v.kind),
                                   pair.witness.size(), to_string(v.left),
                                   to_string(v.right), v.reason);
        }
      }
      std::cout << fmt::format("graduality: {} holds, {} violated, {} inconclusive\n",
                               holds, violated, inconclusive);
      return violated ? kViolation : kOk;
    }
    if (*conf_cmd) {
      std::ofstream out;
      if (!report.empty()) {
        out.open(report);
        if (!out) throw FileError("cannot write " + report);
      }
      bool failed = false;
      for (const std::string& name : conformance::suite_names()) {
        const auto r = conformance::run_suite(name, seed, batch_cases(name));
        for (const auto& c : r.records) {
          if (out.is_open()) out << conformance::to_line(c) << "\n";
          if (verbose || c.verdict == "fail") std::cout << conformance::to_line(c) << "\n";
        }
        std::cout << fmt::format("{:<18} passed {:>4}  failed {:>3}  inconclusive {:>3}  skipped {:>3}\n",
                                 name, r.passed, r.failed, r.inconclusive, r.skipped);
        failed = failed || r.failed > 0;
      }
      return failed ? kViolation : kOk;
    }
  } catch (const GreffError& e) {
    std::cerr << file << ": " << e.what() << "\n";
    return kStatic;
  } catch (const FileError& e) {
    std::cerr << e.what() << "\n";
    return kStatic;
  } catch (const StuckState& e) {
    std::cerr << "stuck: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsage;
}

int main(int argc, char** argv) { return run_command(argc, argv); }
