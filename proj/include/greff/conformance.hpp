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

#ifndef GREFF_CONFORMANCE_HPP_
#define GREFF_CONFORMANCE_HPP_

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "greff/core.hpp"
#include "greff/eval.hpp"
#include "greff/surface.hpp"
#include "greff/types.hpp"

namespace greff::conformance {

using Rng = std::mt19937_64;

// ---- Derived cast implementations ----

// The handler that implements an effect cast on m : (eff, type).
TermPtr expand_effect_cast_as_handler(const Signature& sig, CastDir dir,
                                      const EffectType& precise,
                                      const EffectType& imprecise, TermPtr m,
                                      const ValueType& type);

// Eta-expanded function cast of the value f.
TermPtr expand_fun_cast(CastDir dir, const ValueType& precise,
                        const ValueType& imprecise, TermPtr f);

// Rewrites every effect cast in a closed, well-typed term into its handler.
TermPtr expand_effect_casts(const Signature& sig, const TermPtr& m);

// A ≤ A_h, B_l ≤ B, D_l ≤ D_h; A ⊑ D_l, A_h ⊑ D_h, B_l ⊑ D_l, B ⊑ D_h and
// D_l, D_h ⊑ D = ⌈A⌉.
struct Factorization {
  ValueType a, a_h, d_l, d_h, b_l, b, d;
};

Factorization decompose(const ValueType& a, const ValueType& b);
bool valid(const Factorization& f);

// The three subtyping-optimized casts and the one through ⌈A⌉, in that order.
std::array<TermPtr, 4> cast_factorizations(const ValueType& a,
                                           const ValueType& b, TermPtr m);

// ---- Observation ----

struct OrderVerdict {
  enum class Kind { Holds, Violated, Inconclusive };
  Kind kind = Kind::Holds;
  Outcome left, right;
  std::string reason;
};

std::string to_string(OrderVerdict::Kind k);

OrderVerdict semantic_order(const Signature& sig, const TermPtr& m,
                            const TermPtr& m2, std::size_t fuel);

// Closing contexts. Functions are applied to sampled arguments and every
// raise is answered with a sampled response. Samples depend only on the
// erased type and a salt, so programs that differ in annotations see the
// same context.
struct Harness {
  std::uint64_t seed = 0;
  // Sampled function arguments may raise operations of their latent effect.
  bool raising_arguments = false;
};

bool ground(const ValueType& t);
ValueType observed_type(const ValueType& t);
TermPtr sample_value(const Signature& sig, const ValueType& t,
                     std::uint64_t salt, const Harness& h = {});
// A closed term of type observed_type(type) at effect ∅.
TermPtr observe(const Signature& sig, const ValueType& type,
                const EffectType& eff, TermPtr m, const Harness& h = {});

// ---- Generators ----

struct GenOptions {
  int depth = 6;
  int max_effects = 3;
  // Relative weights for the riskier forms.
  int cast_weight = 2;
  int error_weight = 1;
  // Extra chance, out of 10, of raising at each effectful node.
  int raise_weight = 0;
};

// Typed random core terms over a random signature. Concrete effect types
// always use the generator's local typing of each operation.
class CoreGen {
 public:
  CoreGen(std::uint64_t seed, GenOptions options = {});

  const Signature& sig() const { return sig_; }
  const OpMap& local() const { return local_; }
  Rng& rng() { return rng_; }

  ValueType type(int depth);
  EffectType effect(bool allow_dyn = true);
  ValueType precisify(const ValueType& t);
  ValueType imprecisify(const ValueType& t);
  EffectType precisify(const EffectType& e);
  // Closed value of type t.
  TermPtr value(const ValueType& t, int depth);
  // A term of type t with effect below eff in context env.
  TermPtr term(const TypeEnv& env, const ValueType& t, const EffectType& eff,
               int depth);

 private:
  int pick(int n);
  bool chance(int percent);
  std::string fresh(const char* base);
  EffectType sub_effect(const EffectType& eff);
  TermPtr value_in(const TypeEnv& env, const ValueType& t, int depth);
  TermPtr raise_at(const TypeEnv& env, const ValueType& t,
                   const EffectType& eff, int depth);
  TermPtr handle_at(const TypeEnv& env, const ValueType& t,
                    const EffectType& eff, int depth);

  Rng rng_;
  GenOptions opt_;
  Signature sig_;
  OpMap local_;
  std::vector<std::string> ops_;
  int fresh_ = 0;
};

struct CoreProgram {
  Signature sig;
  TermPtr term;
  ValueType type;
  EffectType eff;
};

// A closed program of type bool at effect ∅.
CoreProgram generate_core_program(std::uint64_t seed, GenOptions options = {});

// A program of at most two modules whose main has type bool.
surface::Program generate_surface_program(std::uint64_t seed);

// ---- Graduality ----

struct EditSite {
  std::string where;
  SourcePos pos;
};

struct PrecisionPair {
  surface::Program precise;
  surface::Program imprecise;
  std::vector<EditSite> witness;
};

bool syntactic_precision(const surface::Program& p, const surface::Program& q);
// Replaces a nonempty random subset of effect annotations with ?.
PrecisionPair imprecisify(const surface::Program& p, std::uint64_t seed);
OrderVerdict check_graduality_pair(const PrecisionPair& pair,
                                   std::size_t fuel = 100'000,
                                   const Harness& h = {});

// ---- Property suites ----

struct CaseRecord {
  std::string suite;
  std::uint64_t seed = 0;
  std::string verdict;  // pass, fail, inconclusive, skip
  std::string detail;
  std::size_t steps_left = 0;
  std::size_t steps_right = 0;
};

struct SuiteReport {
  std::string name;
  std::size_t passed = 0;
  std::size_t failed = 0;
  std::size_t inconclusive = 0;
  std::size_t skipped = 0;
  std::vector<CaseRecord> records;

  std::size_t checked() const { return passed + failed + inconclusive; }
};

const std::vector<std::string>& suite_names();
// Runs `cases` cases seeded from `seed`. Throws std::invalid_argument on an
// unknown suite name.
SuiteReport run_suite(const std::string& name, std::uint64_t seed,
                      std::size_t cases);
std::string to_line(const CaseRecord& r);

}  // namespace greff::conformance

#endif  // GREFF_CONFORMANCE_HPP_
