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

#include <map>
#include <stdexcept>

#include <fmt/format.h>

#include "greff/conformance.hpp"
#include "greff/elaborate.hpp"
#include "greff/error.hpp"

namespace greff::conformance {
namespace {

constexpr std::size_t kFuel = 200'000;

// Property cases want operations crossing the casts under test.
GenOptions property_options() {
  GenOptions opt;
  opt.raise_weight = 3;
  return opt;
}

std::uint64_t case_seed(std::uint64_t seed, std::size_t i) {
  std::uint64_t z = seed * 0x9e3779b97f4a7c15ULL + i + 1;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Outcome run(const Signature& sig, const TermPtr& m) {
  EvalOptions opt;
  opt.fuel = kFuel;
  return evaluate(sig, m, opt);
}

bool contains_eff_cast(const TermPtr& t) {
  const std::string text = print_term(t);
  return text.find("(eup ") != std::string::npos ||
         text.find("(edown ") != std::string::npos;
}

// Both terms are closed and typed at (eff, type); compares their observations.
void compare(CaseRecord& r, const Signature& sig, const ValueType& type,
             const EffectType& eff, const TermPtr& a, const TermPtr& b,
             std::uint64_t seed) {
  Harness h{seed, true};
  TermPtr oa = observe(sig, type, eff, a, h);
  TermPtr ob = observe(sig, type, eff, b, h);
  check(sig, {}, oa, EffectType::empty(), observed_type(type));
  check(sig, {}, ob, EffectType::empty(), observed_type(type));
  Outcome x = run(sig, oa);
  Outcome y = run(sig, ob);
  r.steps_left = x.steps;
  r.steps_right = y.steps;
  if (x.kind == Outcome::Kind::FuelExhausted || y.kind == Outcome::Kind::FuelExhausted) {
    r.verdict = x == y ? "pass" : "inconclusive";
  } else {
    r.verdict = x == y ? "pass" : "fail";
  }
  r.detail = fmt::format("{} vs {}", to_string(x), to_string(y));
}

void elaboration_case(CaseRecord& r) {
  const surface::Program p = generate_surface_program(r.seed);
  const std::string text = surface::print_program(p);
  const Elaboration first = elab_program(p);
  const Elaboration again = elab_program(surface::parse_program(text));
  const std::string a = print_term(first.term), b = print_term(again.term);
  if (a != b || !(first.sig == again.sig)) {
    r.verdict = "fail";
    r.detail = "elaboration differs between runs";
    return;
  }
  check(first.sig, {}, first.term, first.eff, first.type);
  r.verdict = "pass";
  r.detail = fmt::format("{} ! {}, {} bytes of core", to_string(first.type),
                         to_string(first.eff), a.size());
}

void soundness_case(CaseRecord& r) {
  const CoreProgram p = generate_core_program(r.seed);
  check(p.sig, {}, p.term, p.eff, p.type);
  std::size_t sampled = 0;
  std::string broken;
  EvalOptions opt;
  opt.fuel = kFuel;
  opt.sample_every = 1;
  opt.sample = [&](const Machine& m) {
    // ℧ synthesizes no type; the next step halts.
    if (!broken.empty() || m.control()->is<node::Err>()) return;
    ++sampled;
    try {
      check(p.sig, {}, m.reify(), p.eff, p.type);
    } catch (const GreffError& e) {
      broken = fmt::format("state {} fails preservation: {}", m.rules_fired(),
                           e.what());
    }
  };
  const Outcome o = evaluate(p.sig, p.term, opt);
  r.steps_left = o.steps;
  if (!broken.empty()) {
    r.verdict = "fail";
    r.detail = broken;
  } else if (o.kind == Outcome::Kind::UncaughtRaise) {
    r.verdict = "fail";
    r.detail = "uncaught " + o.op;
  } else {
    r.verdict = o.kind == Outcome::Kind::FuelExhausted ? "inconclusive" : "pass";
    r.detail = fmt::format("{}; {} states re-typed", to_string(o), sampled);
  }
}

void handlers_case(CaseRecord& r) {
  if (r.seed % 2 == 1) {
    // A cast at the root of a raising term, so operations cross it.
    for (int attempt = 0;; ++attempt) {
      CoreGen g(case_seed(r.seed, attempt), property_options());
      const ValueType a = g.type(1);
      const EffectType s = g.effect(false), dyn = EffectType::dyn();
      const bool up = g.rng()() % 2;
      const TermPtr body = g.term({}, a, up ? s : dyn, 3);
      if (attempt < 16 && (effect_names(s, g.sig()).empty() ||
                           print_term(body).find("(raise ") == std::string::npos))
        continue;
      const TermPtr m = up ? core::eff_up(s, dyn, body) : core::eff_down(s, dyn, body);
      const TermPtr expanded = expand_effect_casts(g.sig(), m);
      compare(r, g.sig(), a, up ? dyn : s, m, expanded, r.seed);
      return;
    }
  }
  GenOptions opt = property_options();
  opt.cast_weight = 4;
  for (int attempt = 0; attempt < 32; ++attempt) {
    const CoreProgram p = generate_core_program(case_seed(r.seed, attempt), opt);
    if (!contains_eff_cast(p.term)) continue;
    const TermPtr expanded = expand_effect_casts(p.sig, p.term);
    check(p.sig, {}, expanded, p.eff, p.type);
    const Outcome x = run(p.sig, p.term);
    const Outcome y = run(p.sig, expanded);
    r.steps_left = x.steps;
    r.steps_right = y.steps;
    r.verdict = x == y ? "pass" : "fail";
    r.detail = fmt::format("{} vs {}", to_string(x), to_string(y));
    return;
  }
  r.verdict = "skip";
  r.detail = "no effect cast generated";
}

EffectType concrete_effect(CoreGen& g) { return g.effect(false); }

void retraction_case(CaseRecord& r) {
  CoreGen g(r.seed, property_options());
  const auto& sig = g.sig();
  if (r.seed % 2 == 0) {
    const ValueType a = g.type(2);
    const ValueType b = g.imprecisify(a);
    const TermPtr v = g.value(a, 3);
    compare(r, sig, a, EffectType::empty(),
            core::val_down(a, b, core::val_up(a, b, v)), v, r.seed);
    r.detail = fmt::format("{} ⊑ {}: {}", to_string(a), to_string(b), r.detail);
  } else {
    const ValueType a = g.type(1);
    const EffectType s = concrete_effect(g);
    const TermPtr m = g.term({}, a, s, 3);
    const EffectType dyn = EffectType::dyn();
    compare(r, sig, a, s, core::eff_down(s, dyn, core::eff_up(s, dyn, m)), m,
            r.seed);
    r.detail = fmt::format("{} ⊑ ?: {}", to_string(s), r.detail);
  }
}

void functoriality_case(CaseRecord& r) {
  CoreGen g(r.seed, property_options());
  const auto& sig = g.sig();
  using namespace core;
  switch (r.seed % 3) {
    case 0: {
      const ValueType a = g.type(2), b = g.imprecisify(a), c = g.imprecisify(b);
      const TermPtr v = g.value(a, 3);
      compare(r, sig, c, EffectType::empty(), val_up(a, c, v),
              val_up(b, c, val_up(a, b, v)), r.seed);
      break;
    }
    case 1: {
      const ValueType a = g.type(2), b = g.imprecisify(a), c = g.imprecisify(b);
      const TermPtr v = g.value(c, 3);
      compare(r, sig, a, EffectType::empty(), val_down(a, c, v),
              val_down(a, b, val_down(b, c, v)), r.seed);
      break;
    }
    default: {
      const ValueType a = g.type(1);
      const EffectType s = concrete_effect(g), dyn = EffectType::dyn();
      if (g.rng()() % 2) {
        const TermPtr m = g.term({}, a, s, 3);
        compare(r, sig, a, dyn, eff_up(s, dyn, m),
                eff_up(s, dyn, eff_up(s, s, m)), r.seed);
      } else {
        const TermPtr m = g.term({}, a, dyn, 3);
        compare(r, sig, a, s, eff_down(s, dyn, m),
                eff_down(s, s, eff_down(s, dyn, m)), r.seed);
      }
      break;
    }
  }
}

void commutation_case(CaseRecord& r) {
  CoreGen g(r.seed, property_options());
  const auto& sig = g.sig();
  using namespace core;
  const ValueType a = g.type(2), b = g.imprecisify(a);
  const EffectType s = concrete_effect(g), dyn = EffectType::dyn();
  if (r.seed % 2 == 0) {
    const TermPtr m = g.term({}, a, s, 3);
    compare(r, sig, b, dyn, val_up(a, b, eff_up(s, dyn, m)),
            eff_up(s, dyn, val_up(a, b, m)), r.seed);
  } else {
    const TermPtr m = g.term({}, b, dyn, 3);
    compare(r, sig, a, s, val_down(a, b, eff_down(s, dyn, m)),
            eff_down(s, dyn, val_down(a, b, m)), r.seed);
  }
}

void forwarding_case(CaseRecord& r) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    CoreGen g(case_seed(r.seed, attempt), property_options());
    const auto& sig = g.sig();
    const bool dyn = g.rng()() % 3 == 0;
    const EffectType s = dyn ? EffectType::dyn() : concrete_effect(g);
    const std::vector<std::string> ops = effect_names(s, sig);
    if (ops.empty()) continue;
    const ValueType a = g.type(1), b = g.type(1);
    node::Handle h;
    h.kind = HandlerKind::Deep;
    h.scrutinee = g.term({}, b, s, 3);
    h.ret_var = "r";
    h.ret_body = g.term({{"r", b}}, a, s, 2);
    h.result_eff = s;
    h.result_type = a;
    h.scrut_eff = s;
    h.scrut_type = b;
    const std::size_t forwarded = g.rng()() % ops.size();
    for (std::size_t i = 0; i < ops.size(); ++i) {
      if (i == forwarded || g.rng()() % 2) continue;
      const OpSig e = *lookup_op(s, sig, ops[i]);
      node::Clause c{ops[i], "p", "k", e.req, e.resp, nullptr};
      TypeEnv env = {{"p", e.req}, {"k", ValueType::arrow(e.resp, s, a)}};
      c.body = g.rng()() % 3 ? core::app(core::var("k"), g.term(env, e.resp, s, 2))
                             : g.term(env, a, s, 2);
      h.clauses.push_back(std::move(c));
    }
    const TermPtr plain = core::handle(h);
    const std::string& op = ops[forwarded];
    const OpSig e = *lookup_op(s, sig, op);
    h.clauses.push_back(node::Clause{
        op, "p", "k", e.req, e.resp,
        core::app(core::var("k"),
                  core::raise(op, e.req, e.resp, core::var("p")))});
    const TermPtr forwarding = core::handle(h);
    compare(r, sig, a, s, plain, forwarding, r.seed);
    r.detail = fmt::format("forwarding {}: {}", op, r.detail);
    return;
  }
  r.verdict = "skip";
  r.detail = "no operation to forward";
}

// A type B with A ≲ B built by loosening, widening and narrowing.
ValueType relative(CoreGen& g, const ValueType& t, bool positive);

EffectType relative(CoreGen& g, const EffectType& e, bool positive) {
  const auto roll = g.rng()() % 4;
  if (roll == 0) return EffectType::dyn();
  if (e.is_dyn()) return roll == 1 ? g.effect(false) : e;
  OpMap ops = e.ops();
  for (const auto& [name, sig] : g.local()) {
    if (g.rng()() % 3) continue;
    if (positive) {
      ops.emplace(name, sig);
    } else {
      ops.erase(name);
    }
  }
  return EffectType::concrete(std::move(ops));
}

ValueType relative(CoreGen& g, const ValueType& t, bool positive) {
  switch (t.kind()) {
    case ValueType::Kind::Queue: return ValueType::queue(relative(g, t.elem(), positive));
    case ValueType::Kind::Arrow:
      return ValueType::arrow(relative(g, t.dom(), !positive),
                              relative(g, t.eff(), positive),
                              relative(g, t.cod(), positive));
    default: return t;
  }
}

void factorization_case(CaseRecord& r) {
  CoreGen g(r.seed, property_options());
  const auto& sig = g.sig();
  const ValueType a = g.type(2);
  const ValueType b = relative(g, a, true);
  if (!gradual_subtype(a, b)) {
    r.verdict = "fail";
    r.detail = fmt::format("generator produced {} not ≲ {}", to_string(a), to_string(b));
    return;
  }
  const EffectType s = g.effect(true);
  const TermPtr m = g.rng()() % 2 ? g.value(a, 3) : g.term({}, a, s, 3);
  const auto casts = cast_factorizations(a, b, m);
  Harness h{r.seed, true};
  std::vector<Outcome> outs;
  for (const TermPtr& c : casts) {
    check(sig, {}, c, s, b);
    TermPtr o = observe(sig, b, s, c, h);
    outs.push_back(run(sig, o));
  }
  r.steps_left = outs[0].steps;
  r.steps_right = outs[3].steps;
  bool same = true;
  for (const Outcome& o : outs) same = same && o == outs[0];
  bool fuel = false;
  for (const Outcome& o : outs) fuel = fuel || o.kind == Outcome::Kind::FuelExhausted;
  r.verdict = same ? "pass" : fuel ? "inconclusive" : "fail";
  r.detail = fmt::format("{} ≲ {}: {} | {} | {} | {}", to_string(a), to_string(b),
                         to_string(outs[0]), to_string(outs[1]),
                         to_string(outs[2]), to_string(outs[3]));
}

void fun_cast_case(CaseRecord& r) {
  CoreGen g(r.seed, property_options());
  const auto& sig = g.sig();
  ValueType a = g.type(2);
  for (int i = 0; i < 8 && !a.is_arrow(); ++i) a = g.type(2);
  if (!a.is_arrow()) {
    r.verdict = "skip";
    r.detail = "no arrow type generated";
    return;
  }
  const ValueType b = g.imprecisify(a);
  if (r.seed % 2 == 0) {
    const TermPtr v = g.value(a, 3);
    compare(r, sig, b, EffectType::empty(), core::val_up(a, b, v),
            expand_fun_cast(CastDir::Up, a, b, v), r.seed);
  } else {
    const TermPtr v = g.value(b, 3);
    compare(r, sig, a, EffectType::empty(), core::val_down(a, b, v),
            expand_fun_cast(CastDir::Down, a, b, v), r.seed);
  }
}

void graduality_case(CaseRecord& r) {
  const surface::Program p = generate_surface_program(r.seed);
  PrecisionPair pair;
  try {
    pair = imprecisify(p, r.seed);
  } catch (const GreffError&) {
    r.verdict = "skip";
    r.detail = "no annotation to loosen";
    return;
  }
  if (!syntactic_precision(pair.precise, pair.imprecise)) {
    r.verdict = "fail";
    r.detail = "imprecisify broke syntactic precision";
    return;
  }
  const OrderVerdict v = check_graduality_pair(pair, kFuel, Harness{r.seed, false});
  r.steps_left = v.left.steps;
  r.steps_right = v.right.steps;
  switch (v.kind) {
    case OrderVerdict::Kind::Holds: r.verdict = "pass"; break;
    case OrderVerdict::Kind::Violated: r.verdict = "fail"; break;
    case OrderVerdict::Kind::Inconclusive: r.verdict = "inconclusive"; break;
  }
  r.detail = fmt::format("{} sites loosened; {}", pair.witness.size(), v.reason);
}

using CaseFn = void (*)(CaseRecord&);

const std::map<std::string, CaseFn>& registry() {
  static const std::map<std::string, CaseFn> suites = {
      {"elaboration", elaboration_case},
      {"soundness", soundness_case},
      {"casts-as-handlers", handlers_case},
      {"retraction", retraction_case},
      {"functoriality", functoriality_case},
      {"commutation", commutation_case},
      {"forwarding", forwarding_case},
      {"factorization", factorization_case},
      {"fun-cast", fun_cast_case},
      {"graduality", graduality_case},
  };
  return suites;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {
      "elaboration",   "soundness",   "casts-as-handlers", "retraction",
      "functoriality", "commutation", "forwarding",        "factorization",
      "fun-cast",      "graduality"};
  return names;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed,
                      std::size_t cases) {
  auto it = registry().find(name);
  if (it == registry().end()) throw std::invalid_argument("unknown suite " + name);
  SuiteReport report;
  report.name = name;
  for (std::size_t i = 0; i < cases; ++i) {
    CaseRecord r;
    r.suite = name;
    r.seed = seed + i;
    try {
      it->second(r);
    } catch (const std::exception& e) {
      r.verdict = "fail";
      r.detail = std::string("exception: ") + e.what();
    }
    if (r.verdict == "pass") {
      ++report.passed;
    } else if (r.verdict == "inconclusive") {
      ++report.inconclusive;
    } else if (r.verdict == "skip") {
      ++report.skipped;
    } else {
      ++report.failed;
    }
    report.records.push_back(std::move(r));
  }
  return report;
}

std::string to_line(const CaseRecord& r) {
  return fmt::format("suite={} seed={} verdict={} steps={}/{} detail={}", r.suite,
                     r.seed, r.verdict, r.steps_left, r.steps_right,
                     quote(r.detail));
}

}  // namespace greff::conformance
