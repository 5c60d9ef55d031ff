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


#include <fmt/format.h>

#include "greff/conformance.hpp"

namespace greff::conformance {
namespace {

// Names restart at each outermost call, so output depends only on inputs.
thread_local unsigned long counter = 0;
thread_local int depth = 0;

struct NameScope {
  NameScope() {
    if (depth++ == 0) counter = 0;
  }
  ~NameScope() { --depth; }
  NameScope(const NameScope&) = delete;
  NameScope& operator=(const NameScope&) = delete;
};

std::string fresh(const char* base) {
  return fmt::format("%{}{}", base, ++counter);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over the combined words.
  std::uint64_t z = a * 0x9e3779b97f4a7c15ULL + b + 0x632be59bd9b4e019ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t a, const std::string& s) {
  return mix(a, std::hash<std::string>{}(s));
}

TermPtr observe_at(const Signature& sig, const ValueType& type,
                   const EffectType& eff, TermPtr m, std::uint64_t salt,
                   const Harness& h);

TermPtr observe_value(const Signature& sig, const ValueType& type,
                      const std::string& x, std::uint64_t salt,
                      const Harness& h) {
  if (ground(type)) return core::var(x);
  if (type.is_arrow()) {
    TermPtr arg = sample_value(sig, type.dom(), mix(salt, 1), h);
    return observe_at(sig, type.cod(), type.eff(),
                      core::app(core::var(x), std::move(arg)), mix(salt, 2), h);
  }
  const std::string hd = fresh("h"), tl = fresh("t");
  return core::case_queue(
      core::var(x),
      sample_value(sig, observed_type(type.elem()), mix(salt, 3), h), hd, tl,
      observe_value(sig, type.elem(), hd, mix(salt, 4), h));
}

TermPtr observe_at(const Signature& sig, const ValueType& type,
                   const EffectType& eff, TermPtr m, std::uint64_t salt,
                   const Harness& h) {
  node::Handle hd;
  hd.kind = HandlerKind::Deep;
  hd.scrutinee = std::move(m);
  hd.ret_var = fresh("r");
  hd.ret_body = observe_value(sig, type, hd.ret_var, salt, h);
  hd.result_eff = EffectType::empty();
  hd.result_type = observed_type(type);
  hd.scrut_eff = eff;
  hd.scrut_type = type;
  for (const std::string& op : effect_names(eff, sig)) {
    const OpSig s = *lookup_op(eff, sig, op);
    node::Clause c;
    c.op = op;
    c.payload = fresh("p");
    c.cont = fresh("k");
    c.req = s.req;
    c.resp = s.resp;
    c.body = core::app(core::var(c.cont),
                       sample_value(sig, s.resp, mix(h.seed, op), h));
    hd.clauses.push_back(std::move(c));
  }
  return core::handle(std::move(hd));
}

}  // namespace

std::string to_string(OrderVerdict::Kind k) {
  switch (k) {
    case OrderVerdict::Kind::Holds: return "holds";
    case OrderVerdict::Kind::Violated: return "violated";
    case OrderVerdict::Kind::Inconclusive: return "inconclusive";
  }
  return "?";
}

OrderVerdict semantic_order(const Signature& sig, const TermPtr& m,
                            const TermPtr& m2, std::size_t fuel) {
  EvalOptions opt;
  opt.fuel = fuel;
  OrderVerdict v;
  v.left = evaluate(sig, m, opt);
  if (v.left.kind == Outcome::Kind::Error) {
    v.reason = "left errors";
    return v;
  }
  v.right = evaluate(sig, m2, opt);
  const bool lf = v.left.kind == Outcome::Kind::FuelExhausted;
  const bool rf = v.right.kind == Outcome::Kind::FuelExhausted;
  if (lf && rf) {
    v.reason = "both out of fuel";
  } else if (lf || rf) {
    v.kind = OrderVerdict::Kind::Inconclusive;
    v.reason = lf ? "fuel-left" : "fuel-right";
  } else if (v.left == v.right) {
    v.reason = "same outcome";
  } else {
    v.kind = OrderVerdict::Kind::Violated;
    v.reason = fmt::format("{} vs {}", to_string(v.left), to_string(v.right));
  }
  return v;
}

bool ground(const ValueType& t) {
  switch (t.kind()) {
    case ValueType::Kind::Arrow: return false;
    case ValueType::Kind::Queue: return ground(t.elem());
    default: return true;
  }
}

ValueType observed_type(const ValueType& t) {
  if (ground(t)) return t;
  if (t.is_arrow()) return observed_type(t.cod());
  return observed_type(t.elem());
}

TermPtr sample_value(const Signature& sig, const ValueType& t,
                     std::uint64_t salt, const Harness& h) {
  NameScope names;
  const std::uint64_t r = mix(h.seed, salt);
  switch (t.kind()) {
    case ValueType::Kind::Bool: return core::boolean(r & 1);
    case ValueType::Kind::Unit: return core::unit();
    case ValueType::Kind::Str: {
      static const char* const words[] = {"", "a", "b", "xy"};
      return core::str(words[r % 4]);
    }
    case ValueType::Kind::Queue: {
      TermPtr q = core::empty_queue(t.elem());
      const int n = static_cast<int>(r % 3);
      for (int i = 0; i < n; ++i)
        q = core::enqueue(q, sample_value(sig, t.elem(), mix(salt, 10 + i), h));
      return q;
    }
    case ValueType::Kind::Arrow: {
      const std::string x = fresh("s");
      TermPtr body = sample_value(sig, t.cod(), mix(salt, 20), h);
      if (h.raising_arguments && (r >> 8) % 2 == 0) {
        std::vector<std::string> ops = effect_names(t.eff(), sig);
        if (!ops.empty()) {
          const std::string& op = ops[(r >> 16) % ops.size()];
          const OpSig s = *lookup_op(t.eff(), sig, op);
          body = core::let(
              fresh("u"),
              core::raise(op, s.req, s.resp,
                          sample_value(sig, s.req, mix(salt, 21), h)),
              body);
        }
      }
      return core::lambda(x, t.dom(), t.eff(), t.cod(), std::move(body));
    }
  }
  return core::unit();
}

TermPtr observe(const Signature& sig, const ValueType& type,
                const EffectType& eff, TermPtr m, const Harness& h) {
  NameScope names;
  return observe_at(sig, type, eff, std::move(m), mix(h.seed, 99), h);
}

}  // namespace greff::conformance
