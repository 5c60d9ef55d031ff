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

#ifndef GREFF_EVAL_HPP_
#define GREFF_EVAL_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "greff/core.hpp"
#include "greff/types.hpp"

namespace greff {

// One evaluation-context layer. `node` is the term whose leftmost pending
// position is the hole; `value` is an operand that was already evaluated.
struct Frame {
  enum class Kind {
    AppFun, AppArg, Let, If, Raise, Handle, ValCast, EffCast,
    EnqueueQueue, EnqueueItem, CaseQueue, ConcatLeft, ConcatRight,
  };
  Kind kind;
  TermPtr node;
  TermPtr value;
};

TermPtr plug(const Frame& f, TermPtr hole);

// ε # frames.
bool apart(std::span<const Frame> frames, const std::string& op,
           const Signature& sig);

struct Outcome {
  enum class Kind { Value, Error, UncaughtRaise, FuelExhausted };
  Kind kind = Kind::Value;
  TermPtr value;
  std::string op;
  std::size_t steps = 0;

  friend bool operator==(const Outcome& a, const Outcome& b);
};

std::string to_string(const Outcome& o);
// Ground rendering of a value: true, (), "text", <fun>, [v, ...].
std::string show_value(const TermPtr& v);

// Raised on an irreducible non-terminal state; unreachable for well-typed
// closed programs.
struct StuckState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Machine {
 public:
  enum class Mode { Eval, Return, Raise };

  Machine(const Signature& sig, TermPtr program);

  // One transition. Returns the outcome once the machine halts.
  std::optional<Outcome> step();

  std::size_t rules_fired() const { return rules_; }
  Mode mode() const { return mode_; }
  const TermPtr& control() const { return control_; }
  const std::vector<Frame>& frames() const { return stack_; }
  // The current state read back as a closed term.
  TermPtr reify() const;
  // One line per fired rule.
  void set_trace(std::ostream* out) { trace_ = out; }

 private:
  std::optional<Outcome> eval_step();
  std::optional<Outcome> return_step();
  std::optional<Outcome> raise_step();
  void fire(std::string_view rule, const TermPtr& redex);
  void focus(TermPtr t) {
    mode_ = Mode::Eval;
    control_ = std::move(t);
  }
  void give(TermPtr v) {
    mode_ = Mode::Return;
    control_ = std::move(v);
  }
  void push(Frame::Kind k, const TermPtr& node, TermPtr value = nullptr) {
    stack_.push_back(Frame{k, node, std::move(value)});
  }
  Outcome halt(Outcome::Kind k, TermPtr v = nullptr, std::string op = {});
  std::string fresh() { return "%r" + std::to_string(++fresh_); }
  TermPtr plug_captured(TermPtr hole) const;
  TermPtr apply(const TermPtr& fn, const TermPtr& arg);
  TermPtr cast_value(CastDir dir, const ValueType& precise,
                     const ValueType& imprecise, const TermPtr& v);

  const Signature& sig_;
  Mode mode_ = Mode::Eval;
  TermPtr control_;
  std::vector<Frame> stack_;
  // In-flight raise.
  std::string op_;
  ValueType req_, resp_;
  std::vector<Frame> captured_;  // innermost first

  std::size_t rules_ = 0;
  std::size_t fresh_ = 0;
  std::ostream* trace_ = nullptr;
};

struct EvalOptions {
  std::size_t fuel = 1'000'000;
  std::ostream* trace = nullptr;
  // Called every `sample_every` rule firings with the live machine.
  std::size_t sample_every = 0;
  std::function<void(const Machine&)> sample;
};

Outcome evaluate(const Signature& sig, const TermPtr& program,
                 const EvalOptions& options = {});

}  // namespace greff

#endif  // GREFF_EVAL_HPP_
