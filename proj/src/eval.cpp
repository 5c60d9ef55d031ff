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

#include "greff/eval.hpp"

#include <fmt/format.h>

#include <utility>

namespace greff {
namespace {

TermPtr make(Term::Node n) { return std::make_shared<const Term>(Term{std::move(n)}); }

std::string snippet(const TermPtr& t) {
  std::string s = print_term(t);
  if (s.size() > 72) s = s.substr(0, 69) + "...";
  return s;
}

const ValueType& queue_elem(const TermPtr& q) {
  if (auto* e = q->as<node::EmptyQueue>()) return e->elem;
  return q->as<node::QueueLit>()->elem;
}

std::vector<TermPtr> queue_items(const TermPtr& q) {
  if (auto* l = q->as<node::QueueLit>()) return l->items;
  return {};
}

}  // namespace

TermPtr plug(const Frame& f, TermPtr hole) {
  const Term& n = *f.node;
  switch (f.kind) {
    case Frame::Kind::AppFun:
      return make(node::App{std::move(hole), n.as<node::App>()->arg});
    case Frame::Kind::AppArg:
      return make(node::App{f.value, std::move(hole)});
    case Frame::Kind::Let: {
      auto l = *n.as<node::Let>();
      l.bound = std::move(hole);
      return make(std::move(l));
    }
    case Frame::Kind::If: {
      auto i = *n.as<node::If>();
      i.cond = std::move(hole);
      return make(std::move(i));
    }
    case Frame::Kind::Raise: {
      auto r = *n.as<node::Raise>();
      r.arg = std::move(hole);
      return make(std::move(r));
    }
    case Frame::Kind::Handle: {
      auto h = *n.as<node::Handle>();
      h.scrutinee = std::move(hole);
      return make(std::move(h));
    }
    case Frame::Kind::ValCast: {
      auto c = *n.as<node::ValCast>();
      c.body = std::move(hole);
      return make(std::move(c));
    }
    case Frame::Kind::EffCast: {
      auto c = *n.as<node::EffCast>();
      c.body = std::move(hole);
      return make(std::move(c));
    }
    case Frame::Kind::EnqueueQueue:
      return make(node::Enqueue{std::move(hole), n.as<node::Enqueue>()->item});
    case Frame::Kind::EnqueueItem:
      return make(node::Enqueue{f.value, std::move(hole)});
    case Frame::Kind::CaseQueue: {
      auto c = *n.as<node::CaseQueue>();
      c.scrutinee = std::move(hole);
      return make(std::move(c));
    }
    case Frame::Kind::ConcatLeft:
      return make(node::Concat{std::move(hole), n.as<node::Concat>()->rhs});
    case Frame::Kind::ConcatRight:
      return make(node::Concat{f.value, std::move(hole)});
  }
  return hole;
}

namespace {

bool frame_apart(const Frame& f, const std::string& op, const Signature& sig) {
  if (f.kind == Frame::Kind::Handle)
    return f.node->as<node::Handle>()->find(op) == nullptr;
  if (f.kind == Frame::Kind::EffCast) {
    const auto& c = *f.node->as<node::EffCast>();
    if (c.dir == CastDir::Up)
      return !effect_mentions(c.precise, sig, op) &&
             !effect_mentions(c.imprecise, sig, op);
    return !effect_mentions(c.imprecise, sig, op);
  }
  return true;
}

}  // namespace

bool apart(std::span<const Frame> frames, const std::string& op,
           const Signature& sig) {
  for (const Frame& f : frames)
    if (!frame_apart(f, op, sig)) return false;
  return true;
}

bool operator==(const Outcome& a, const Outcome& b) {
  if (a.kind != b.kind || a.op != b.op) return false;
  if (!a.value || !b.value) return !a.value && !b.value;
  return structurally_equal(a.value, b.value);
}

std::string show_value(const TermPtr& v) {
  if (auto* b = v->as<node::BoolLit>()) return b->value ? "true" : "false";
  if (v->is<node::UnitLit>()) return "()";
  if (auto* s = v->as<node::StrLit>()) return fmt::format("\"{}\"", s->value);
  if (v->is<node::EmptyQueue>()) return "[]";
  if (auto* q = v->as<node::QueueLit>()) {
    std::string out = "[";
    for (std::size_t i = 0; i < q->items.size(); ++i) {
      if (i) out += ", ";
      out += show_value(q->items[i]);
    }
    return out + "]";
  }
  if (v->is<node::Lambda>() || v->is<node::ValCast>()) return "<fun>";
  return print_term(v);
}

std::string to_string(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::Value: return show_value(o.value);
    case Outcome::Kind::Error: return "error";
    case Outcome::Kind::UncaughtRaise: return "uncaught " + o.op;
    case Outcome::Kind::FuelExhausted: return "out of fuel";
  }
  return "?";
}

Machine::Machine(const Signature& sig, TermPtr program)
    : sig_(sig), control_(std::move(program)) {}

void Machine::fire(std::string_view rule, const TermPtr& redex) {
  ++rules_;
  if (trace_) *trace_ << fmt::format("{:>6} {:<14} {}\n", rules_, rule, snippet(redex));
}

Outcome Machine::halt(Outcome::Kind k, TermPtr v, std::string op) {
  return Outcome{k, std::move(v), std::move(op), rules_};
}

TermPtr Machine::plug_captured(TermPtr hole) const {
  for (const Frame& f : captured_) hole = plug(f, std::move(hole));
  return hole;
}

TermPtr Machine::reify() const {
  TermPtr t = control_;
  if (mode_ == Mode::Raise)
    t = plug_captured(make(node::Raise{op_, req_, resp_, control_}));
  for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) t = plug(*it, t);
  return t;
}

std::optional<Outcome> Machine::step() {
  switch (mode_) {
    case Mode::Eval: return eval_step();
    case Mode::Return: return return_step();
    case Mode::Raise: return raise_step();
  }
  return std::nullopt;
}

std::optional<Outcome> Machine::eval_step() {
  const TermPtr t = control_;
  if (is_value(t)) {
    give(t);
    return std::nullopt;
  }
  using K = Frame::Kind;
  const Term& n = *t;
  if (n.is<node::Err>()) {
    fire("Err", t);
    return halt(Outcome::Kind::Error);
  }
  if (auto* a = n.as<node::App>()) {
    push(K::AppFun, t);
    focus(a->fn);
  } else if (auto* l = n.as<node::Let>()) {
    push(K::Let, t);
    focus(l->bound);
  } else if (auto* i = n.as<node::If>()) {
    push(K::If, t);
    focus(i->cond);
  } else if (auto* r = n.as<node::Raise>()) {
    push(K::Raise, t);
    focus(r->arg);
  } else if (auto* h = n.as<node::Handle>()) {
    push(K::Handle, t);
    focus(h->scrutinee);
  } else if (auto* c = n.as<node::ValCast>()) {
    push(K::ValCast, t);
    focus(c->body);
  } else if (auto* c = n.as<node::EffCast>()) {
    push(K::EffCast, t);
    focus(c->body);
  } else if (auto* f = n.as<node::Fix>()) {
    fire("Fix", t);
    focus(substitute(f->body, f->name, t));
  } else if (auto* e = n.as<node::Enqueue>()) {
    push(K::EnqueueQueue, t);
    focus(e->queue);
  } else if (auto* c = n.as<node::CaseQueue>()) {
    push(K::CaseQueue, t);
    focus(c->scrutinee);
  } else if (auto* c = n.as<node::Concat>()) {
    push(K::ConcatLeft, t);
    focus(c->lhs);
  } else {
    throw StuckState("stuck on " + snippet(t));
  }
  return std::nullopt;
}

TermPtr Machine::cast_value(CastDir dir, const ValueType& precise,
                            const ValueType& imprecise, const TermPtr& v) {
  switch (precise.kind()) {
    case ValueType::Kind::Arrow:
      return make(node::ValCast{dir, precise, imprecise, v});
    case ValueType::Kind::Queue: {
      const ValueType& target = dir == CastDir::Up ? imprecise : precise;
      std::vector<TermPtr> items = queue_items(v);
      if (items.empty()) return make(node::EmptyQueue{target.elem()});
      for (TermPtr& i : items)
        i = cast_value(dir, precise.elem(), imprecise.elem(), i);
      return make(node::QueueLit{target.elem(), std::move(items)});
    }
    default:
      return v;
  }
}

TermPtr Machine::apply(const TermPtr& fn, const TermPtr& arg) {
  const TermPtr redex = make(node::App{fn, arg});
  if (auto* l = fn->as<node::Lambda>()) {
    fire("Lam", redex);
    return substitute(l->body, l->param, arg);
  }
  if (auto* c = fn->as<node::ValCast>(); c && c->precise.is_arrow()) {
    const ValueType& p = c->precise;
    const ValueType& i = c->imprecise;
    if (c->dir == CastDir::Up) {
      fire("FunUpCast", redex);
      TermPtr call = make(node::App{
          c->body, make(node::ValCast{CastDir::Down, p.dom(), i.dom(), arg})});
      return make(node::ValCast{
          CastDir::Up, p.cod(), i.cod(),
          make(node::EffCast{CastDir::Up, p.eff(), i.eff(), call})});
    }
    fire("FunDnCast", redex);
    TermPtr call = make(node::App{
        c->body, make(node::ValCast{CastDir::Up, p.dom(), i.dom(), arg})});
    return make(node::ValCast{
        CastDir::Down, p.cod(), i.cod(),
        make(node::EffCast{CastDir::Down, p.eff(), i.eff(), call})});
  }
  throw StuckState("applying a non-function " + snippet(fn));
}

std::optional<Outcome> Machine::return_step() {
  if (stack_.empty()) return halt(Outcome::Kind::Value, control_);
  const TermPtr v = control_;
  const Frame f = std::move(stack_.back());
  stack_.pop_back();
  const Term& n = *f.node;
  using K = Frame::Kind;
  switch (f.kind) {
    case K::AppFun:
      push(K::AppArg, f.node, v);
      focus(n.as<node::App>()->arg);
      break;
    case K::AppArg:
      focus(apply(f.value, v));
      break;
    case K::Let: {
      auto* l = n.as<node::Let>();
      fire("Let", plug(f, v));
      focus(substitute(l->body, l->name, v));
      break;
    }
    case K::If: {
      auto* i = n.as<node::If>();
      auto* b = v->as<node::BoolLit>();
      if (!b) throw StuckState("if on " + snippet(v));
      fire(b->value ? "IfTrue" : "IfFalse", plug(f, v));
      focus(b->value ? i->then_branch : i->else_branch);
      break;
    }
    case K::Raise: {
      auto* r = n.as<node::Raise>();
      mode_ = Mode::Raise;
      control_ = v;
      op_ = r->op;
      req_ = r->req;
      resp_ = r->resp;
      captured_.clear();
      break;
    }
    case K::Handle: {
      auto* h = n.as<node::Handle>();
      fire("HandleVal", plug(f, v));
      focus(substitute(h->ret_body, h->ret_var, v));
      break;
    }
    case K::ValCast: {
      auto* c = n.as<node::ValCast>();
      switch (c->precise.kind()) {
        case ValueType::Kind::Arrow:
          give(make(node::ValCast{c->dir, c->precise, c->imprecise, v}));
          return std::nullopt;
        case ValueType::Kind::Queue:
          fire("QueueCast", plug(f, v));
          break;
        case ValueType::Kind::Bool:
          fire("BoolUpDnCast", plug(f, v));
          break;
        default:
          fire("BaseUpDnCast", plug(f, v));
          break;
      }
      give(cast_value(c->dir, c->precise, c->imprecise, v));
      break;
    }
    case K::EffCast: {
      auto* c = n.as<node::EffCast>();
      fire(c->dir == CastDir::Up ? "EffUpCastVal" : "EffDnCastVal", plug(f, v));
      give(v);
      break;
    }
    case K::EnqueueQueue:
      push(K::EnqueueItem, f.node, v);
      focus(n.as<node::Enqueue>()->item);
      break;
    case K::EnqueueItem: {
      fire("Enqueue", plug(f, v));
      std::vector<TermPtr> items = queue_items(f.value);
      items.push_back(v);
      give(make(node::QueueLit{queue_elem(f.value), std::move(items)}));
      break;
    }
    case K::CaseQueue: {
      auto* c = n.as<node::CaseQueue>();
      std::vector<TermPtr> items = queue_items(v);
      if (items.empty()) {
        fire("CaseEmpty", plug(f, v));
        focus(c->empty_branch);
        break;
      }
      fire("CaseDequeue", plug(f, v));
      TermPtr head = items.front();
      items.erase(items.begin());
      TermPtr tail = items.empty()
                         ? make(node::EmptyQueue{queue_elem(v)})
                         : make(node::QueueLit{queue_elem(v), std::move(items)});
      TermPtr body = c->cons_branch;
      // The tail binder shadows a same-named head.
      body = substitute(body, c->tail, tail);
      if (c->head != c->tail) body = substitute(body, c->head, head);
      focus(body);
      break;
    }
    case K::ConcatLeft:
      push(K::ConcatRight, f.node, v);
      focus(n.as<node::Concat>()->rhs);
      break;
    case K::ConcatRight: {
      fire("Concat", plug(f, v));
      auto* a = f.value->as<node::StrLit>();
      auto* b = v->as<node::StrLit>();
      if (!a || !b) throw StuckState("concat on non-strings");
      give(make(node::StrLit{a->value + b->value}));
      break;
    }
  }
  return std::nullopt;
}

std::optional<Outcome> Machine::raise_step() {
  if (stack_.empty())
    return halt(Outcome::Kind::UncaughtRaise, control_, op_);
  const TermPtr payload = control_;
  Frame f = std::move(stack_.back());
  stack_.pop_back();
  if (frame_apart(f, op_, sig_)) {
    captured_.push_back(std::move(f));
    return std::nullopt;
  }
  const TermPtr redex =
      plug(f, plug_captured(make(node::Raise{op_, req_, resp_, payload})));
  if (f.kind == Frame::Kind::Handle) {
    const auto& h = *f.node->as<node::Handle>();
    const node::Clause& cl = *h.find(op_);
    const std::string y = fresh();
    TermPtr resumed = plug_captured(make(node::Var{y}));
    TermPtr k;
    if (h.kind == HandlerKind::Deep) {
      fire("Handle", redex);
      node::Handle again = h;
      again.scrutinee = std::move(resumed);
      k = make(node::Lambda{y, cl.resp, h.result_eff, h.result_type,
                            make(std::move(again))});
    } else {
      fire("ShallowHandle", redex);
      k = make(node::Lambda{y, cl.resp, h.scrut_eff, h.scrut_type,
                            std::move(resumed)});
    }
    TermPtr body = cl.body;
    body = substitute(body, cl.cont, k);
    if (cl.cont != cl.payload) body = substitute(body, cl.payload, payload);
    captured_.clear();
    focus(std::move(body));
    return std::nullopt;
  }
  const auto& c = *f.node->as<node::EffCast>();
  auto src = lookup_op(c.precise, sig_, op_);
  auto tgt = lookup_op(c.imprecise, sig_, op_);
  if (c.dir == CastDir::Up) {
    if (!src || !tgt) throw StuckState("effect upcast without " + op_);
    fire("EffUpCast", redex);
    const std::string x = fresh();
    TermPtr reraise = make(node::ValCast{
        CastDir::Down, src->resp, tgt->resp,
        make(node::Raise{op_, tgt->req, tgt->resp,
                         make(node::ValCast{CastDir::Up, src->req, tgt->req,
                                            payload})})});
    TermPtr rest = make(node::EffCast{CastDir::Up, c.precise, c.imprecise,
                                      plug_captured(make(node::Var{x}))});
    captured_.clear();
    focus(make(node::Let{x, std::move(reraise), std::move(rest)}));
    return std::nullopt;
  }
  if (!src) {
    fire("BadEffDnCast", redex);
    return halt(Outcome::Kind::Error);
  }
  fire("GoodEffDnCast", redex);
  const std::string x = fresh();
  TermPtr reraise = make(node::ValCast{
      CastDir::Up, src->resp, tgt->resp,
      make(node::Raise{op_, src->req, src->resp,
                       make(node::ValCast{CastDir::Down, src->req, tgt->req,
                                          payload})})});
  TermPtr rest = make(node::EffCast{CastDir::Down, c.precise, c.imprecise,
                                    plug_captured(make(node::Var{x}))});
  captured_.clear();
  focus(make(node::Let{x, std::move(reraise), std::move(rest)}));
  return std::nullopt;
}

Outcome evaluate(const Signature& sig, const TermPtr& program,
                 const EvalOptions& options) {
  Machine m(sig, program);
  m.set_trace(options.trace);
  std::size_t next_sample = options.sample_every;
  for (;;) {
    if (auto done = m.step()) return *done;
    if (m.rules_fired() >= options.fuel)
      return Outcome{Outcome::Kind::FuelExhausted, nullptr, {}, m.rules_fired()};
    if (options.sample && options.sample_every &&
        m.rules_fired() >= next_sample) {
      next_sample = m.rules_fired() + options.sample_every;
      options.sample(m);
    }
  }
}

}  // namespace greff
