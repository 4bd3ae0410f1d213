#include "hb/machine.hpp"

#include <ostream>

#include "hb/harness.hpp"
#include "hb/pretty.hpp"

namespace hb {

ValType stype(const Value& v) {
  return v.is_nil() ? ValType::nil_type() : ValType::of_class(*v.cls);
}

namespace {

ContextPtr ctx_node(CtxKind k, Span sp) {
  auto c = std::make_shared<Context>();
  c->kind = k;
  c->span = sp;
  return c;
}

std::shared_ptr<Context> ctx_mut(CtxKind k, Span sp) {
  auto c = std::make_shared<Context>();
  c->kind = k;
  c->span = sp;
  return c;
}

}  // namespace

ContextPtr hole_ctx() {
  static const ContextPtr h = ctx_node(CtxKind::Hole, Span{});
  return h;
}

bool is_hole(const Context& c) { return c.kind == CtxKind::Hole; }

ExprPtr plug(const ContextPtr& c, ExprPtr e) {
  switch (c->kind) {
    case CtxKind::Hole:
      return e;
    case CtxKind::AssignCtx:
      return make_assign(c->var, plug(c->inner, std::move(e)), c->span);
    case CtxKind::CallRecvCtx:
      return make_call(plug(c->inner, std::move(e)), c->meth, c->e1, c->span);
    case CtxKind::CallArgCtx:
      return make_call(value_to_expr(c->recv, c->span), c->meth,
                       plug(c->inner, std::move(e)), c->span);
    case CtxKind::SeqCtx:
      return make_seq(plug(c->inner, std::move(e)), c->e1, c->span);
    case CtxKind::IfCtx:
      return make_if(plug(c->inner, std::move(e)), c->e1, c->e2, c->span);
  }
  return e;
}

ExprPtr context_to_expr(const ContextPtr& c, const VarName& hole_var) {
  return plug(c, make_var(hole_var, Span{}));
}

std::optional<Decomposition> decompose(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Nil:
    case ExprKind::Instance:
      return std::nullopt;  // values have no redex
    case ExprKind::Var:
    case ExprKind::SelfRef:
    case ExprKind::New:
    case ExprKind::Def:
    case ExprKind::TypeDecl:
      return Decomposition{hole_ctx(), e};
    case ExprKind::Assign: {
      if (is_value(*e->a)) return Decomposition{hole_ctx(), e};
      auto d = decompose(e->a);
      if (!d) return std::nullopt;
      auto c = ctx_mut(CtxKind::AssignCtx, e->span);
      c->var = e->var;
      c->inner = d->ctx;
      return Decomposition{c, d->redex};
    }
    case ExprKind::Seq: {
      if (is_value(*e->a)) return Decomposition{hole_ctx(), e};
      auto d = decompose(e->a);
      if (!d) return std::nullopt;
      auto c = ctx_mut(CtxKind::SeqCtx, e->span);
      c->inner = d->ctx;
      c->e1 = e->b;
      return Decomposition{c, d->redex};
    }
    case ExprKind::If: {
      if (is_value(*e->a)) return Decomposition{hole_ctx(), e};
      auto d = decompose(e->a);
      if (!d) return std::nullopt;
      auto c = ctx_mut(CtxKind::IfCtx, e->span);
      c->inner = d->ctx;
      c->e1 = e->b;
      c->e2 = e->c;
      return Decomposition{c, d->redex};
    }
    case ExprKind::Call: {
      if (!is_value(*e->a)) {
        auto d = decompose(e->a);
        if (!d) return std::nullopt;
        auto c = ctx_mut(CtxKind::CallRecvCtx, e->span);
        c->meth = e->meth;
        c->inner = d->ctx;
        c->e1 = e->b;
        return Decomposition{c, d->redex};
      }
      if (!is_value(*e->b)) {
        auto d = decompose(e->b);
        if (!d) return std::nullopt;
        auto c = ctx_mut(CtxKind::CallArgCtx, e->span);
        c->meth = e->meth;
        c->recv = *as_value(*e->a);
        c->inner = d->ctx;
        return Decomposition{c, d->redex};
      }
      return Decomposition{hole_ctx(), e};
    }
  }
  return std::nullopt;
}

std::string to_string(BlameKind k) {
  switch (k) {
    case BlameKind::NilReceiver: return "nil_receiver";
    case BlameKind::BodyCheckFailure: return "body_check_failure";
    case BlameKind::UndefinedTypedMethod: return "undefined_typed_method";
  }
  return "?";
}

std::string to_string(StuckKind k) {
  switch (k) {
    case StuckKind::UnboundVariable: return "unbound_variable";
    case StuckKind::UnboundSelf: return "unbound_self";
    case StuckKind::UntypedMethodCall: return "untyped_method_call";
    case StuckKind::ArgumentTypeMismatch: return "argument_type_mismatch";
    case StuckKind::IrreducibleTerm: return "irreducible_term";
    case StuckKind::TypeUpdateUnderDependency: return "type_update_under_dependency";
  }
  return "?";
}

std::string to_string(Rule r) {
  switch (r) {
    case Rule::ESelf: return "ESelf";
    case Rule::EVar: return "EVar";
    case Rule::EAssn: return "EAssn";
    case Rule::ENew: return "ENew";
    case Rule::ESeq: return "ESeq";
    case Rule::EIfTrue: return "EIfTrue";
    case Rule::EIfFalse: return "EIfFalse";
    case Rule::EDef: return "EDef";
    case Rule::EType: return "EType";
    case Rule::EAppMiss: return "EAppMiss";
    case Rule::EAppHit: return "EAppHit";
    case Rule::ERet: return "ERet";
  }
  return "?";
}

bool Outcome::operator==(const Outcome& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Value:
      return value == o.value;
    case Kind::Blame:
      return blame == o.blame;
    case Kind::StepLimit:
      return steps == o.steps;
    case Kind::RuntimeError:
      return error == o.error && message == o.message && span == o.span;
  }
  return false;
}

std::string to_string(const Outcome& o) {
  switch (o.kind) {
    case Outcome::Kind::Value:
      return "value " + to_string(o.value);
    case Outcome::Kind::Blame:
      return "blame " + to_string(o.blame.kind) + " at " + to_string(o.blame.span);
    case Outcome::Kind::StepLimit:
      return "step_limit " + std::to_string(o.steps);
    case Outcome::Kind::RuntimeError:
      return "runtime_error " + to_string(o.error) + " at " + to_string(o.span);
  }
  return "?";
}

ConsistencyViolation::ConsistencyViolation(long long step, std::string what_failed)
    : step_(step) {
  msg_ = "consistency violation after step " + std::to_string(step) + ": " +
         std::move(what_failed);
}

// Instrumentation state: the tracked type environment for the running
// code, the callers' tracked environments, and (in stack mode) the type
// stack mirroring the call stack. Frames whose context re-check failed
// at push time are absent; the bottom frame may be demoted later when a
// type-table update legally escapes it (top-level code is outside the
// side condition's protection).
struct Machine::Instrument {
  TypeEnv tracked;
  std::vector<TypeEnv> saved;
  bool stack_mode = false;
  std::vector<std::optional<TypeStackFrame>> tstack;
};

Machine::Machine(ExprPtr program, RunOptions opts) : opts_(std::move(opts)) {
  if (opts_.instrument_stack) opts_.instrument = true;
  cfg_.expr = std::move(program);
  if (opts_.instrument) {
    instr_ = std::make_unique<Instrument>();
    instr_->stack_mode = opts_.instrument_stack;
  }
}

Machine::~Machine() = default;

namespace {

StepResult next_result(Rule rule, ExprPtr redex) {
  StepResult r;
  r.kind = StepResult::Kind::Next;
  r.rule = rule;
  r.redex = std::move(redex);
  return r;
}

StepResult done_result(Value v) {
  StepResult r;
  r.kind = StepResult::Kind::Done;
  r.value = std::move(v);
  return r;
}

StepResult blame_result(Blame b) {
  StepResult r;
  r.kind = StepResult::Kind::Blame;
  r.blame = std::move(b);
  return r;
}

StepResult stuck_result(StuckKind k, std::string msg, Span sp) {
  StepResult r;
  r.kind = StepResult::Kind::Stuck;
  r.stuck = k;
  r.stuck_message = std::move(msg);
  r.stuck_span = sp;
  return r;
}

}  // namespace

StepResult Machine::step() {
  StepResult r = do_step();
  if (r.kind == StepResult::Kind::Next) {
    trace_line(r);
    ++stats_.steps;
    after_step(r);
  }
  return r;
}

void Machine::trace_line(const StepResult& r) {
  if (!opts_.trace) return;
  *opts_.trace << stats_.steps << " " << to_string(r.rule) << " "
               << render_runtime(r.redex) << "\n";
}

StepResult Machine::do_step() {
  const ExprPtr e = cfg_.expr;
  if (auto v = as_value(*e)) {
    if (cfg_.stack.empty()) return done_result(*v);
    if (instr_) {
      if (instr_->stack_mode) {
        const auto& tf = instr_->tstack.back();
        if (tf && !subtype(stype(*v), tf->hole_type))
          throw ConsistencyViolation(
              stats_.steps, "returned value " + to_string(*v) +
                                " does not conform to expected hole type " +
                                to_string(tf->hole_type));
        instr_->tstack.pop_back();
      }
      instr_->tracked = std::move(instr_->saved.back());
      instr_->saved.pop_back();
    }
    Frame f = std::move(cfg_.stack.back());
    cfg_.stack.pop_back();
    cfg_.env = std::move(f.env);
    cfg_.expr = plug(f.ctx, value_to_expr(*v, e->span));
    return next_result(Rule::ERet, e);
  }
  auto d = decompose(e);
  if (!d)
    return stuck_result(StuckKind::IrreducibleTerm,
                        "expression has no redex", e->span);
  const Expr& r = *d->redex;
  switch (r.kind) {
    case ExprKind::Var: {
      auto it = cfg_.env.find(r.var);
      if (it == cfg_.env.end())
        return stuck_result(StuckKind::UnboundVariable,
                            "variable " + r.var + " is not bound", r.span);
      cfg_.expr = plug(d->ctx, value_to_expr(it->second, r.span));
      return next_result(Rule::EVar, d->redex);
    }
    case ExprKind::SelfRef: {
      auto it = cfg_.env.find(kSelfName);
      if (it == cfg_.env.end())
        return stuck_result(StuckKind::UnboundSelf, "self is not bound", r.span);
      cfg_.expr = plug(d->ctx, value_to_expr(it->second, r.span));
      return next_result(Rule::ESelf, d->redex);
    }
    case ExprKind::Assign: {
      Value v = *as_value(*r.a);
      cfg_.env[r.var] = v;
      if (instr_) instr_->tracked[r.var] = stype(v);
      cfg_.expr = plug(d->ctx, value_to_expr(v, r.span));
      return next_result(Rule::EAssn, d->redex);
    }
    case ExprKind::New:
      cfg_.expr = plug(d->ctx, make_instance(r.cls, r.span));
      return next_result(Rule::ENew, d->redex);
    case ExprKind::Seq:
      cfg_.expr = plug(d->ctx, r.b);
      return next_result(Rule::ESeq, d->redex);
    case ExprKind::If: {
      bool truthy = !as_value(*r.a)->is_nil();
      cfg_.expr = plug(d->ctx, truthy ? r.b : r.c);
      return next_result(truthy ? Rule::EIfTrue : Rule::EIfFalse, d->redex);
    }
    case ExprKind::Def: {
      MethodKey key{r.cls, r.meth};
      if (!opts_.bug_skip_def_invalidate) {
        int removed = 0;
        cfg_.cache = invalidate(std::move(cfg_.cache), key, &removed);
        stats_.invalidations += removed;
      }
      cfg_.dt[key] = r.premethod();
      cfg_.expr = plug(d->ctx, make_nil(r.span));
      return next_result(Rule::EDef, d->redex);
    }
    case ExprKind::TypeDecl: {
      MethodKey key{r.cls, r.meth};
      for (const Frame& f : cfg_.stack) {
        if (f.deps.count(key))
          return stuck_result(
              StuckKind::TypeUpdateUnderDependency,
              "type of " + to_string(key) +
                  " cannot change while a stack frame depends on it",
              r.span);
      }
      int removed = 0;
      cfg_.cache = invalidate(std::move(cfg_.cache), key, &removed);
      stats_.invalidations += removed;
      cfg_.tt[key] = r.mtype;
      cfg_.cache = upgrade(std::move(cfg_.cache), cfg_.tt);
      in_annotation_run_ = true;
      cfg_.expr = plug(d->ctx, make_nil(r.span));
      return next_result(Rule::EType, d->redex);
    }
    case ExprKind::Call:
      return apply_call(d->ctx, r);
    default:
      return stuck_result(StuckKind::IrreducibleTerm,
                          "unexpected redex kind", r.span);
  }
}

StepResult Machine::apply_call(const ContextPtr& ctx, const Expr& r) {
  Value recv = *as_value(*r.a);
  Value arg = *as_value(*r.b);
  if (recv.is_nil())
    return blame_result(Blame{BlameKind::NilReceiver, r.span, {}});
  MethodKey key{*recv.cls, r.meth};
  auto tt_it = cfg_.tt.find(key);
  if (tt_it == cfg_.tt.end())
    return stuck_result(StuckKind::UntypedMethodCall,
                        to_string(key) + " has no declared type", r.span);
  const MethType mt = tt_it->second;
  auto dt_it = cfg_.dt.find(key);
  if (dt_it == cfg_.dt.end())
    return blame_result(Blame{BlameKind::UndefinedTypedMethod, r.span, {}});
  Premethod prem = dt_it->second;
  if (!subtype(stype(arg), mt.dom))
    return stuck_result(StuckKind::ArgumentTypeMismatch,
                        "argument " + to_string(arg) + " does not have type " +
                            to_string(mt.dom),
                        r.span);

  const CacheEntry* hit = opts_.caching ? lookup(cfg_.cache, key) : nullptr;
  DepSet frame_deps;
  Rule rule;
  if (hit) {
    ++stats_.cache_hits;
    frame_deps = hit->deps;
    rule = Rule::EAppHit;
  } else {
    ++stats_.cache_misses;
    ++stats_.static_checks;
    if (in_annotation_run_) {
      ++stats_.phases;
      in_annotation_run_ = false;
    }
    TypeEnv body_env{{prem.param, mt.dom}, {kSelfName, ValType::of_class(key.cls)}};
    CheckResult cr;
    try {
      cr = typecheck(cfg_.tt, body_env, *prem.body);
    } catch (const StaticTypeError& err) {
      return blame_result(Blame{BlameKind::BodyCheckFailure, r.span, err});
    }
    if (!subtype(cr.type, mt.rng)) {
      StaticTypeError err("TSub", prem.body->span,
                          "method body has type " + to_string(cr.type) +
                              ", declared return type is " + to_string(mt.rng));
      return blame_result(Blame{BlameKind::BodyCheckFailure, r.span, err});
    }
    if (opts_.caching)
      cfg_.cache = store(std::move(cfg_.cache), key,
                         CacheEntry{mt, prem, cr.type, cr.deps, cfg_.tt});
    frame_deps = std::move(cr.deps);
    rule = Rule::EAppMiss;
  }

  if (instr_) {
    instr_->saved.push_back(instr_->tracked);
    if (instr_->stack_mode) {
      std::optional<TypeStackFrame> tf;
      TypeEnv with_hole = instr_->tracked;
      with_hole[kHoleVar] = mt.rng;
      if (auto cr = try_typecheck(cfg_.tt, with_hole, *context_to_expr(ctx, kHoleVar)))
        tf = TypeStackFrame{instr_->tracked, mt.rng, cr->out_env, cr->type};
      instr_->tstack.push_back(std::move(tf));
    }
    instr_->tracked =
        TypeEnv{{prem.param, mt.dom}, {kSelfName, ValType::of_class(key.cls)}};
  }

  ExprPtr redex = make_call(value_to_expr(recv, r.span), r.meth,
                            value_to_expr(arg, r.span), r.span);
  cfg_.stack.push_back(Frame{std::move(cfg_.env), ctx, std::move(frame_deps)});
  cfg_.env = DynEnv{{prem.param, arg}, {kSelfName, recv}};
  cfg_.expr = prem.body;
  return next_result(rule, std::move(redex));
}

void Machine::verify_frame(std::size_t i) {
  auto& tf = instr_->tstack[i];
  if (!tf) return;
  bool holds = env_consistent(tf->in_env, cfg_.stack[i].env);
  if (holds) {
    TypeEnv with_hole = tf->in_env;
    with_hole[kHoleVar] = tf->hole_type;
    auto cr = try_typecheck(cfg_.tt, with_hole,
                            *context_to_expr(cfg_.stack[i].ctx, kHoleVar));
    holds = cr && cr->out_env == tf->out_env && cr->type == tf->result_type;
  }
  if (!holds) {
    // Top-level residual code is outside the side condition's protection;
    // a type-table update may legally outdate the bottom frame's
    // judgment. Method frames must survive it.
    if (i == 0) {
      tf.reset();
      return;
    }
    throw ConsistencyViolation(stats_.steps, "stack consistency (frame " +
                                                 std::to_string(i) + ")");
  }
  if (i > 0) {
    const auto& lower = instr_->tstack[i - 1];
    if (lower && !subtype(tf->result_type, lower->hole_type))
      throw ConsistencyViolation(
          stats_.steps, "stack subtyping between frames " + std::to_string(i) +
                            " and " + std::to_string(i - 1));
  }
}

void Machine::after_step(const StepResult& r) {
  if (!instr_) return;
  if (!env_consistent(instr_->tracked, cfg_.env))
    throw ConsistencyViolation(stats_.steps, "environment consistency");
  if (!consistent(cfg_.cache, cfg_.tt, cfg_.dt))
    throw ConsistencyViolation(stats_.steps, "cache consistency");
  if (!instr_->stack_mode) return;
  // Frame judgments are frozen at push time; of the machine's transitions
  // only a type-table update can change what they replay to.
  if (r.rule == Rule::EType) {
    for (size_t i = 0; i < cfg_.stack.size(); ++i) verify_frame(i);
  } else if (r.rule == Rule::EAppMiss || r.rule == Rule::EAppHit) {
    verify_frame(cfg_.stack.size() - 1);
  }
}

Outcome Machine::run() {
  for (long long i = 0; i < opts_.max_steps; ++i) {
    StepResult r = step();
    switch (r.kind) {
      case StepResult::Kind::Next:
        continue;
      case StepResult::Kind::Done: {
        Outcome o;
        o.kind = Outcome::Kind::Value;
        o.value = r.value;
        return o;
      }
      case StepResult::Kind::Blame: {
        Outcome o;
        o.kind = Outcome::Kind::Blame;
        o.blame = r.blame;
        return o;
      }
      case StepResult::Kind::Stuck: {
        Outcome o;
        o.kind = Outcome::Kind::RuntimeError;
        o.error = r.stuck;
        o.message = r.stuck_message;
        o.span = r.stuck_span;
        return o;
      }
    }
  }
  Outcome o;
  o.kind = Outcome::Kind::StepLimit;
  o.steps = opts_.max_steps;
  return o;
}

std::pair<Outcome, Stats> run(ExprPtr program, const RunOptions& opts) {
  Machine m(std::move(program), opts);
  Outcome o = m.run();
  return {std::move(o), m.stats()};
}

}  // namespace hb
