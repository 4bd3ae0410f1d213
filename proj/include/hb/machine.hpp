#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hb/ast.hpp"
#include "hb/cache.hpp"
#include "hb/typecheck.hpp"

namespace hb {

// Dynamic environment E: variables (and "self") to values.
using DynEnv = std::map<std::string, Value>;

// stype(nil) = nil, stype([A]) = A.
ValType stype(const Value& v);

// Evaluation contexts, nested toward the hole:
//   C ::= [] | x = C | C.m(e) | v.m(C) | C; e | if C then e else e
enum class CtxKind { Hole, AssignCtx, CallRecvCtx, CallArgCtx, SeqCtx, IfCtx };

struct Context;
using ContextPtr = std::shared_ptr<const Context>;

struct Context {
  CtxKind kind = CtxKind::Hole;
  Span span;
  VarName var;       // AssignCtx
  MethodName meth;   // CallRecvCtx, CallArgCtx
  Value recv;        // CallArgCtx
  ContextPtr inner;  // context the hole sits in, null for Hole
  ExprPtr e1, e2;    // CallRecvCtx arg; SeqCtx rest; IfCtx branches
};

ContextPtr hole_ctx();
bool is_hole(const Context& c);

// C[e]: plugs e into the hole of c.
ExprPtr plug(const ContextPtr& c, ExprPtr e);

// The context as an expression with the hole replaced by a variable.
ExprPtr context_to_expr(const ContextPtr& c, const VarName& hole_var);

// Name used for the hole when a context is type checked as an expression.
// Not lexable, so it cannot collide with program variables.
constexpr const char* kHoleVar = "$hole";

struct Decomposition {
  ContextPtr ctx;  // Hole when the expression is itself the redex
  ExprPtr redex;
};

// Splits a non-value expression into the unique context and left-most
// innermost redex. Empty only for irreducible non-values, which the
// grammar cannot produce.
std::optional<Decomposition> decompose(const ExprPtr& e);

// A call-stack frame: the caller's environment and context, plus the
// TApp footprint of the static check performed when the frame was
// pushed. The type-update side condition consults these sets.
struct Frame {
  DynEnv env;
  ContextPtr ctx;
  DepSet deps;
};

struct Config {
  Cache cache;
  TypeTable tt;
  DynClassTable dt;
  DynEnv env;
  ExprPtr expr;
  std::vector<Frame> stack;  // back() is the most recent frame
};

// The three run-time errors the type system deliberately does not prevent.
enum class BlameKind { NilReceiver, BodyCheckFailure, UndefinedTypedMethod };

std::string to_string(BlameKind k);

struct Blame {
  BlameKind kind;
  Span span;
  std::optional<StaticTypeError> body_error;  // BodyCheckFailure only

  bool operator==(const Blame& o) const {
    return kind == o.kind && span == o.span && body_error == o.body_error;
  }
};

// Stuck states reachable only by programs the type system rejects, plus
// the type-update side-condition failure.
enum class StuckKind {
  UnboundVariable,
  UnboundSelf,
  UntypedMethodCall,
  ArgumentTypeMismatch,
  IrreducibleTerm,
  TypeUpdateUnderDependency,
};

std::string to_string(StuckKind k);

enum class Rule {
  ESelf,
  EVar,
  EAssn,
  ENew,
  ESeq,
  EIfTrue,
  EIfFalse,
  EDef,
  EType,
  EAppMiss,
  EAppHit,
  ERet,
};

std::string to_string(Rule r);

struct StepResult {
  enum class Kind { Next, Done, Blame, Stuck };
  Kind kind;
  Rule rule = Rule::ESelf;         // Next only
  ExprPtr redex;                   // Next only, for tracing
  Value value;                     // Done only
  struct Blame blame = {BlameKind::NilReceiver, {}, {}};  // Blame only
  StuckKind stuck = StuckKind::IrreducibleTerm;           // Stuck only
  std::string stuck_message;
  Span stuck_span;
};

struct Outcome {
  enum class Kind { Value, Blame, StepLimit, RuntimeError };
  Kind kind;
  Value value;                               // Value
  struct Blame blame = {BlameKind::NilReceiver, {}, {}};  // Blame
  long long steps = 0;                       // StepLimit
  StuckKind error = StuckKind::IrreducibleTerm;  // RuntimeError
  std::string message;                       // RuntimeError
  Span span;                                 // RuntimeError

  bool operator==(const Outcome& o) const;
};

std::string to_string(const Outcome& o);

struct Stats {
  long long steps = 0;
  long long static_checks = 0;
  long long cache_hits = 0;
  long long cache_misses = 0;
  long long invalidations = 0;
  long long phases = 0;
};

struct RunOptions {
  long long max_steps = 1'000'000;
  bool caching = true;
  bool instrument = false;
  bool instrument_stack = false;  // implies instrument
  std::ostream* trace = nullptr;  // one line per step when set
  // Test-only: skip cache invalidation in EDef so the instrumented
  // consistency check can be shown to catch the resulting stale cache.
  bool bug_skip_def_invalidate = false;
};

// Raised by instrumented runs when a consistency relation breaks after a
// step. Always indicates a machine bug.
class ConsistencyViolation : public std::exception {
 public:
  ConsistencyViolation(long long step, std::string what_failed);
  long long step() const { return step_; }
  const char* what() const noexcept override { return msg_.c_str(); }

 private:
  long long step_;
  std::string msg_;
};

class Machine {
 public:
  Machine(ExprPtr program, RunOptions opts);
  ~Machine();
  Machine(const Machine&) = delete;
  Machine& operator=(const Machine&) = delete;

  // One transition. Throws ConsistencyViolation in instrumented mode.
  StepResult step();

  // Iterates step() up to max_steps.
  Outcome run();

  const Config& config() const { return cfg_; }
  const Stats& stats() const { return stats_; }

 private:
  struct Instrument;

  StepResult do_step();
  StepResult apply_call(const ContextPtr& ctx, const Expr& redex);
  void trace_line(const StepResult& r);
  void after_step(const StepResult& r);
  void verify_frame(std::size_t i);

  Config cfg_;
  RunOptions opts_;
  Stats stats_;
  bool in_annotation_run_ = false;
  std::unique_ptr<Instrument> instr_;
};

std::pair<Outcome, Stats> run(ExprPtr program, const RunOptions& opts = {});

}  // namespace hb
