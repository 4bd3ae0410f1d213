#include <sstream>

#include "doctest.h"
#include "hb/harness.hpp"
#include "hb/machine.hpp"
#include "hb/parser.hpp"
#include "hb/pretty.hpp"

using namespace hb;

namespace {

std::pair<Outcome, Stats> run_src(const char* src, RunOptions opts = {}) {
  return run(parse(src), opts);
}

// Enumerates every split e = C[r] with r shaped like a redex and the path
// to r a valid context, independently of decompose().
void all_splits(const ExprPtr& e, int& count) {
  auto is_redex = [](const Expr& x) {
    switch (x.kind) {
      case ExprKind::Var:
      case ExprKind::SelfRef:
      case ExprKind::New:
      case ExprKind::Def:
      case ExprKind::TypeDecl:
        return true;
      case ExprKind::Assign:
      case ExprKind::Seq:
        return is_value(*x.a);
      case ExprKind::If:
        return is_value(*x.a);
      case ExprKind::Call:
        return is_value(*x.a) && is_value(*x.b);
      default:
        return false;
    }
  };
  if (is_redex(*e)) ++count;
  switch (e->kind) {
    case ExprKind::Assign:
      if (!is_value(*e->a)) all_splits(e->a, count);
      break;
    case ExprKind::Seq:
    case ExprKind::If:
      if (!is_value(*e->a)) all_splits(e->a, count);
      break;
    case ExprKind::Call:
      if (!is_value(*e->a)) {
        all_splits(e->a, count);
      } else if (!is_value(*e->b)) {
        all_splits(e->b, count);
      }
      break;
    default:
      break;
  }
}

}  // namespace

TEST_CASE("stype") {
  CHECK(stype(Value::nil()) == ValType::nil_type());
  CHECK(stype(Value::instance("A")) == ValType::of_class("A"));
  for (Value v : {Value::nil(), Value::instance("A")})
    CHECK(subtype(stype(v), ValType::of_class("A")));
}

TEST_CASE("decompose picks the left-most innermost redex") {
  ExprPtr e = parse("x = nil.m(nil)");
  auto d = decompose(e);
  REQUIRE(d.has_value());
  CHECK(d->ctx->kind == CtxKind::AssignCtx);
  CHECK(d->ctx->var == "x");
  CHECK(d->ctx->inner->kind == CtxKind::Hole);
  CHECK(d->redex->kind == ExprKind::Call);
  CHECK(expr_equal(plug(d->ctx, d->redex), e));

  auto top = decompose(parse("nil; A.new"));
  REQUIRE(top.has_value());
  CHECK(top->ctx->kind == CtxKind::Hole);
  CHECK(top->redex->kind == ExprKind::Seq);

  CHECK(!decompose(make_nil()).has_value());
  CHECK(!decompose(make_instance("A")).has_value());
}

TEST_CASE("decomposition is unique on generated terms") {
  for (std::uint64_t seed = 1; seed <= 400; ++seed) {
    ExprPtr e = gen_program(seed, 12);
    if (is_value(*e)) continue;
    int count = 0;
    all_splits(e, count);
    CHECK(count == 1);
    auto d = decompose(e);
    REQUIRE(d.has_value());
    CHECK(expr_equal(plug(d->ctx, d->redex), e));
  }
}

TEST_CASE("context plugging and hole-as-variable rendering") {
  // after one ESeq step the redex is A.new inside x = A.new.m(nil)
  Machine m(parse("nil; x = A.new.m(nil)"), {});
  m.step();
  auto d = decompose(m.config().expr);
  REQUIRE(d.has_value());
  CHECK(d->redex->kind == ExprKind::New);
  CHECK(render_runtime(context_to_expr(d->ctx, kHoleVar)) == "x = $hole.m(nil)");
  // once receiver and argument are values, the call itself is the redex
  m.step();
  auto d2 = decompose(m.config().expr);
  REQUIRE(d2.has_value());
  CHECK(d2->redex->kind == ExprKind::Call);
  CHECK(render_runtime(context_to_expr(d2->ctx, kHoleVar)) == "x = $hole");
}

TEST_CASE("blame golden: nil receiver") {
  auto [o, s] = run_src("nil.m(nil)");
  REQUIRE(o.kind == Outcome::Kind::Blame);
  CHECK(o.blame.kind == BlameKind::NilReceiver);
  CHECK(o.blame.span == Span{1, 1});
}

TEST_CASE("blame golden: typed but undefined method") {
  auto [o, s] = run_src("type A.m : nil -> nil; A.new.m(nil)");
  REQUIRE(o.kind == Outcome::Kind::Blame);
  CHECK(o.blame.kind == BlameKind::UndefinedTypedMethod);
}

TEST_CASE("blame golden: define-then-type-then-call inside one body") {
  auto [o, s] = run_src(
      "def A.m(x) def B.k(y) nil end; type B.k : nil -> nil; B.new.k(nil) end; "
      "type A.m : nil -> nil; "
      "A.new.m(nil)");
  REQUIRE(o.kind == Outcome::Kind::Blame);
  CHECK(o.blame.kind == BlameKind::BodyCheckFailure);
  REQUIRE(o.blame.body_error.has_value());
  CHECK(o.blame.body_error->rule() == "TApp");
  CHECK(o.blame.body_error->message() == "B.k not in type table");
}

TEST_CASE("body failing the declared return type is blamed") {
  auto [o, s] = run_src(
      "def A.m(x) A.new end; type A.m : nil -> nil; A.new.m(nil)");
  REQUIRE(o.kind == Outcome::Kind::Blame);
  CHECK(o.blame.kind == BlameKind::BodyCheckFailure);
  REQUIRE(o.blame.body_error.has_value());
  CHECK(o.blame.body_error->rule() == "TSub");
}

TEST_CASE("stuck states map to the enumerated runtime errors") {
  SUBCASE("unbound variable") {
    auto [o, s] = run_src("x");
    REQUIRE(o.kind == Outcome::Kind::RuntimeError);
    CHECK(o.error == StuckKind::UnboundVariable);
  }
  SUBCASE("unbound self") {
    auto [o, s] = run_src("self");
    REQUIRE(o.kind == Outcome::Kind::RuntimeError);
    CHECK(o.error == StuckKind::UnboundSelf);
  }
  SUBCASE("defined but untyped method") {
    auto [o, s] = run_src("def A.m(x) x end; A.new.m(nil)");
    REQUIRE(o.kind == Outcome::Kind::RuntimeError);
    CHECK(o.error == StuckKind::UntypedMethodCall);
  }
  SUBCASE("neither typed nor defined") {
    auto [o, s] = run_src("A.new.m(nil)");
    REQUIRE(o.kind == Outcome::Kind::RuntimeError);
    CHECK(o.error == StuckKind::UntypedMethodCall);
  }
  SUBCASE("argument outside the declared domain") {
    auto [o, s] = run_src(
        "def A.m(x) x end; type A.m : B -> B; A.new.m(A.new)");
    REQUIRE(o.kind == Outcome::Kind::RuntimeError);
    CHECK(o.error == StuckKind::ArgumentTypeMismatch);
  }
  SUBCASE("type update under a dependent stack frame") {
    // B.g's body calls A.m, so while B.g runs, retyping A.m is stuck
    auto [o, s] = run_src(
        "def A.m(x) x end; type A.m : nil -> nil; "
        "def B.g(y) type A.m : nil -> nil; nil end; type B.g : nil -> nil; "
        "def C.h(z) A.new.m(z); B.new.g(z) end; type C.h : nil -> nil; "
        "C.new.h(nil)");
    REQUIRE(o.kind == Outcome::Kind::RuntimeError);
    CHECK(o.error == StuckKind::TypeUpdateUnderDependency);
  }
  SUBCASE("retyping is fine once no frame depends on the key") {
    auto [o, s] = run_src(
        "def A.m(x) x end; type A.m : nil -> nil; A.new.m(nil); "
        "type A.m : A -> A");
    CHECK(o.kind == Outcome::Kind::Value);
  }
}

TEST_CASE("run golden: the identity method") {
  auto [o, s] = run_src("def A.id(x) x end; type A.id : A -> A; A.new.id(A.new)");
  REQUIRE(o.kind == Outcome::Kind::Value);
  CHECK(o.value == Value::instance("A"));
  CHECK(s.static_checks == 1);
  CHECK(s.cache_misses == 1);
  CHECK(s.cache_hits == 0);
  CHECK(s.steps == 9);
  CHECK(s.phases == 1);
}

TEST_CASE("second call hits the cache") {
  auto [o, s] = run_src(
      "def A.id(x) x end; type A.id : A -> A; A.new.id(A.new); A.new.id(A.new)");
  REQUIRE(o.kind == Outcome::Kind::Value);
  CHECK(s.static_checks == 1);
  CHECK(s.cache_hits == 1);
  CHECK(s.cache_misses == 1);
}

TEST_CASE("trace golden for the identity run") {
  std::ostringstream trace;
  RunOptions opts;
  opts.trace = &trace;
  auto [o, s] = run_src("def A.id(x) x end; type A.id : A -> A; A.new.id(A.new)", opts);
  REQUIRE(o.kind == Outcome::Kind::Value);
  CHECK(trace.str() ==
        "0 EDef def A.id(x) x end\n"
        "1 ESeq nil; type A.id : A -> A; A.new.id(A.new)\n"
        "2 EType type A.id : A -> A\n"
        "3 ESeq nil; A.new.id(A.new)\n"
        "4 ENew A.new\n"
        "5 ENew A.new\n"
        "6 EAppMiss [A].id([A])\n"
        "7 EVar x\n"
        "8 ERet [A]\n");
}

TEST_CASE("nil runs in zero steps") {
  auto [o, s] = run_src("nil");
  REQUIRE(o.kind == Outcome::Kind::Value);
  CHECK(o.value == Value::nil());
  CHECK(s.steps == 0);
  CHECK(s.static_checks == 0);
  CHECK(s.phases == 0);
}

TEST_CASE("def and type reduce to nil leaving env and stack alone") {
  Machine m(parse("x = nil; def A.m(y) y end; type A.m : A -> A; x"), {});
  while (true) {
    StepResult r = m.step();
    REQUIRE(r.kind != StepResult::Kind::Stuck);
    if (r.kind == StepResult::Kind::Next &&
        (r.rule == Rule::EDef || r.rule == Rule::EType)) {
      CHECK(m.config().env == DynEnv{{"x", Value::nil()}});
      CHECK(m.config().stack.empty());
    }
    if (r.kind == StepResult::Kind::Done) {
      CHECK(r.value == Value::nil());
      break;
    }
  }
}

TEST_CASE("ERet restores the pushed environment and plugs the context") {
  // the callee assigns y, which must not leak into the caller
  auto [o, s] = run_src(
      "y = A.new; def A.m(x) y = nil; x end; type A.m : nil -> nil; "
      "A.new.m(nil); y");
  REQUIRE(o.kind == Outcome::Kind::Value);
  CHECK(o.value == Value::instance("A"));
}

TEST_CASE("self is the receiver inside a method body") {
  auto [o, s] = run_src("def A.me(x) self end; type A.me : nil -> A; A.new.me(nil)");
  REQUIRE(o.kind == Outcome::Kind::Value);
  CHECK(o.value == Value::instance("A"));
}

TEST_CASE("conditionals branch on nil") {
  auto [o1, s1] = run_src("if A.new then nil else A.new end");
  CHECK(o1.value == Value::nil());
  auto [o2, s2] = run_src("if nil then nil else A.new end");
  CHECK(o2.value == Value::instance("A"));
}

TEST_CASE("def overwrites and invalidates, forcing a recheck") {
  auto [o, s] = run_src(
      "def A.m(x) nil end; type A.m : nil -> nil; A.new.m(nil); "
      "def A.m(x) x end; A.new.m(nil)");
  REQUIRE(o.kind == Outcome::Kind::Value);
  CHECK(s.static_checks == 2);
  CHECK(s.invalidations == 1);
  CHECK(s.cache_hits == 0);
}

TEST_CASE("recursive method checks once then loops to the step limit") {
  RunOptions opts;
  opts.max_steps = 10'000;
  auto [o, s] = run_src(
      "def A.loop(x) self.loop(x) end; type A.loop : nil -> nil; A.new.loop(nil)",
      opts);
  REQUIRE(o.kind == Outcome::Kind::StepLimit);
  CHECK(o.steps == 10'000);
  CHECK(s.static_checks == 1);
  CHECK(s.cache_hits > 0);
}

TEST_CASE("caching off re-checks on every call and never hits") {
  std::string src = "def A.f(x) x end; type A.f : nil -> nil";
  for (int i = 0; i < 5; ++i) src += "; A.new.f(nil)";
  auto [on, son] = run_src(src.c_str());
  RunOptions off;
  off.caching = false;
  auto [offo, soff] = run_src(src.c_str(), off);
  CHECK(on == offo);
  CHECK(son.static_checks == 1);
  CHECK(son.cache_hits == 4);
  CHECK(soff.static_checks == 5);
  CHECK(soff.cache_hits == 0);
  CHECK(soff.invalidations == 0);
  // hits + misses equals the number of method entries in both modes
  CHECK(son.cache_hits + son.cache_misses == 5);
  CHECK(soff.cache_hits + soff.cache_misses == 5);
}

TEST_CASE("phase counting") {
  // annotations then checks: one phase
  auto [o1, s1] = run_src(
      "def A.f(x) x end; def B.g(y) nil end; "
      "type A.f : A -> A; type B.g : nil -> nil; "
      "A.new.f(A.new); B.new.g(nil)");
  REQUIRE(o1.kind == Outcome::Kind::Value);
  CHECK(s1.phases == 1);
  // interleaved: two phases
  auto [o2, s2] = run_src(
      "def A.f(x) x end; type A.f : A -> A; A.new.f(A.new); "
      "def B.g(y) nil end; type B.g : nil -> nil; B.new.g(nil)");
  REQUIRE(o2.kind == Outcome::Kind::Value);
  CHECK(s2.phases == 2);
  // annotations that never lead to a check do not count
  auto [o3, s3] = run_src("type A.f : A -> A; type B.g : nil -> nil");
  CHECK(s3.phases == 0);
}

TEST_CASE("retyping a dependency invalidates cached callers") {
  auto [o, s] = run_src(
      "def A.m(x) nil end; type A.m : nil -> nil; "
      "def B.c(y) A.new.m(y) end; type B.c : nil -> nil; "
      "B.new.c(nil); "
      "type A.m : nil -> nil; "
      "B.new.c(nil)");
  REQUIRE(o.kind == Outcome::Kind::Value);
  CHECK(s.invalidations == 2);   // the key and its dependent
  CHECK(s.static_checks == 4);   // both bodies rechecked after the retype
  CHECK(s.phases == 2);
}

TEST_CASE("instrumented runs accept correct executions") {
  RunOptions opts;
  opts.instrument = true;
  auto [o, s] = run_src(
      "def A.m(x) x end; type A.m : nil -> nil; A.new.m(nil); "
      "def A.m(x) nil end; A.new.m(nil)",
      opts);
  CHECK(o.kind == Outcome::Kind::Value);
}

TEST_CASE("instrumentation catches a machine that skips invalidation") {
  RunOptions opts;
  opts.instrument = true;
  opts.bug_skip_def_invalidate = true;
  Machine m(parse("def A.m(x) nil end; type A.m : nil -> nil; A.new.m(nil); "
                  "def A.m(x) self end; nil"),
            opts);
  CHECK_THROWS_AS(m.run(), ConsistencyViolation);
}

TEST_CASE("instrumented stack mode accepts nested calls") {
  RunOptions opts;
  opts.instrument_stack = true;
  auto [o, s] = run_src(
      "def A.m(x) x end; type A.m : nil -> nil; "
      "def B.c(y) A.new.m(y) end; type B.c : nil -> B; "
      "def B.c(y) A.new.m(y); self end; "
      "x = B.new.c(nil); x.c(nil)",
      opts);
  REQUIRE(o.kind == Outcome::Kind::Value);
  CHECK(o.value == Value::instance("B"));
}

TEST_CASE("a cache hit still verifies the argument type") {
  auto [o, s] = run_src(
      "def A.m(x) x end; type A.m : nil -> nil; A.new.m(nil); A.new.m(A.new)");
  REQUIRE(o.kind == Outcome::Kind::RuntimeError);
  CHECK(o.error == StuckKind::ArgumentTypeMismatch);
  CHECK(s.static_checks == 1);
  CHECK(s.cache_hits == 0);  // the failing entry is neither a hit nor a miss
}

TEST_CASE("a type update rewrites every surviving snapshot") {
  Machine m(parse("def A.m(x) nil end; type A.m : nil -> nil; A.new.m(nil); "
                  "def B.g(y) nil end; type B.g : nil -> nil; B.new.g(nil); "
                  "type C.p : C -> C; nil"),
            {});
  Outcome o = m.run();
  REQUIRE(o.kind == Outcome::Kind::Value);
  const Config& cfg = m.config();
  REQUIRE(cfg.cache.entries.size() == 2);
  for (const auto& [key, entry] : cfg.cache.entries) {
    CHECK(entry.table_snapshot == cfg.tt);
    // surviving entries still re-derive under the upgraded table
    TypeEnv env{{entry.body.param, entry.method_type.dom},
                {kSelfName, ValType::of_class(key.cls)}};
    auto replay = try_typecheck(entry.table_snapshot, env, *entry.body.body);
    REQUIRE(replay.has_value());
    CHECK(replay->type == entry.result_type);
    CHECK(replay->deps == entry.deps);
  }
  CHECK(consistent(cfg.cache, cfg.tt, cfg.dt));
}

TEST_CASE("a body may retype its own method once nothing on the stack depends on it") {
  RunOptions opts;
  opts.instrument_stack = true;
  auto [o, s] = run_src(
      "def A.m(x) type A.m : nil -> A; nil end; type A.m : nil -> nil; "
      "A.new.m(nil); A.new.m(nil)",
      opts);
  REQUIRE(o.kind == Outcome::Kind::Value);
  CHECK(o.value == Value::nil());
  CHECK(s.static_checks == 2);   // the self-retype invalidates its own entry
  CHECK(s.invalidations == 2);
}

TEST_CASE("a legal type update may outdate only the top-level frame judgment") {
  // B.g's body retypes A.m; B.g's own check has no deps, so the update is
  // allowed, and the pending top-level call to A.m changes meaning. The
  // instrumented machine demotes the bottom frame instead of flagging it.
  RunOptions opts;
  opts.instrument_stack = true;
  auto [o, s] = run_src(
      "def A.m(x) nil end; type A.m : nil -> nil; "
      "def B.g(y) type A.m : A -> A; nil end; type B.g : nil -> nil; "
      "B.new.g(nil); A.new.m(nil)",
      opts);
  REQUIRE(o.kind == Outcome::Kind::Value);
  CHECK(o.value == Value::nil());
}

TEST_CASE("stats arithmetic holds across the generated corpus") {
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    ExprPtr p = gen_program(seed, 30);
    RunOptions on;
    on.max_steps = 2000;
    auto [o_on, s_on] = run(p, on);
    CHECK(s_on.cache_misses == s_on.static_checks);
    RunOptions off = on;
    off.caching = false;
    auto [o_off, s_off] = run(p, off);
    CHECK(s_off.cache_hits == 0);
    CHECK(s_off.invalidations == 0);
    CHECK(s_off.cache_misses == s_off.static_checks);
    // method entries coincide step for step across the two modes
    CHECK(s_on.cache_hits + s_on.cache_misses ==
          s_off.cache_hits + s_off.cache_misses);
    CHECK(s_on.steps == s_off.steps);
  }
}

TEST_CASE("outcome equality distinguishes kinds and payloads") {
  Outcome a;
  a.kind = Outcome::Kind::Value;
  a.value = Value::nil();
  Outcome b = a;
  CHECK(a == b);
  b.value = Value::instance("A");
  CHECK(!(a == b));
  Outcome c;
  c.kind = Outcome::Kind::StepLimit;
  c.steps = 7;
  CHECK(!(a == c));
}
