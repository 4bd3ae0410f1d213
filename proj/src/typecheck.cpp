#include "hb/typecheck.hpp"

namespace hb {

bool subtype(const ValType& t1, const ValType& t2) {
  return t1.is_nil() || t1 == t2;
}

std::optional<ValType> lub(const ValType& t1, const ValType& t2) {
  if (t1 == t2) return t1;
  if (t1.is_nil()) return t2;
  if (t2.is_nil()) return t1;
  return std::nullopt;
}

TypeEnv join_env(const TypeEnv& g1, const TypeEnv& g2) {
  TypeEnv out;
  for (const auto& [name, t1] : g1) {
    auto it = g2.find(name);
    if (it == g2.end()) continue;
    if (auto t = lub(t1, it->second)) out.emplace(name, *t);
  }
  return out;
}

bool env_leq(const TypeEnv& g1, const TypeEnv& g2) {
  for (const auto& [name, t2] : g2) {
    auto it = g1.find(name);
    if (it == g1.end() || !subtype(it->second, t2)) return false;
  }
  return true;
}

StaticTypeError::StaticTypeError(std::string rule, Span span, std::string message)
    : rule_(std::move(rule)), span_(span), message_(std::move(message)) {
  rendered_ = to_string(span_) + ": [" + rule_ + "] " + message_;
}

namespace {

class Checker {
 public:
  Checker(const TypeTable& tt) : tt_(tt) {}

  struct Out {
    TypeEnv env;
    ValType type;
  };

  Out check(TypeEnv env, const Expr& e) {
    switch (e.kind) {
      case ExprKind::Nil:  // TNil
        return {std::move(env), ValType::nil_type()};
      case ExprKind::Instance:  // TObject
        return {std::move(env), ValType::of_class(e.cls)};
      case ExprKind::SelfRef: {  // TSelf
        auto it = env.find(kSelfName);
        if (it == env.end())
          throw StaticTypeError("TSelf", e.span, "self is not bound");
        ValType t = it->second;
        return {std::move(env), t};
      }
      case ExprKind::Var: {  // TVar
        auto it = env.find(e.var);
        if (it == env.end())
          throw StaticTypeError("TVar", e.span, "unbound variable " + e.var);
        ValType t = it->second;
        return {std::move(env), t};
      }
      case ExprKind::Assign: {  // TAssn
        Out r = check(std::move(env), *e.a);
        r.env[e.var] = r.type;
        return r;
      }
      case ExprKind::Seq: {  // TSeq
        Out r1 = check(std::move(env), *e.a);
        return check(std::move(r1.env), *e.b);
      }
      case ExprKind::New:  // TNew
        return {std::move(env), ValType::of_class(e.cls)};
      case ExprKind::Def:   // TDef: the body is not checked here
      case ExprKind::TypeDecl:  // TType: no effect during checking
        return {std::move(env), ValType::nil_type()};
      case ExprKind::Call: {  // TApp
        Out recv = check(std::move(env), *e.a);
        if (recv.type.is_nil())
          throw StaticTypeError("TApp", e.span,
                                "receiver of ." + e.meth + " has type nil");
        MethodKey key{*recv.type.cls, e.meth};
        Out arg = check(std::move(recv.env), *e.b);
        auto it = tt_.find(key);
        if (it == tt_.end())
          throw StaticTypeError("TApp", e.span,
                                to_string(key) + " not in type table");
        deps.insert(key);
        const MethType& mt = it->second;
        if (!subtype(arg.type, mt.dom))
          throw StaticTypeError("TApp", e.span,
                                "argument has type " + to_string(arg.type) +
                                    ", expected " + to_string(mt.dom));
        return {std::move(arg.env), mt.rng};
      }
      case ExprKind::If: {  // TIf
        Out guard = check(std::move(env), *e.a);
        Out then_r = check(guard.env, *e.b);
        Out else_r = check(std::move(guard.env), *e.c);
        auto t = lub(then_r.type, else_r.type);
        if (!t)
          throw StaticTypeError("TIf", e.span,
                                "branches have incompatible types " +
                                    to_string(then_r.type) + " and " +
                                    to_string(else_r.type));
        return {join_env(then_r.env, else_r.env), *t};
      }
    }
    throw StaticTypeError("?", e.span, "unknown expression kind");
  }

  DepSet deps;

 private:
  const TypeTable& tt_;
};

}  // namespace

CheckResult typecheck(const TypeTable& tt, const TypeEnv& env, const Expr& e) {
  Checker c(tt);
  Checker::Out out = c.check(env, e);
  return CheckResult{std::move(out.env), out.type, std::move(c.deps)};
}

std::optional<CheckResult> try_typecheck(const TypeTable& tt, const TypeEnv& env,
                                         const Expr& e) {
  try {
    return typecheck(tt, env, e);
  } catch (const StaticTypeError&) {
    return std::nullopt;
  }
}

}  // namespace hb
