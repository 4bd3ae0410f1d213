#include "hb/ast.hpp"

namespace hb {

std::string to_string(const Span& s) {
  return std::to_string(s.line) + ":" + std::to_string(s.col);
}

std::string to_string(const MethodKey& k) { return k.cls + "." + k.meth; }

std::string to_string(const ValType& t) { return t.is_nil() ? "nil" : *t.cls; }

std::string to_string(const MethType& t) {
  return to_string(t.dom) + " -> " + to_string(t.rng);
}

std::string to_string(const Value& v) {
  return v.is_nil() ? "nil" : "[" + *v.cls + "]";
}

namespace {

ExprPtr node(ExprKind k, Span sp) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = sp;
  return e;
}

std::shared_ptr<Expr> mut(ExprKind k, Span sp) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->span = sp;
  return e;
}

}  // namespace

ExprPtr make_nil(Span sp) { return node(ExprKind::Nil, sp); }

ExprPtr make_instance(ClassName cls, Span sp) {
  auto e = mut(ExprKind::Instance, sp);
  e->cls = std::move(cls);
  return e;
}

ExprPtr make_var(VarName v, Span sp) {
  auto e = mut(ExprKind::Var, sp);
  e->var = std::move(v);
  return e;
}

ExprPtr make_self(Span sp) { return node(ExprKind::SelfRef, sp); }

ExprPtr make_assign(VarName v, ExprPtr rhs, Span sp) {
  auto e = mut(ExprKind::Assign, sp);
  e->var = std::move(v);
  e->a = std::move(rhs);
  return e;
}

ExprPtr make_seq(ExprPtr first, ExprPtr rest, Span sp) {
  auto e = mut(ExprKind::Seq, sp);
  e->a = std::move(first);
  e->b = std::move(rest);
  return e;
}

ExprPtr make_new(ClassName cls, Span sp) {
  auto e = mut(ExprKind::New, sp);
  e->cls = std::move(cls);
  return e;
}

ExprPtr make_if(ExprPtr guard, ExprPtr then_e, ExprPtr else_e, Span sp) {
  auto e = mut(ExprKind::If, sp);
  e->a = std::move(guard);
  e->b = std::move(then_e);
  e->c = std::move(else_e);
  return e;
}

ExprPtr make_call(ExprPtr recv, MethodName m, ExprPtr arg, Span sp) {
  auto e = mut(ExprKind::Call, sp);
  e->a = std::move(recv);
  e->meth = std::move(m);
  e->b = std::move(arg);
  return e;
}

ExprPtr make_def(ClassName cls, MethodName m, VarName param, ExprPtr body, Span sp) {
  auto e = mut(ExprKind::Def, sp);
  e->cls = std::move(cls);
  e->meth = std::move(m);
  e->var = std::move(param);
  e->a = std::move(body);
  return e;
}

ExprPtr make_type_decl(ClassName cls, MethodName m, MethType t, Span sp) {
  auto e = mut(ExprKind::TypeDecl, sp);
  e->cls = std::move(cls);
  e->meth = std::move(m);
  e->mtype = std::move(t);
  return e;
}

bool is_value(const Expr& e) {
  return e.kind == ExprKind::Nil || e.kind == ExprKind::Instance;
}

std::optional<Value> as_value(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Nil:
      return Value::nil();
    case ExprKind::Instance:
      return Value::instance(e.cls);
    default:
      return std::nullopt;
  }
}

ExprPtr value_to_expr(const Value& v, Span sp) {
  return v.is_nil() ? make_nil(sp) : make_instance(*v.cls, sp);
}

bool expr_equal(const ExprPtr& x, const ExprPtr& y) {
  if (x == y) return true;
  if (!x || !y) return false;
  return expr_equal(*x, *y);
}

bool expr_equal(const Expr& x, const Expr& y) {
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case ExprKind::Nil:
    case ExprKind::SelfRef:
      return true;
    case ExprKind::Instance:
    case ExprKind::New:
      return x.cls == y.cls;
    case ExprKind::Var:
      return x.var == y.var;
    case ExprKind::Assign:
      return x.var == y.var && expr_equal(x.a, y.a);
    case ExprKind::Seq:
      return expr_equal(x.a, y.a) && expr_equal(x.b, y.b);
    case ExprKind::If:
      return expr_equal(x.a, y.a) && expr_equal(x.b, y.b) && expr_equal(x.c, y.c);
    case ExprKind::Call:
      return x.meth == y.meth && expr_equal(x.a, y.a) && expr_equal(x.b, y.b);
    case ExprKind::Def:
      return x.cls == y.cls && x.meth == y.meth && x.var == y.var && expr_equal(x.a, y.a);
    case ExprKind::TypeDecl:
      return x.cls == y.cls && x.meth == y.meth && x.mtype == y.mtype;
  }
  return false;
}

bool premethod_equal(const Premethod& x, const Premethod& y) {
  return x.param == y.param && expr_equal(x.body, y.body);
}

}  // namespace hb
