#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

namespace hb {

// Source position, 1-based. {0,0} marks synthesized nodes.
struct Span {
  int line = 0;
  int col = 0;
  bool operator==(const Span&) const = default;
};

std::string to_string(const Span& s);

using ClassName = std::string;
using MethodName = std::string;
using VarName = std::string;

// Key of a method in the type table, class table and cache.
struct MethodKey {
  ClassName cls;
  MethodName meth;
  auto operator<=>(const MethodKey&) const = default;
};

std::string to_string(const MethodKey& k);

// A value type: a class A or nil.
struct ValType {
  std::optional<ClassName> cls;  // nullopt means the nil type

  static ValType nil_type() { return ValType{}; }
  static ValType of_class(ClassName c) { return ValType{std::move(c)}; }
  bool is_nil() const { return !cls.has_value(); }
  bool operator==(const ValType&) const = default;
};

std::string to_string(const ValType& t);

// A method type: domain -> range.
struct MethType {
  ValType dom;
  ValType rng;
  bool operator==(const MethType&) const = default;
};

std::string to_string(const MethType& t);

// A run-time value: nil or an instance [A].
struct Value {
  std::optional<ClassName> cls;  // nullopt means nil

  static Value nil() { return Value{}; }
  static Value instance(ClassName c) { return Value{std::move(c)}; }
  bool is_nil() const { return !cls.has_value(); }
  bool operator==(const Value&) const = default;
};

std::string to_string(const Value& v);

enum class ExprKind {
  Nil,       // nil literal
  Instance,  // [A]; run-time only, never produced by the parser
  Var,       // x
  SelfRef,   // self
  Assign,    // x = e        (rhs in a)
  Seq,       // e; e         (a, b)
  New,       // A.new
  If,        // if a then b else c end
  Call,      // a.m(b)
  Def,       // def A.m(x) body end   (param in var, body in a)
  TypeDecl,  // type A.m : t -> t
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// A parameter/body pair not yet installed in a class.
struct Premethod {
  VarName param;
  ExprPtr body;
};

struct Expr {
  ExprKind kind;
  Span span;
  ClassName cls;    // Instance, New, Def, TypeDecl
  MethodName meth;  // Call, Def, TypeDecl
  VarName var;      // Var, Assign, Def (parameter)
  ExprPtr a, b, c;  // children, see ExprKind comments
  MethType mtype;   // TypeDecl

  Premethod premethod() const { return Premethod{var, a}; }
};

ExprPtr make_nil(Span sp = {});
ExprPtr make_instance(ClassName cls, Span sp = {});
ExprPtr make_var(VarName v, Span sp = {});
ExprPtr make_self(Span sp = {});
ExprPtr make_assign(VarName v, ExprPtr rhs, Span sp = {});
ExprPtr make_seq(ExprPtr first, ExprPtr rest, Span sp = {});
ExprPtr make_new(ClassName cls, Span sp = {});
ExprPtr make_if(ExprPtr guard, ExprPtr then_e, ExprPtr else_e, Span sp = {});
ExprPtr make_call(ExprPtr recv, MethodName m, ExprPtr arg, Span sp = {});
ExprPtr make_def(ClassName cls, MethodName m, VarName param, ExprPtr body, Span sp = {});
ExprPtr make_type_decl(ClassName cls, MethodName m, MethType t, Span sp = {});

bool is_value(const Expr& e);
std::optional<Value> as_value(const Expr& e);
ExprPtr value_to_expr(const Value& v, Span sp = {});

// Structural equality, insensitive to spans.
bool expr_equal(const Expr& x, const Expr& y);
bool expr_equal(const ExprPtr& x, const ExprPtr& y);
bool premethod_equal(const Premethod& x, const Premethod& y);

// Dynamic class table DT: method key -> premethod. Later def overwrites.
using DynClassTable = std::map<MethodKey, Premethod>;

}  // namespace hb
