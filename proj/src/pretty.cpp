#include "hb/pretty.hpp"

namespace hb {

PrettyError::PrettyError(Span span) : span_(span) {
  msg_ = to_string(span) + ": instance values have no source form";
}

namespace {

// Grammar levels, loosest first. A child printed in a slot that requires
// a tighter level gets parenthesized.
enum Prec { kSeq = 0, kStmt = 1, kPostfix = 2, kPrimary = 3 };

Prec prec_of(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Seq:
      return kSeq;
    case ExprKind::Assign:
    case ExprKind::If:
    case ExprKind::Def:
    case ExprKind::TypeDecl:
      return kStmt;
    case ExprKind::Call:
      return kPostfix;
    default:
      return kPrimary;
  }
}

void print(const Expr& e, Prec min, std::string& out, bool runtime) {
  if (prec_of(e) < min) {
    out += "(";
    print(e, kSeq, out, runtime);
    out += ")";
    return;
  }
  switch (e.kind) {
    case ExprKind::Nil:
      out += "nil";
      break;
    case ExprKind::Instance:
      if (!runtime) throw PrettyError(e.span);
      out += "[" + e.cls + "]";
      break;
    case ExprKind::Var:
      out += e.var;
      break;
    case ExprKind::SelfRef:
      out += "self";
      break;
    case ExprKind::New:
      out += e.cls + ".new";
      break;
    case ExprKind::Assign:
      out += e.var + " = ";
      print(*e.a, kStmt, out, runtime);
      break;
    case ExprKind::Seq:
      print(*e.a, kStmt, out, runtime);
      out += "; ";
      print(*e.b, kSeq, out, runtime);
      break;
    case ExprKind::If:
      out += "if ";
      print(*e.a, kSeq, out, runtime);
      out += " then ";
      print(*e.b, kSeq, out, runtime);
      out += " else ";
      print(*e.c, kSeq, out, runtime);
      out += " end";
      break;
    case ExprKind::Call:
      print(*e.a, kPostfix, out, runtime);
      out += "." + e.meth + "(";
      print(*e.b, kSeq, out, runtime);
      out += ")";
      break;
    case ExprKind::Def:
      out += "def " + e.cls + "." + e.meth + "(" + e.var + ") ";
      print(*e.a, kSeq, out, runtime);
      out += " end";
      break;
    case ExprKind::TypeDecl:
      out += "type " + e.cls + "." + e.meth + " : " + to_string(e.mtype);
      break;
  }
}

}  // namespace

std::string pretty(const Expr& e) {
  std::string out;
  print(e, kSeq, out, false);
  return out;
}

std::string pretty(const ExprPtr& e) { return pretty(*e); }

std::string render_runtime(const Expr& e) {
  std::string out;
  print(e, kSeq, out, true);
  return out;
}

std::string render_runtime(const ExprPtr& e) { return render_runtime(*e); }

}  // namespace hb
