#pragma once

#include <exception>
#include <string>

#include "hb/ast.hpp"

namespace hb {

// Raised when asked to print an expression holding run-time instances,
// which have no concrete syntax.
class PrettyError : public std::exception {
 public:
  explicit PrettyError(Span span);
  Span span() const { return span_; }
  const char* what() const noexcept override { return msg_.c_str(); }

 private:
  Span span_;
  std::string msg_;
};

// Emits source that reparses to a structurally identical expression.
std::string pretty(const Expr& e);
std::string pretty(const ExprPtr& e);

// Like pretty, but renders Instance nodes as "[A]". Output is for traces
// and diagnostics only and does not reparse.
std::string render_runtime(const Expr& e);
std::string render_runtime(const ExprPtr& e);

}  // namespace hb
