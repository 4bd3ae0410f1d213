#pragma once

#include <exception>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "hb/ast.hpp"

namespace hb {

// Flow-sensitive type environment: variables (and "self") to value types.
using TypeEnv = std::map<std::string, ValType>;

// Type table TT: method key to declared arrow type. A later type
// declaration overwrites the previous one.
using TypeTable = std::map<MethodKey, MethType>;

// Method keys whose table entry a derivation consulted.
using DepSet = std::set<MethodKey>;

constexpr const char* kSelfName = "self";

// nil <= t, and t <= t.
bool subtype(const ValType& t1, const ValType& t2);

// A join A = A, nil join t = t join nil = t; empty for distinct classes.
std::optional<ValType> lub(const ValType& t1, const ValType& t2);

// Pointwise lub over the intersection of the domains. A shared variable
// whose lub is undefined is dropped from the result.
TypeEnv join_env(const TypeEnv& g1, const TypeEnv& g2);

// g1 <= g2: dom(g2) within dom(g1) and g1(x) <= g2(x) for all x in g2.
bool env_leq(const TypeEnv& g1, const TypeEnv& g2);

class StaticTypeError : public std::exception {
 public:
  StaticTypeError(std::string rule, Span span, std::string message);

  const std::string& rule() const { return rule_; }
  Span span() const { return span_; }
  const std::string& message() const { return message_; }
  // "line:col: [RULE] message" — stable text for golden tests.
  const std::string& render() const { return rendered_; }
  const char* what() const noexcept override { return rendered_.c_str(); }

  bool operator==(const StaticTypeError& o) const {
    return rule_ == o.rule_ && span_ == o.span_ && message_ == o.message_;
  }

 private:
  std::string rule_;
  Span span_;
  std::string message_;
  std::string rendered_;
};

struct CheckResult {
  TypeEnv out_env;
  ValType type;
  DepSet deps;  // every key whose TT entry the derivation looked up
};

// Syntax-directed check of e under tt and env. Throws StaticTypeError on
// failure. Def and TypeDecl nodes yield nil without inspecting bodies.
CheckResult typecheck(const TypeTable& tt, const TypeEnv& env, const Expr& e);

// Non-throwing wrapper.
std::optional<CheckResult> try_typecheck(const TypeTable& tt, const TypeEnv& env,
                                         const Expr& e);

}  // namespace hb
