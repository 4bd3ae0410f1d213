#pragma once

#include <exception>
#include <string>
#include <string_view>
#include <vector>

#include "hb/ast.hpp"

namespace hb {

enum class TokenKind {
  KwNil,
  KwSelf,
  KwDef,
  KwType,
  KwIf,
  KwThen,
  KwElse,
  KwEnd,
  KwNew,
  UpperIdent,  // class id
  LowerIdent,  // variable / method id
  Dot,
  LParen,
  RParen,
  Semi,
  Newline,
  Eq,
  Colon,
  Arrow,
  Eof,
};

std::string to_string(TokenKind k);

struct Token {
  TokenKind kind;
  std::string text;
  Span span;
};

// Raised on malformed input; carries the position and the token kinds
// that would have been accepted there.
class ParseError : public std::exception {
 public:
  ParseError(Span span, std::string found, std::vector<std::string> expected);

  Span span() const { return span_; }
  const std::string& found() const { return found_; }
  const std::vector<std::string>& expected() const { return expected_; }
  const char* what() const noexcept override { return rendered_.c_str(); }
  const std::string& render() const { return rendered_; }

 private:
  Span span_;
  std::string found_;
  std::vector<std::string> expected_;
  std::string rendered_;
};

// Tokenizes the whole input. '#' starts a comment running to end of line.
// Newlines are emitted as tokens; the parser decides where they separate.
std::vector<Token> lex(std::string_view source);

}  // namespace hb
