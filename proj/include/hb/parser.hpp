#pragma once

#include <string_view>

#include "hb/ast.hpp"
#include "hb/lexer.hpp"

namespace hb {

// Parses a whole program. Throws ParseError on malformed input.
//
//   program  := expr
//   expr     := seq
//   seq      := stmt ( (";" | NEWLINE) stmt )*
//   stmt     := "def" CID "." MID "(" VID ")" expr "end"
//             | "type" CID "." MID ":" typ "->" typ
//             | VID "=" stmt
//             | "if" expr "then" expr "else" expr "end"
//             | postfix
//   postfix  := primary ( "." MID "(" expr ")" )*
//   primary  := "nil" | "self" | VID | CID ".new" | "(" expr ")"
//   typ      := CID | "nil"
ExprPtr parse(std::string_view source);

}  // namespace hb
