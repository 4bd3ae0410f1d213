#include "hb/lexer.hpp"

#include <cctype>
#include <unordered_map>

namespace hb {

std::string to_string(TokenKind k) {
  switch (k) {
    case TokenKind::KwNil: return "'nil'";
    case TokenKind::KwSelf: return "'self'";
    case TokenKind::KwDef: return "'def'";
    case TokenKind::KwType: return "'type'";
    case TokenKind::KwIf: return "'if'";
    case TokenKind::KwThen: return "'then'";
    case TokenKind::KwElse: return "'else'";
    case TokenKind::KwEnd: return "'end'";
    case TokenKind::KwNew: return "'new'";
    case TokenKind::UpperIdent: return "class name";
    case TokenKind::LowerIdent: return "identifier";
    case TokenKind::Dot: return "'.'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::Semi: return "';'";
    case TokenKind::Newline: return "newline";
    case TokenKind::Eq: return "'='";
    case TokenKind::Colon: return "':'";
    case TokenKind::Arrow: return "'->'";
    case TokenKind::Eof: return "end of input";
  }
  return "?";
}

ParseError::ParseError(Span span, std::string found, std::vector<std::string> expected)
    : span_(span), found_(std::move(found)), expected_(std::move(expected)) {
  rendered_ = to_string(span_) + ": expected ";
  for (size_t i = 0; i < expected_.size(); ++i) {
    if (i > 0) rendered_ += i + 1 == expected_.size() ? " or " : ", ";
    rendered_ += expected_[i];
  }
  rendered_ += ", found " + found_;
}

namespace {

const std::unordered_map<std::string, TokenKind> kKeywords = {
    {"nil", TokenKind::KwNil},   {"self", TokenKind::KwSelf},
    {"def", TokenKind::KwDef},   {"type", TokenKind::KwType},
    {"if", TokenKind::KwIf},     {"then", TokenKind::KwThen},
    {"else", TokenKind::KwElse}, {"end", TokenKind::KwEnd},
    {"new", TokenKind::KwNew},
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)); }
bool ident_cont(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

}  // namespace

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  size_t i = 0;
  auto push = [&](TokenKind k, std::string text, Span sp) {
    out.push_back(Token{k, std::move(text), sp});
  };
  while (i < src.size()) {
    char c = src[i];
    Span sp{line, col};
    if (c == '\n') {
      push(TokenKind::Newline, "\n", sp);
      ++i;
      ++line;
      col = 1;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      ++col;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') {
        ++i;
        ++col;
      }
      continue;
    }
    if (ident_start(c)) {
      size_t start = i;
      while (i < src.size() && ident_cont(src[i])) {
        ++i;
        ++col;
      }
      std::string word(src.substr(start, i - start));
      auto kw = kKeywords.find(word);
      if (kw != kKeywords.end()) {
        push(kw->second, word, sp);
      } else if (std::isupper(static_cast<unsigned char>(word[0]))) {
        push(TokenKind::UpperIdent, word, sp);
      } else {
        push(TokenKind::LowerIdent, word, sp);
      }
      continue;
    }
    switch (c) {
      case '.': push(TokenKind::Dot, ".", sp); break;
      case '(': push(TokenKind::LParen, "(", sp); break;
      case ')': push(TokenKind::RParen, ")", sp); break;
      case ';': push(TokenKind::Semi, ";", sp); break;
      case '=': push(TokenKind::Eq, "=", sp); break;
      case ':': push(TokenKind::Colon, ":", sp); break;
      case '-':
        if (i + 1 < src.size() && src[i + 1] == '>') {
          push(TokenKind::Arrow, "->", sp);
          ++i;
          ++col;
          break;
        }
        throw ParseError(sp, "'-'", {"'->'"});
      default:
        throw ParseError(sp, "'" + std::string(1, c) + "'", {"a token"});
    }
    ++i;
    ++col;
  }
  out.push_back(Token{TokenKind::Eof, "", Span{line, col}});
  return out;
}

}  // namespace hb
