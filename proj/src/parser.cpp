#include "hb/parser.hpp"

#include <vector>

namespace hb {

namespace {

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  ExprPtr program() {
    ExprPtr e = seq();
    skip_newlines();
    expect(TokenKind::Eof);
    return e;
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;

  const Token& cur() const { return toks_[pos_]; }

  const Token& peek(size_t n) const {
    size_t i = pos_ + n;
    return i < toks_.size() ? toks_[i] : toks_.back();
  }

  bool at(TokenKind k) const { return cur().kind == k; }

  Token advance() { return toks_[pos_++]; }

  bool match(TokenKind k) {
    if (!at(k)) return false;
    ++pos_;
    return true;
  }

  Token expect(TokenKind k) {
    if (at(k)) return advance();
    throw ParseError(cur().span, describe(cur()), {to_string(k)});
  }

  void skip_newlines() {
    while (at(TokenKind::Newline)) ++pos_;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::Eof:
      case TokenKind::Newline:
        return to_string(t.kind);
      default:
        return "'" + t.text + "'";
    }
  }

  static bool starts_stmt(TokenKind k) {
    switch (k) {
      case TokenKind::KwDef:
      case TokenKind::KwType:
      case TokenKind::KwIf:
      case TokenKind::KwNil:
      case TokenKind::KwSelf:
      case TokenKind::LowerIdent:
      case TokenKind::UpperIdent:
      case TokenKind::LParen:
        return true;
      default:
        return false;
    }
  }

  // seq := stmt ((";" | NEWLINE) stmt)*, built right-nested.
  ExprPtr seq() {
    skip_newlines();
    Span sp = cur().span;
    ExprPtr first = stmt();
    bool sep = false;
    while (at(TokenKind::Semi) || at(TokenKind::Newline)) {
      ++pos_;
      sep = true;
    }
    if (sep && starts_stmt(cur().kind)) {
      return make_seq(std::move(first), seq(), sp);
    }
    return first;
  }

  ExprPtr stmt() {
    switch (cur().kind) {
      case TokenKind::KwDef:
        return def_stmt();
      case TokenKind::KwType:
        return type_stmt();
      case TokenKind::KwIf:
        return if_stmt();
      case TokenKind::LowerIdent:
        if (peek(1).kind == TokenKind::Eq) {
          Token name = advance();
          expect(TokenKind::Eq);
          skip_newlines();
          return make_assign(name.text, stmt(), name.span);
        }
        return postfix();
      case TokenKind::KwNil:
      case TokenKind::KwSelf:
      case TokenKind::UpperIdent:
      case TokenKind::LParen:
        return postfix();
      default:
        throw ParseError(cur().span, describe(cur()), {"a statement"});
    }
  }

  ExprPtr def_stmt() {
    Token kw = expect(TokenKind::KwDef);
    Token cls = expect(TokenKind::UpperIdent);
    expect(TokenKind::Dot);
    Token meth = expect(TokenKind::LowerIdent);
    expect(TokenKind::LParen);
    Token param = expect(TokenKind::LowerIdent);
    expect(TokenKind::RParen);
    ExprPtr body = seq();
    skip_newlines();
    expect(TokenKind::KwEnd);
    return make_def(cls.text, meth.text, param.text, std::move(body), kw.span);
  }

  ExprPtr type_stmt() {
    Token kw = expect(TokenKind::KwType);
    Token cls = expect(TokenKind::UpperIdent);
    expect(TokenKind::Dot);
    Token meth = expect(TokenKind::LowerIdent);
    expect(TokenKind::Colon);
    ValType dom = typ();
    expect(TokenKind::Arrow);
    ValType rng = typ();
    return make_type_decl(cls.text, meth.text, MethType{dom, rng}, kw.span);
  }

  ExprPtr if_stmt() {
    Token kw = expect(TokenKind::KwIf);
    ExprPtr guard = seq();
    skip_newlines();
    expect(TokenKind::KwThen);
    ExprPtr then_e = seq();
    skip_newlines();
    expect(TokenKind::KwElse);
    ExprPtr else_e = seq();
    skip_newlines();
    expect(TokenKind::KwEnd);
    return make_if(std::move(guard), std::move(then_e), std::move(else_e), kw.span);
  }

  ExprPtr postfix() {
    ExprPtr e = primary();
    Span sp = e->span;
    while (at(TokenKind::Dot)) {
      advance();
      Token meth = expect(TokenKind::LowerIdent);
      expect(TokenKind::LParen);
      ExprPtr arg = seq();
      skip_newlines();
      expect(TokenKind::RParen);
      e = make_call(std::move(e), meth.text, std::move(arg), sp);
    }
    return e;
  }

  ExprPtr primary() {
    switch (cur().kind) {
      case TokenKind::KwNil:
        return make_nil(advance().span);
      case TokenKind::KwSelf:
        return make_self(advance().span);
      case TokenKind::LowerIdent: {
        Token t = advance();
        return make_var(t.text, t.span);
      }
      case TokenKind::UpperIdent: {
        Token cls = advance();
        expect(TokenKind::Dot);
        expect(TokenKind::KwNew);
        return make_new(cls.text, cls.span);
      }
      case TokenKind::LParen: {
        advance();
        ExprPtr e = seq();
        skip_newlines();
        expect(TokenKind::RParen);
        return e;
      }
      default:
        throw ParseError(cur().span, describe(cur()),
                         {"'nil'", "'self'", "identifier", "class name", "'('"});
    }
  }

  ValType typ() {
    if (at(TokenKind::KwNil)) {
      advance();
      return ValType::nil_type();
    }
    if (at(TokenKind::UpperIdent)) {
      return ValType::of_class(advance().text);
    }
    throw ParseError(cur().span, describe(cur()), {"class name", "'nil'"});
  }
};

}  // namespace

ExprPtr parse(std::string_view source) { return Parser(lex(source)).program(); }

}  // namespace hb
