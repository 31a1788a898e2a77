#include "qcompiler/parser.hpp"

#include "qcompiler/lexer.hpp"

namespace qcompiler {

namespace {

class Parser {
 public:
  Parser(std::string_view source, std::vector<Token> tokens) : source_(source), tokens_(std::move(tokens)) {}

  QueryNode parse_complex() {
    if (tokens_.empty()) {
      throw CompileError(CompileErrc::EmptyExpression, {0, source_.size()}, "expression has no query text");
    }
    auto items = parse_list_items(0);
    QueryNode top = items.size() == 1 ? std::move(items.front()) : QueryNode::list(std::move(items));
    if (!at_end()) {
      const auto& tok = peek();
      if (tok.kind == TokenKind::RParen) {
        throw CompileError(CompileErrc::UnbalancedParenthesis, tok.span, "')' without matching '('");
      }
      throw CompileError(CompileErrc::UnexpectedToken, tok.span, "expected '+' or '*' before " + describe(tok));
    }
    return QueryNode::complex(std::move(top));
  }

 private:
  // <List> ::= <Dependent> | <List> "+" <Dependent>, by iteration.
  std::vector<QueryNode> parse_list_items(std::size_t depth) {
    std::vector<QueryNode> items;
    items.push_back(parse_dependent(depth));
    while (accept(TokenKind::Plus)) items.push_back(parse_dependent(depth));
    return items;
  }

  // <Dependent> ::= <Atomic> | <Dependent> "*" <Atomic>, left-nested.
  QueryNode parse_dependent(std::size_t depth) {
    QueryNode left = parse_atomic(depth);
    while (accept(TokenKind::Star)) {
      QueryNode right = parse_atomic(depth);
      left = QueryNode::dependent(std::move(left), std::move(right));
    }
    return left;
  }

  // <Atomic> ::= text | "(" <List> ")"
  QueryNode parse_atomic(std::size_t depth) {
    if (at_end()) {
      throw CompileError(CompileErrc::UnexpectedToken, {source_.size(), source_.size()},
                         "expected a query or '(' at end of input");
    }
    const Token& tok = peek();
    if (tok.kind == TokenKind::Text) {
      ++pos_;
      return QueryNode::atomic(tok.raw);
    }
    if (tok.kind == TokenKind::LParen) {
      if (depth + 1 > kMaxNestingDepth) {
        throw CompileError(CompileErrc::DepthExceeded, tok.span,
                           "parentheses nest deeper than " + std::to_string(kMaxNestingDepth));
      }
      const Span open = tok.span;
      ++pos_;
      auto inner = parse_list_items(depth + 1);
      if (!accept(TokenKind::RParen)) {
        if (at_end()) {
          throw CompileError(CompileErrc::UnbalancedParenthesis, open, "'(' is never closed");
        }
        throw CompileError(CompileErrc::UnexpectedToken, peek().span,
                           "expected '+', '*' or ')' before " + describe(peek()));
      }
      return QueryNode::group(QueryNode::list(std::move(inner)));
    }
    if (tok.kind == TokenKind::RParen) {
      throw CompileError(CompileErrc::UnbalancedParenthesis, tok.span, "')' where a query was expected");
    }
    throw CompileError(CompileErrc::UnexpectedToken, tok.span, "expected a query before " + describe(tok));
  }

  static std::string describe(const Token& tok) {
    return tok.kind == TokenKind::Text ? "query text '" + tok.raw + "'" : "'" + tok.lexeme + "'";
  }

  bool at_end() const { return pos_ == tokens_.size(); }
  const Token& peek() const { return tokens_[pos_]; }
  bool accept(TokenKind kind) {
    if (!at_end() && peek().kind == kind) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string_view source_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

}  // namespace

QueryNode parse(std::string_view expr) { return Parser(expr, tokenize(expr)).parse_complex(); }

}  // namespace qcompiler
