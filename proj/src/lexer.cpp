#include "qcompiler/lexer.hpp"

#include "qcompiler/surface.hpp"

namespace qcompiler {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Text: return "TEXT";
    case TokenKind::Plus: return "PLUS";
    case TokenKind::Star: return "STAR";
    case TokenKind::LParen: return "LPAREN";
    case TokenKind::RParen: return "RPAREN";
  }
  return "?";
}

namespace {

/// Operator at `pos`, with its byte length; length 0 when there is none.
std::pair<TokenKind, std::size_t> operator_at(std::string_view expr, std::size_t pos) {
  switch (expr[pos]) {
    case '+': return {TokenKind::Plus, 1};
    case '*': return {TokenKind::Star, 1};
    case '(': return {TokenKind::LParen, 1};
    case ')': return {TokenKind::RParen, 1};
    default: break;
  }
  if (expr.substr(pos).starts_with(kTimesSign)) return {TokenKind::Star, kTimesSign.size()};
  return {TokenKind::Text, 0};
}

bool opens_operand_slot(TokenKind kind) {
  return kind == TokenKind::Plus || kind == TokenKind::Star || kind == TokenKind::LParen;
}

bool closes_operand_slot(TokenKind kind) {
  return kind == TokenKind::Plus || kind == TokenKind::Star || kind == TokenKind::RParen;
}

}  // namespace

std::vector<Token> tokenize(std::string_view expr) {
  std::vector<Token> tokens;
  std::size_t segment_begin = 0;

  // Emits the pending text run ending at `end`; false when it trims to nothing.
  auto flush = [&](std::size_t end) {
    const auto segment = expr.substr(segment_begin, end - segment_begin);
    const auto text = trim(segment);
    if (text.empty()) return false;
    const std::size_t begin = segment_begin + static_cast<std::size_t>(text.data() - segment.data());
    try {
      scan_placeholders(text);
    } catch (const CompileError& e) {
      throw CompileError(e.code(), {begin + e.span().begin, begin + e.span().end}, e.detail());
    }
    tokens.push_back({TokenKind::Text, unescape(text), std::string{text}, {begin, begin + text.size()}});
    return true;
  };

  std::size_t i = 0;
  while (i < expr.size()) {
    if (expr[i] == '\\') {
      if (i + 1 == expr.size()) {
        throw CompileError(CompileErrc::TrailingEscape, {i, i + 1}, "backslash at end of input");
      }
      if (kEscapable.find(expr[i + 1]) == std::string_view::npos) {
        throw CompileError(CompileErrc::InvalidEscape, {i, i + 2},
                           "only \\+ \\* \\( \\) \\\\ \\{ \\} are escapes");
      }
      i += 2;
      continue;
    }
    const auto [kind, length] = operator_at(expr, i);
    if (length == 0) {
      ++i;
      continue;
    }
    const bool had_text = flush(i);
    if (!had_text && !tokens.empty() && opens_operand_slot(tokens.back().kind) && closes_operand_slot(kind)) {
      throw CompileError(CompileErrc::EmptyAtomic, {tokens.back().span.end, i},
                         "no query text between '" + tokens.back().lexeme + "' and '" +
                             std::string{expr.substr(i, length)} + "'");
    }
    tokens.push_back({kind, std::string{expr.substr(i, length)}, std::string{expr.substr(i, length)}, {i, i + length}});
    i += length;
    segment_begin = i;
  }
  flush(expr.size());
  return tokens;
}

}  // namespace qcompiler
