#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qcompiler/errors.hpp"

namespace qcompiler {

enum class TokenKind { Text, Plus, Star, LParen, RParen };

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  /// Literal text for Text tokens (escapes resolved); the glyph otherwise.
  std::string lexeme;
  /// Trimmed source slice, escapes intact.
  std::string raw;
  Span span;

  friend bool operator==(const Token&, const Token&) = default;
};

/// Splits on unescaped `+`, `*` (or `×`), `(` and `)`. Text runs are trimmed
/// of surrounding whitespace and checked for placeholder well-formedness.
///
/// Throws CompileError with EmptyAtomic when an operand slot between two
/// operators/parentheses is blank, TrailingEscape, InvalidEscape, or
/// MalformedPlaceholder.
std::vector<Token> tokenize(std::string_view expr);

}  // namespace qcompiler
