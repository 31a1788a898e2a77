#pragma once

// Character-level rules of the expression surface syntax, shared by the
// lexer, the AST constructors and the executor's placeholder substitution.

#include <string>
#include <string_view>
#include <vector>

#include "qcompiler/errors.hpp"

namespace qcompiler {

using PlaceholderName = std::string;

/// UTF-8 encoding of the multiplication sign, accepted as an alias of `*`.
inline constexpr std::string_view kTimesSign = "\xC3\x97";

/// Characters that may follow a backslash.
inline constexpr std::string_view kEscapable = "+*(){}\\";

inline bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view text);

struct PlaceholderOccurrence {
  PlaceholderName name;
  Span span;  // covers the braces
};

/// Every `{name}` occurrence in order, duplicates included. Escaped braces are
/// literal. Throws CompileError(MalformedPlaceholder) on an unclosed or empty
/// placeholder, a stray `}`, or a name containing `{`, `\` or a newline.
std::vector<PlaceholderOccurrence> scan_placeholders(std::string_view text);

/// Distinct placeholder names in order of first appearance.
std::vector<PlaceholderName> extract_placeholders(std::string_view text);

/// Resolves backslash escapes. Assumes escape-closed input.
std::string unescape(std::string_view raw);

/// Inverse of unescape for text free of the multiplication sign, which has no
/// escape form.
std::string escape(std::string_view literal);

}  // namespace qcompiler
