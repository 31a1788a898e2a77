#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qcompiler {

/// Half-open byte range [begin, end) into the source expression.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const Span&, const Span&) = default;
};

enum class CompileErrc {
  MalformedPlaceholder,
  EmptyAtomic,
  TrailingEscape,
  InvalidEscape,
  UnbalancedParenthesis,
  UnexpectedToken,
  EmptyExpression,
  DepthExceeded,
};

std::string_view to_string(CompileErrc code);

/// Lexical or syntactic failure, located by byte span.
class CompileError : public std::runtime_error {
 public:
  CompileError(CompileErrc code, Span span, const std::string& detail);

  CompileErrc code() const noexcept { return code_; }
  const Span& span() const noexcept { return span_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  CompileErrc code_;
  Span span_;
  std::string detail_;
};

/// A node construction request that breaks the AST invariants.
class InvalidNode : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A serialized AST document that does not satisfy the document schema.
class SchemaViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qcompiler
