#pragma once

#include <cstddef>
#include <string_view>

#include "qcompiler/ast.hpp"

namespace qcompiler {

inline constexpr std::size_t kMaxNestingDepth = 64;

/// Parses an expression into a Complex-rooted tree.
///
///   <Atomic>    ::= text | "(" <List> ")"
///   <Dependent> ::= <Atomic> | <Dependent> "*" <Atomic>
///   <List>      ::= <Dependent> | <List> "+" <Dependent>
///   <Complex>   ::= <List>
///
/// `*` chains nest to the left, `+` chains flatten into one List, and unit
/// productions collapse except that a parenthesized group is always an Atomic
/// wrapping a List. Throws CompileError.
QueryNode parse(std::string_view expr);

}  // namespace qcompiler
