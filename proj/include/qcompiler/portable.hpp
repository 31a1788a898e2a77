#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "qcompiler/ast.hpp"

namespace qcompiler {

using ordered_json = nlohmann::ordered_json;

/// AST document: {"kind", "value", "placeholders", "children"} in that order.
ordered_json to_portable(const QueryNode& node);

/// Rebuilds a tree from its document. Throws SchemaViolation on an unknown
/// kind, missing or extra fields, arity violations, or a value/placeholder
/// list that disagrees with the one derived from the children.
QueryNode from_portable(const ordered_json& doc);

/// Pretty form uses 2-space indentation; compact form has no whitespace.
std::string dump_ast(const QueryNode& node, bool compact = false);
QueryNode load_ast(std::string_view text);

/// Indented `ComplexQuery(value='...', [` rendering, two spaces per level.
/// A parenthesized group prints as one ListQuery line carrying the group text.
std::string render_tree(const QueryNode& node);

}  // namespace qcompiler
