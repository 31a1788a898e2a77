#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcompiler/surface.hpp"

namespace qcompiler {

enum class NodeKind { Atomic, Dependent, List, Complex };

std::string_view to_string(NodeKind kind);
std::optional<NodeKind> node_kind_from_string(std::string_view name);

/// Child indices from the root; the root itself is the empty path.
using NodePath = std::vector<std::size_t>;

/// Immutable query AST node.
///
/// Nodes are built only through the named constructors, which enforce the
/// arity rules and derive `value` (canonical expression text of the subtree)
/// and `placeholders` (distinct `{name}` occurrences in `value`).
///
///   Atomic    leaf text, or a parenthesized group wrapping exactly one List
///   Dependent [Dependent|Atomic, Atomic], left-nested
///   List      children are Dependent or Atomic
///   Complex   exactly one non-Complex child; root only
class QueryNode {
 public:
  /// Leaf atomic query. `raw` is surface text: trimmed, escape-closed and free
  /// of unescaped operators and parentheses.
  static QueryNode atomic(std::string raw);
  /// Parenthesized group; `list` must be a List node.
  static QueryNode group(QueryNode list);
  static QueryNode dependent(QueryNode left, QueryNode right);
  /// Requires at least one child; single-child lists only occur inside groups.
  static QueryNode list(std::vector<QueryNode> children);
  static QueryNode complex(QueryNode child);

  NodeKind kind() const noexcept { return kind_; }
  const std::string& value() const noexcept { return value_; }
  const std::vector<QueryNode>& children() const noexcept { return children_; }
  const std::vector<PlaceholderName>& placeholders() const noexcept { return placeholders_; }

  bool is_leaf() const noexcept { return kind_ == NodeKind::Atomic && children_.empty(); }
  bool is_group() const noexcept { return kind_ == NodeKind::Atomic && !children_.empty(); }

  /// Node at `path`, or nullptr when the path leaves the tree.
  const QueryNode* find(const NodePath& path) const;

  friend bool operator==(const QueryNode&, const QueryNode&) = default;

 private:
  QueryNode(NodeKind kind, std::string value, std::vector<QueryNode> children);

  NodeKind kind_;
  std::string value_;
  std::vector<PlaceholderName> placeholders_;
  std::vector<QueryNode> children_;
};

/// Canonical surface form: leaf text verbatim, ` * ` and ` + ` separators,
/// parentheses exactly around groups.
std::string to_expression(const QueryNode& node);

/// Skeleton with leaves renamed A, B, ... in DFS order, e.g. "A*(B+C+D)".
std::string classify_shape(const QueryNode& node);

/// Number of leaf atomics.
std::size_t count_leaves(const QueryNode& node);

/// Height of the tree counting the Complex root as a level.
std::size_t tree_depth(const QueryNode& node);

std::string format_path(const NodePath& path);

}  // namespace qcompiler
