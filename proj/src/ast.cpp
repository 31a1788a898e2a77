#include "qcompiler/ast.hpp"

#include <algorithm>

namespace qcompiler {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Atomic: return "Atomic";
    case NodeKind::Dependent: return "Dependent";
    case NodeKind::List: return "List";
    case NodeKind::Complex: return "Complex";
  }
  return "?";
}

std::optional<NodeKind> node_kind_from_string(std::string_view name) {
  for (auto kind : {NodeKind::Atomic, NodeKind::Dependent, NodeKind::List, NodeKind::Complex}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

namespace {

void check_leaf_text(std::string_view raw) {
  if (raw.empty()) throw InvalidNode("atomic query text is empty");
  if (is_space(raw.front()) || is_space(raw.back())) {
    throw InvalidNode("atomic query text has surrounding whitespace");
  }
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const char c = raw[i];
    if (c == '\\') {
      if (i + 1 == raw.size() || kEscapable.find(raw[i + 1]) == std::string_view::npos) {
        throw InvalidNode("atomic query text has a dangling or unknown escape");
      }
      ++i;
      continue;
    }
    if (c == '+' || c == '*' || c == '(' || c == ')' || raw.substr(i).starts_with(kTimesSign)) {
      throw InvalidNode("atomic query text contains an unescaped operator");
    }
  }
  try {
    scan_placeholders(raw);
  } catch (const CompileError& e) {
    throw InvalidNode(std::string{"atomic query text: "} + e.what());
  }
}

bool is_operand(const QueryNode& node) {
  return node.kind() == NodeKind::Atomic || node.kind() == NodeKind::Dependent;
}

}  // namespace

QueryNode::QueryNode(NodeKind kind, std::string value, std::vector<QueryNode> children)
    : kind_(kind), value_(std::move(value)), children_(std::move(children)) {
  if (children_.empty()) {
    placeholders_ = extract_placeholders(value_);
    return;
  }
  // Interior text is the concatenation of the children's, so the ordered
  // union of their placeholder lists is exactly what a rescan would find.
  for (const auto& child : children_) {
    for (const auto& name : child.placeholders_) {
      if (std::find(placeholders_.begin(), placeholders_.end(), name) == placeholders_.end()) {
        placeholders_.push_back(name);
      }
    }
  }
}

QueryNode QueryNode::atomic(std::string raw) {
  check_leaf_text(raw);
  return QueryNode(NodeKind::Atomic, std::move(raw), {});
}

QueryNode QueryNode::group(QueryNode list) {
  if (list.kind() != NodeKind::List) throw InvalidNode("a parenthesized group must wrap a List");
  std::string value = "(" + list.value() + ")";
  std::vector<QueryNode> children;
  children.push_back(std::move(list));
  return QueryNode(NodeKind::Atomic, std::move(value), std::move(children));
}

QueryNode QueryNode::dependent(QueryNode left, QueryNode right) {
  if (!is_operand(left)) throw InvalidNode("Dependent left operand must be Dependent or Atomic");
  if (right.kind() != NodeKind::Atomic) throw InvalidNode("Dependent right operand must be Atomic");
  std::string value = left.value() + " * " + right.value();
  std::vector<QueryNode> children;
  children.reserve(2);
  children.push_back(std::move(left));
  children.push_back(std::move(right));
  return QueryNode(NodeKind::Dependent, std::move(value), std::move(children));
}

QueryNode QueryNode::list(std::vector<QueryNode> children) {
  if (children.empty()) throw InvalidNode("List needs at least one child");
  std::string value;
  for (const auto& child : children) {
    if (!is_operand(child)) throw InvalidNode("List children must be Dependent or Atomic");
    if (!value.empty()) value += " + ";
    value += child.value();
  }
  return QueryNode(NodeKind::List, std::move(value), std::move(children));
}

QueryNode QueryNode::complex(QueryNode child) {
  if (child.kind() == NodeKind::Complex) throw InvalidNode("Complex cannot nest");
  std::string value = child.value();
  std::vector<QueryNode> children;
  children.push_back(std::move(child));
  return QueryNode(NodeKind::Complex, std::move(value), std::move(children));
}

const QueryNode* QueryNode::find(const NodePath& path) const {
  const QueryNode* node = this;
  for (auto index : path) {
    if (index >= node->children_.size()) return nullptr;
    node = &node->children_[index];
  }
  return node;
}

std::string to_expression(const QueryNode& node) {
  switch (node.kind()) {
    case NodeKind::Atomic:
      return node.is_leaf() ? node.value() : "(" + to_expression(node.children()[0]) + ")";
    case NodeKind::Dependent:
      return to_expression(node.children()[0]) + " * " + to_expression(node.children()[1]);
    case NodeKind::List: {
      std::string out;
      for (const auto& child : node.children()) {
        if (!out.empty()) out += " + ";
        out += to_expression(child);
      }
      return out;
    }
    case NodeKind::Complex:
      return to_expression(node.children()[0]);
  }
  return {};
}

namespace {

std::string leaf_label(std::size_t index) {
  std::string label;
  ++index;
  while (index > 0) {
    --index;
    label.insert(label.begin(), static_cast<char>('A' + index % 26));
    index /= 26;
  }
  return label;
}

void shape_of(const QueryNode& node, std::size_t& next, std::string& out) {
  switch (node.kind()) {
    case NodeKind::Atomic:
      if (node.is_leaf()) {
        out += leaf_label(next++);
      } else {
        out += '(';
        shape_of(node.children()[0], next, out);
        out += ')';
      }
      return;
    case NodeKind::Dependent:
      shape_of(node.children()[0], next, out);
      out += '*';
      shape_of(node.children()[1], next, out);
      return;
    case NodeKind::List:
      for (std::size_t i = 0; i < node.children().size(); ++i) {
        if (i > 0) out += '+';
        shape_of(node.children()[i], next, out);
      }
      return;
    case NodeKind::Complex:
      shape_of(node.children()[0], next, out);
      return;
  }
}

}  // namespace

std::string classify_shape(const QueryNode& node) {
  std::string out;
  std::size_t next = 0;
  shape_of(node, next, out);
  return out;
}

std::size_t count_leaves(const QueryNode& node) {
  if (node.is_leaf()) return 1;
  std::size_t n = 0;
  for (const auto& child : node.children()) n += count_leaves(child);
  return n;
}

std::size_t tree_depth(const QueryNode& node) {
  std::size_t deepest = 0;
  for (const auto& child : node.children()) deepest = std::max(deepest, tree_depth(child));
  return deepest + 1;
}

std::string format_path(const NodePath& path) {
  std::string out = "[";
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(path[i]);
  }
  return out + "]";
}

}  // namespace qcompiler
