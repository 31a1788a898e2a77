#include "qcompiler/portable.hpp"

#include <array>

namespace qcompiler {

ordered_json to_portable(const QueryNode& node) {
  ordered_json doc;
  doc["kind"] = std::string{to_string(node.kind())};
  doc["value"] = node.value();
  doc["placeholders"] = node.placeholders();
  auto children = ordered_json::array();
  for (const auto& child : node.children()) children.push_back(to_portable(child));
  doc["children"] = std::move(children);
  return doc;
}

namespace {

const std::array<std::string, 4> kFields{"kind", "value", "placeholders", "children"};

QueryNode rebuild(const ordered_json& doc, const std::string& where) {
  if (!doc.is_object()) throw SchemaViolation(where + ": node must be an object");
  for (const auto& field : kFields) {
    if (!doc.contains(field)) {
      throw SchemaViolation(where + ": missing field \"" + field + "\"");
    }
  }
  if (doc.size() != kFields.size()) throw SchemaViolation(where + ": unexpected extra fields");
  const auto& kind_field = doc["kind"];
  const auto& value_field = doc["value"];
  const auto& names_field = doc["placeholders"];
  const auto& children_field = doc["children"];
  if (!kind_field.is_string()) throw SchemaViolation(where + ": \"kind\" must be a string");
  if (!value_field.is_string()) throw SchemaViolation(where + ": \"value\" must be a string");
  if (!names_field.is_array()) throw SchemaViolation(where + ": \"placeholders\" must be an array");
  if (!children_field.is_array()) throw SchemaViolation(where + ": \"children\" must be an array");

  const auto kind_name = kind_field.get<std::string>();
  const auto kind = node_kind_from_string(kind_name);
  if (!kind) throw SchemaViolation(where + ": unknown kind \"" + kind_name + "\"");

  std::vector<QueryNode> children;
  for (std::size_t i = 0; i < children_field.size(); ++i) {
    children.push_back(rebuild(children_field[i], where + "/" + std::to_string(i)));
  }

  auto expect_arity = [&](bool ok, const char* rule) {
    if (!ok) throw SchemaViolation(where + ": " + kind_name + " " + rule);
  };

  std::optional<QueryNode> node;
  try {
    switch (*kind) {
      case NodeKind::Atomic:
        expect_arity(children.size() <= 1, "takes no children or one List");
        node = children.empty() ? QueryNode::atomic(value_field.get<std::string>())
                                : QueryNode::group(std::move(children[0]));
        break;
      case NodeKind::Dependent:
        expect_arity(children.size() == 2, "takes exactly 2 children");
        node = QueryNode::dependent(std::move(children[0]), std::move(children[1]));
        break;
      case NodeKind::List:
        expect_arity(!children.empty(), "takes at least one child");
        node = QueryNode::list(std::move(children));
        break;
      case NodeKind::Complex:
        expect_arity(children.size() == 1, "takes exactly 1 child");
        expect_arity(where == "$", "is only allowed at the root");
        node = QueryNode::complex(std::move(children[0]));
        break;
    }
  } catch (const InvalidNode& e) {
    throw SchemaViolation(where + ": " + e.what());
  }

  if (node->value() != value_field.get<std::string>()) {
    throw SchemaViolation(where + ": \"value\" does not match the children's canonical text");
  }
  std::vector<std::string> names;
  for (const auto& n : names_field) {
    if (!n.is_string()) throw SchemaViolation(where + ": placeholder names must be strings");
    names.push_back(n.get<std::string>());
  }
  if (names != node->placeholders()) {
    throw SchemaViolation(where + ": \"placeholders\" does not match the placeholders in \"value\"");
  }
  return std::move(*node);
}

}  // namespace

QueryNode from_portable(const ordered_json& doc) { return rebuild(doc, "$"); }

std::string dump_ast(const QueryNode& node, bool compact) {
  return compact ? to_portable(node).dump() : to_portable(node).dump(2);
}

QueryNode load_ast(std::string_view text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaViolation(std::string{"not valid JSON: "} + e.what());
  }
  return from_portable(doc);
}

namespace {

std::string_view tree_label(const QueryNode& node) {
  switch (node.kind()) {
    case NodeKind::Atomic: return node.is_leaf() ? "AtomicQuery" : "ListQuery";
    case NodeKind::Dependent: return "DependentQuery";
    case NodeKind::List: return "ListQuery";
    case NodeKind::Complex: return "ComplexQuery";
  }
  return "?";
}

void render_node(const QueryNode& node, std::size_t depth, bool last, std::string& out) {
  const std::string indent(depth * 2, ' ');
  // A group is shown as the List it wraps, carrying the parenthesized text.
  const auto& body = node.is_group() ? node.children()[0] : node;

  out += indent;
  out += tree_label(node);
  out += "(value='" + node.value() + "'";
  const bool shows_names = node.kind() == NodeKind::Atomic || node.kind() == NodeKind::List;
  if (shows_names && !node.placeholders().empty()) {
    out += ", placeholder=[";
    for (std::size_t i = 0; i < node.placeholders().size(); ++i) {
      if (i > 0) out += ", ";
      out += "'" + node.placeholders()[i] + "'";
    }
    out += "]";
  }
  if (body.children().empty()) {
    out += ")";
  } else {
    out += ", [\n";
    const auto& kids = body.children();
    for (std::size_t i = 0; i < kids.size(); ++i) {
      render_node(kids[i], depth + 1, i + 1 == kids.size(), out);
    }
    out += indent + "])";
  }
  if (!last) out += ",";
  out += "\n";
}

}  // namespace

std::string render_tree(const QueryNode& node) {
  std::string out;
  render_node(node, 0, true, out);
  return out;
}

}  // namespace qcompiler
