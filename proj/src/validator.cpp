#include "qcompiler/validator.hpp"

#include <algorithm>

namespace qcompiler {

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::ErroneousDependency: return "ErroneousDependency";
    case ViolationKind::MissingDependency: return "MissingDependency";
  }
  return "?";
}

namespace {

class Walker {
 public:
  Walker(const ValidateOptions& options, ValidationReport& report) : options_(options), report_(report) {}

  void visit(const QueryNode& node, bool dependent_position) {
    switch (node.kind()) {
      case NodeKind::Atomic:
        if (node.is_group()) {
          descend(node, 0, dependent_position);
        } else {
          check_leaf(node, dependent_position);
        }
        return;
      case NodeKind::Dependent:
        descend(node, 0, false);
        descend(node, 1, true);
        return;
      case NodeKind::List:
        for (std::size_t i = 0; i < node.children().size(); ++i) descend(node, i, dependent_position);
        return;
      case NodeKind::Complex:
        descend(node, 0, dependent_position);
        return;
    }
  }

 private:
  void descend(const QueryNode& node, std::size_t index, bool dependent_position) {
    path_.push_back(index);
    visit(node.children()[index], dependent_position);
    path_.pop_back();
  }

  void check_leaf(const QueryNode& leaf, bool dependent_position) {
    const bool has_names = !leaf.placeholders().empty();
    if (!dependent_position && has_names) {
      std::string names;
      for (const auto& n : leaf.placeholders()) names += (names.empty() ? "{" : ", {") + n + "}";
      add(ViolationKind::ErroneousDependency,
          "'" + leaf.value() + "' uses " + names + " but no dependency supplies a value");
    } else if (dependent_position && !has_names) {
      add(ViolationKind::MissingDependency,
          "'" + leaf.value() + "' depends on a previous result but has no placeholder");
    }
    if (options_.strict && dependent_position) strict_checks(leaf);
  }

  void strict_checks(const QueryNode& leaf) {
    const auto occurrences = scan_placeholders(leaf.value());
    for (std::size_t i = 0; i < occurrences.size(); ++i) {
      const auto& name = occurrences[i].name;
      if (trim(name).empty()) {
        warn("whitespace-only placeholder name in '" + leaf.value() + "'");
      }
      const bool first = std::none_of(occurrences.begin(), occurrences.begin() + static_cast<std::ptrdiff_t>(i),
                                      [&](const auto& o) { return o.name == name; });
      const auto repeats = std::count_if(occurrences.begin(), occurrences.end(),
                                         [&](const auto& o) { return o.name == name; });
      if (first && repeats > 1) {
        warn("placeholder {" + name + "} appears " + std::to_string(repeats) + " times in '" + leaf.value() + "'");
      }
    }
  }

  void add(ViolationKind kind, std::string message) {
    report_.violations.push_back({path_, kind, std::move(message)});
  }

  void warn(const std::string& message) { report_.warnings.push_back(format_path(path_) + " " + message); }

  const ValidateOptions& options_;
  ValidationReport& report_;
  NodePath path_;
};

}  // namespace

ValidationReport validate(const QueryNode& root, const ValidateOptions& options) {
  ValidationReport report;
  Walker(options, report).visit(root, false);
  report.valid = report.violations.empty();
  return report;
}

ordered_json report_to_json(const ValidationReport& report) {
  ordered_json doc;
  doc["valid"] = report.valid;
  auto violations = ordered_json::array();
  for (const auto& v : report.violations) {
    ordered_json item;
    item["node_path"] = v.node_path;
    item["kind"] = std::string{to_string(v.kind)};
    item["message"] = v.message;
    violations.push_back(std::move(item));
  }
  doc["violations"] = std::move(violations);
  if (!report.warnings.empty()) doc["warnings"] = report.warnings;
  return doc;
}

}  // namespace qcompiler
