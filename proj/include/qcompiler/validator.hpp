#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "qcompiler/ast.hpp"
#include "qcompiler/portable.hpp"

namespace qcompiler {

enum class ViolationKind {
  /// A placeholder where no dependency supplies a value.
  ErroneousDependency,
  /// A dependent position with no placeholder to receive the value.
  MissingDependency,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  NodePath node_path;
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  bool valid = true;
  std::vector<Violation> violations;
  /// Strict-mode findings; never affect `valid`.
  std::vector<std::string> warnings;
};

struct ValidateOptions {
  bool strict = false;
};

/// DFS with a dependency flag: the root starts at 0, a Dependent passes 0 to
/// its left and 1 to its right child, Lists and groups forward the incoming
/// flag. A leaf is erroneous with flag 0 and placeholders, missing with flag 1
/// and none. All violations are collected.
ValidationReport validate(const QueryNode& root, const ValidateOptions& options = {});

ordered_json report_to_json(const ValidationReport& report);

}  // namespace qcompiler
