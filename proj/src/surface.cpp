#include "qcompiler/surface.hpp"

#include <algorithm>

namespace qcompiler {

std::string_view to_string(CompileErrc code) {
  switch (code) {
    case CompileErrc::MalformedPlaceholder: return "MalformedPlaceholder";
    case CompileErrc::EmptyAtomic: return "EmptyAtomic";
    case CompileErrc::TrailingEscape: return "TrailingEscape";
    case CompileErrc::InvalidEscape: return "InvalidEscape";
    case CompileErrc::UnbalancedParenthesis: return "UnbalancedParenthesis";
    case CompileErrc::UnexpectedToken: return "UnexpectedToken";
    case CompileErrc::EmptyExpression: return "EmptyExpression";
    case CompileErrc::DepthExceeded: return "DepthExceeded";
  }
  return "CompileError";
}

namespace {

std::string compose_message(CompileErrc code, Span span, const std::string& detail) {
  std::string msg{to_string(code)};
  msg += " at bytes [" + std::to_string(span.begin) + ", " + std::to_string(span.end) + ")";
  if (!detail.empty()) msg += ": " + detail;
  return msg;
}

}  // namespace

CompileError::CompileError(CompileErrc code, Span span, const std::string& detail)
    : std::runtime_error(compose_message(code, span, detail)), code_(code), span_(span), detail_(detail) {}

std::string_view trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && is_space(text[b])) ++b;
  while (e > b && is_space(text[e - 1])) --e;
  return text.substr(b, e - b);
}

std::vector<PlaceholderOccurrence> scan_placeholders(std::string_view text) {
  std::vector<PlaceholderOccurrence> found;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\\') {
      i += 2;
      continue;
    }
    if (c == '}') {
      throw CompileError(CompileErrc::MalformedPlaceholder, {i, i + 1}, "'}' without matching '{'");
    }
    if (c != '{') {
      ++i;
      continue;
    }
    const std::size_t open = i++;
    while (i < text.size() && text[i] != '}') {
      const char d = text[i];
      if (d == '{' || d == '\\' || d == '\n') {
        throw CompileError(CompileErrc::MalformedPlaceholder, {open, i + 1},
                           "invalid character inside placeholder");
      }
      ++i;
    }
    if (i == text.size()) {
      throw CompileError(CompileErrc::MalformedPlaceholder, {open, text.size()}, "unclosed '{'");
    }
    if (i == open + 1) {
      throw CompileError(CompileErrc::MalformedPlaceholder, {open, i + 1}, "empty placeholder");
    }
    found.push_back({std::string{text.substr(open + 1, i - open - 1)}, {open, i + 1}});
    ++i;
  }
  return found;
}

std::vector<PlaceholderName> extract_placeholders(std::string_view text) {
  std::vector<PlaceholderName> names;
  for (auto& occ : scan_placeholders(text)) {
    if (std::find(names.begin(), names.end(), occ.name) == names.end()) {
      names.push_back(std::move(occ.name));
    }
  }
  return names;
}

std::string unescape(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] == '\\' && i + 1 < raw.size()) ++i;
    out.push_back(raw[i]);
  }
  return out;
}

std::string escape(std::string_view literal) {
  std::string out;
  out.reserve(literal.size());
  for (char c : literal) {
    if (kEscapable.find(c) != std::string_view::npos) out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace qcompiler
