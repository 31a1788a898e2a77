#pragma once

#include <map>
#include <string>
#include <string_view>

namespace qcompiler {

/// Bundled templates, byte-identical to the files under data/prompts/.
std::string_view translator_system_prompt();
std::string_view training_data_prompt();
std::string_view leaf_answer_prompt();
std::string_view binding_extraction_prompt();
std::string_view synthesis_prompt();

/// Prompt templates used at run time. Defaults are the bundled files; a
/// config may override any of them.
struct PromptSet {
  std::string translator_system{translator_system_prompt()};
  std::string training_data{training_data_prompt()};
  std::string leaf_answer{leaf_answer_prompt()};
  std::string binding_extraction{binding_extraction_prompt()};
  std::string synthesis{synthesis_prompt()};
};

/// Replaces `{key}` for every key in `vars` in a single pass; inserted values
/// are never rescanned and unknown `{...}` sequences are left alone.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars);

/// The translator system prompt.
inline std::string render_system_prompt() { return std::string{translator_system_prompt()}; }

}  // namespace qcompiler
