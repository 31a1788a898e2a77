#include "qcompiler/prompts.hpp"

namespace qcompiler {

namespace embedded {
std::string_view embedded_translator_system();
std::string_view embedded_training_data();
std::string_view embedded_leaf_answer();
std::string_view embedded_binding_extraction();
std::string_view embedded_synthesis();
}  // namespace embedded

std::string_view translator_system_prompt() { return embedded::embedded_translator_system(); }
std::string_view training_data_prompt() { return embedded::embedded_training_data(); }
std::string_view leaf_answer_prompt() { return embedded::embedded_leaf_answer(); }
std::string_view binding_extraction_prompt() { return embedded::embedded_binding_extraction(); }
std::string_view synthesis_prompt() { return embedded::embedded_synthesis(); }

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto it = vars.find(std::string{tmpl.substr(i + 1, close - i - 1)});
        if (it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

}  // namespace qcompiler
