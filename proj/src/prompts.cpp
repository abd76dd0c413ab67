#include "ems/prompts.hpp"

#include "ems/embedded_assets.hpp"

namespace ems::prompts {

std::string render(std::string_view tmpl,
                   const std::vector<std::pair<std::string, std::string>>& substitutions) {
  std::string out(tmpl);
  for (const auto& [placeholder, value] : substitutions) {
    if (placeholder.empty()) continue;
    size_t pos = 0;
    while ((pos = out.find(placeholder, pos)) != std::string::npos) {
      out.replace(pos, placeholder.size(), value);
      pos += value.size();
    }
  }
  return out;
}

const std::string& extraction_template() {
  static const std::string t = embedded::kExtractPrompt;
  return t;
}

const std::string& matching_template() {
  static const std::string t = embedded::kMatchPrompt;
  return t;
}

const std::string& scoring_template() {
  static const std::string t = embedded::kScorePrompt;
  return t;
}

const std::string& draft_answer_template() {
  static const std::string t = embedded::kAnswerDraftPrompt;
  return t;
}

const std::string& consolidation_template() {
  static const std::string t = embedded::kAnswerConsolidatePrompt;
  return t;
}

std::string format_candidate_list(const SaliencyPoints& points) {
  std::string out = "[\n";
  for (size_t i = 0; i < points.size(); ++i) {
    out += std::to_string(i);
    out += ": \"";
    out += points[i];
    out += "\"";
    if (i + 1 < points.size()) out += ",";
    out += "\n";
  }
  out += "]";
  return out;
}

}  // namespace ems::prompts
