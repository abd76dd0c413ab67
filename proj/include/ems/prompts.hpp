#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ems/types.hpp"

namespace ems::prompts {

/// Pure textual substitution: every occurrence of each placeholder is
/// replaced by its value, nothing else in the template changes.
std::string render(std::string_view tmpl,
                   const std::vector<std::pair<std::string, std::string>>& substitutions);

/// Built-in prompt templates, embedded at build time from assets/prompts/.
/// Placeholders: extraction uses <ans>; matching uses <ref> and <candid>;
/// scoring uses <kp1>, <kp2> and {max_score}.
const std::string& extraction_template();
const std::string& matching_template();
const std::string& scoring_template();
const std::string& draft_answer_template();     // <Question>
const std::string& consolidation_template();    // <Question>, <Transcript>, <AnswerVersions>

/// Candidate list in the matching prompt's input format:
///   [
///   0: "first point",
///   1: "second point"
///   ]
std::string format_candidate_list(const SaliencyPoints& points);

}  // namespace ems::prompts
