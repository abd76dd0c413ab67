#pragma once

#include <string>
#include <vector>

#include "ems/types.hpp"

namespace ems {

class Gateway;

/// Cue phrases that open a summary paragraph ("overviews and conclusions").
std::vector<std::string> default_summary_cues();

struct ExtractorConfig {
  enum class Mode { kHeuristic, kLlm };

  Mode mode = Mode::kHeuristic;
  std::vector<std::string> summary_cues = default_summary_cues();
  int max_sentences_per_point = 2;
  std::string prompt_template;  // empty -> built-in template
};

/// Drop a leading and/or trailing paragraph when (and only when) it begins
/// with one of the cue phrases, case-insensitively. Interior paragraphs are
/// never touched. If stripping would leave nothing, the input is returned
/// unchanged.
std::string strip_summary(const std::string& long_form_text,
                          const std::vector<std::string>& cues);

/// Deterministic point splitter: each bullet item becomes one point (items
/// longer than max_sentences_per_point sentences are chunked), non-bulleted
/// prose is grouped into runs of max_sentences_per_point sentences.
/// Duplicates are preserved; no point mixes text from two paragraphs.
SaliencyPoints split_points(const std::string& long_form_text,
                            int max_sentences_per_point = 2);

/// Prompted extraction: renders the template's <ans> slot, asks the model
/// for a list of strings and parses it (strict JSON list first, then
/// bullet/quoted lines). Re-prompts up to twice on a malformed reply, then
/// raises ExtractionError carrying the raw reply.
SaliencyPoints extract_llm(const std::string& long_form_text,
                           const ExtractorConfig& config, Gateway& gateway);

/// Full extraction stage: summary stripping as a pre-pass, then the
/// configured splitter. `gateway` may be null in heuristic mode.
SaliencyPoints extract(const std::string& long_form_text,
                       const ExtractorConfig& config, Gateway* gateway);

/// Reply decoding used by extract_llm, exposed for tests. Attempts, in
/// order: a JSON list of strings, "-"/"*" bullet lines, quoted lines.
/// Returns an empty list when nothing parses.
std::vector<std::string> parse_point_list_reply(const std::string& reply);

}  // namespace ems
