#include "ems/extraction.hpp"

#include <nlohmann/json.hpp>

#include "ems/errors.hpp"
#include "ems/gateway.hpp"
#include "ems/prompts.hpp"
#include "ems/text.hpp"

namespace ems {

using nlohmann::json;

std::vector<std::string> default_summary_cues() {
  return {"in summary", "in conclusion", "overall", "to conclude", "to summarize"};
}

namespace {

bool starts_with_cue(const std::string& paragraph, const std::vector<std::string>& cues) {
  std::string lowered = text::to_lower(paragraph);
  for (const std::string& cue : cues) {
    if (lowered.rfind(text::to_lower(cue), 0) == 0) return true;
  }
  return false;
}

void append_sentence_groups(const std::string& prose, int max_sentences,
                            SaliencyPoints& out) {
  std::vector<std::string> sentences = text::split_sentences(prose);
  for (size_t i = 0; i < sentences.size(); i += static_cast<size_t>(max_sentences)) {
    std::string point = sentences[i];
    for (size_t j = i + 1; j < sentences.size() && j < i + static_cast<size_t>(max_sentences);
         ++j) {
      point += " ";
      point += sentences[j];
    }
    out.push_back(std::move(point));
  }
}

}  // namespace

std::string strip_summary(const std::string& long_form_text,
                          const std::vector<std::string>& cues) {
  std::vector<std::string> paragraphs = text::split_paragraphs(long_form_text);
  if (paragraphs.empty()) return long_form_text;
  size_t begin = 0;
  size_t end = paragraphs.size();
  if (starts_with_cue(paragraphs.front(), cues)) ++begin;
  if (end > begin && starts_with_cue(paragraphs[end - 1], cues)) --end;
  if (begin >= end) return long_form_text;
  std::string out;
  for (size_t i = begin; i < end; ++i) {
    if (!out.empty()) out += "\n\n";
    out += paragraphs[i];
  }
  return out;
}

SaliencyPoints split_points(const std::string& long_form_text, int max_sentences_per_point) {
  if (max_sentences_per_point < 1) {
    throw ContractError("max_sentences_per_point must be >= 1");
  }
  SaliencyPoints points;
  for (const std::string& paragraph : text::split_paragraphs(long_form_text)) {
    std::string prose;
    auto flush_prose = [&] {
      if (prose.empty()) return;
      append_sentence_groups(prose, max_sentences_per_point, points);
      prose.clear();
    };
    size_t pos = 0;
    while (pos <= paragraph.size()) {
      size_t eol = paragraph.find('\n', pos);
      std::string line = eol == std::string::npos ? paragraph.substr(pos)
                                                  : paragraph.substr(pos, eol - pos);
      if (text::is_bullet_line(line)) {
        flush_prose();
        std::string item = text::strip_bullet_marker(line);
        if (!item.empty()) {
          // A long bullet item is still chunked to the sentence cap.
          append_sentence_groups(item, max_sentences_per_point, points);
        }
      } else {
        std::string trimmed = text::trim(line);
        if (!trimmed.empty()) {
          if (!prose.empty()) prose += " ";
          prose += trimmed;
        }
      }
      if (eol == std::string::npos) break;
      pos = eol + 1;
    }
    flush_prose();
  }
  return points;
}

std::vector<std::string> parse_point_list_reply(const std::string& reply) {
  std::string trimmed = text::trim(reply);

  // 1. Strict JSON list of strings.
  auto try_json = [](const std::string& candidate) -> std::vector<std::string> {
    json parsed = json::parse(candidate, nullptr, false);
    if (!parsed.is_array()) return {};
    std::vector<std::string> points;
    for (const json& item : parsed) {
      if (!item.is_string()) return {};
      std::string p = text::trim(item.get<std::string>());
      if (p.empty()) return {};
      points.push_back(std::move(p));
    }
    return points;
  };
  if (auto points = try_json(trimmed); !points.empty()) return points;
  size_t open = trimmed.find('[');
  size_t close = trimmed.rfind(']');
  if (open != std::string::npos && close != std::string::npos && close > open) {
    if (auto points = try_json(trimmed.substr(open, close - open + 1)); !points.empty()) {
      return points;
    }
  }

  // 2. Bullet lines, then 3. quoted lines (lenient about inner quotes).
  std::vector<std::string> bullets;
  std::vector<std::string> quoted;
  size_t pos = 0;
  while (pos <= trimmed.size()) {
    size_t eol = trimmed.find('\n', pos);
    std::string line = eol == std::string::npos ? trimmed.substr(pos)
                                                : trimmed.substr(pos, eol - pos);
    std::string t = text::trim(line);
    if (text::is_bullet_line(t)) {
      std::string item = text::strip_bullet_marker(t);
      if (!item.empty()) bullets.push_back(std::move(item));
    } else if (t.size() >= 2) {
      std::string q = t;
      if (q.back() == ',') q = text::trim(q.substr(0, q.size() - 1));
      if (q.size() >= 2 && q.front() == '"' && q.back() == '"') {
        std::string inner = text::trim(q.substr(1, q.size() - 2));
        if (!inner.empty()) quoted.push_back(std::move(inner));
      }
    }
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  if (!bullets.empty()) return bullets;
  return quoted;
}

SaliencyPoints extract_llm(const std::string& long_form_text, const ExtractorConfig& config,
                           Gateway& gateway) {
  const std::string& tmpl =
      config.prompt_template.empty() ? prompts::extraction_template() : config.prompt_template;
  if (tmpl.find("<ans>") == std::string::npos) {
    throw ConfigError("extraction prompt template lacks the <ans> placeholder");
  }
  std::string prompt = prompts::render(tmpl, {{"<ans>", long_form_text}});
  ChatRequest request;
  request.messages.push_back({"user", prompt});
  std::string last_reply;
  for (int attempt = 0; attempt < 3; ++attempt) {
    last_reply = gateway.chat_complete(request);
    SaliencyPoints points = parse_point_list_reply(last_reply);
    if (!points.empty()) return points;
    request.messages.push_back({"assistant", last_reply});
    request.messages.push_back(
        {"user",
         "The previous reply could not be parsed. Return only a JSON list of strings, one "
         "string per key point, with no commentary."});
  }
  throw ExtractionError("could not parse a point list from the model reply", last_reply);
}

SaliencyPoints extract(const std::string& long_form_text, const ExtractorConfig& config,
                       Gateway* gateway) {
  if (text::trim(long_form_text).empty()) {
    throw ContractError("cannot extract from empty text");
  }
  if (config.mode == ExtractorConfig::Mode::kHeuristic && config.summary_cues.empty()) {
    throw ConfigError("heuristic extraction needs a non-empty summary cue list");
  }
  std::string body = strip_summary(long_form_text, config.summary_cues);
  if (config.mode == ExtractorConfig::Mode::kHeuristic) {
    return split_points(body, config.max_sentences_per_point);
  }
  if (gateway == nullptr) throw ConfigError("LLM extraction requires a gateway");
  return extract_llm(body, config, *gateway);
}

}  // namespace ems
