#include "ems/matching.hpp"

#include <algorithm>
#include <unordered_map>

#include "ems/errors.hpp"
#include "ems/gateway.hpp"
#include "ems/prompts.hpp"
#include "ems/text.hpp"

namespace ems {

namespace {

std::unordered_map<std::string, int> token_counts(const std::string& s) {
  std::unordered_map<std::string, int> counts;
  for (std::string& t : text::tokenize(s)) ++counts[std::move(t)];
  return counts;
}

}  // namespace

double token_overlap_score(const std::string& ref_point, const std::string& candidate_point,
                           double numeric_boost) {
  auto ref = token_counts(ref_point);
  auto cand = token_counts(candidate_point);
  long long ref_total = 0;
  long long cand_total = 0;
  for (const auto& [t, c] : ref) ref_total += c;
  for (const auto& [t, c] : cand) cand_total += c;
  if (ref_total == 0 || cand_total == 0) return 0.0;
  long long overlap = 0;
  long long shared_numeric = 0;
  for (const auto& [token, count] : ref) {
    auto it = cand.find(token);
    if (it == cand.end()) continue;
    long long shared = std::min(count, it->second);
    overlap += shared;
    if (text::is_numeric_token(token)) shared_numeric += shared;
  }
  double p = static_cast<double>(overlap) / static_cast<double>(cand_total);
  double r = static_cast<double>(overlap) / static_cast<double>(ref_total);
  double f1 = p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  return f1 + numeric_boost * static_cast<double>(shared_numeric);
}

int match_point_lexical(const std::string& ref_point, const SaliencyPoints& candidates,
                        const MatcherConfig& config) {
  if (candidates.empty()) throw ContractError("match_point_lexical needs candidates");
  if (config.lexical_threshold <= 0.0 || config.lexical_threshold > 1.0) {
    throw ConfigError("lexical_threshold must be in (0,1]");
  }
  int best = kUnmatched;
  double best_score = -1.0;
  for (size_t j = 0; j < candidates.size(); ++j) {
    double score = token_overlap_score(ref_point, candidates[j], config.numeric_boost);
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(j);
    }
  }
  return best_score >= config.lexical_threshold ? best : kUnmatched;
}

int match_point_llm(const std::string& ref_point, const SaliencyPoints& candidates,
                    const MatcherConfig& config, Gateway& gateway) {
  if (candidates.empty()) throw ContractError("match_point_llm needs candidates");
  const std::string& tmpl =
      config.prompt_template.empty() ? prompts::matching_template() : config.prompt_template;
  if (tmpl.find("<ref>") == std::string::npos ||
      tmpl.find("<candid>") == std::string::npos) {
    throw ConfigError("matching prompt template lacks <ref>/<candid> placeholders");
  }
  std::string prompt =
      prompts::render(tmpl, {{"<ref>", "\"" + ref_point + "\""},
                             {"<candid>", prompts::format_candidate_list(candidates)}});
  ChatRequest request;
  request.max_output_tokens = 16;
  request.messages.push_back({"user", prompt});
  int m = static_cast<int>(candidates.size());
  std::string last_reply;
  for (int attempt = 0; attempt < 3; ++attempt) {
    last_reply = gateway.chat_complete(request);
    try {
      int index = parse_integer_reply(last_reply);
      if (index == kUnmatched || (index >= 0 && index < m)) return index;
    } catch (const ReplyError&) {
    }
    request.messages.push_back({"assistant", last_reply});
    request.messages.push_back(
        {"user", "Reply with a single integer: an index between 0 and " +
                     std::to_string(m - 1) + ", or -1 if nothing matches."});
  }
  throw MatchingError("model did not produce a valid matched index", last_reply);
}

MatchAssignment match_all(const SaliencyPoints& refs, const SaliencyPoints& candidates,
                          const PointMatcher& matcher) {
  if (refs.empty()) throw ContractError("match_all needs at least one reference point");
  MatchAssignment assignment;
  assignment.answer_count = static_cast<int>(candidates.size());
  assignment.assignments.reserve(refs.size());
  if (candidates.empty()) {
    assignment.assignments.assign(refs.size(), kUnmatched);
    return assignment;
  }
  for (size_t i = 0; i < refs.size(); ++i) {
    int a;
    try {
      a = matcher(refs[i], candidates);
    } catch (const MatchingError& e) {
      throw MatchingError("reference point " + std::to_string(i) + ": " + e.what(),
                          e.raw_reply());
    }
    if (a != kUnmatched && (a < 0 || a >= assignment.answer_count)) {
      throw ContractError("matcher returned index " + std::to_string(a) +
                          " for reference point " + std::to_string(i));
    }
    assignment.assignments.push_back(a);
  }
  return assignment;
}

MatchAssignment match_all(const SaliencyPoints& refs, const SaliencyPoints& candidates,
                          const MatcherConfig& config, Gateway* gateway) {
  if (config.mode == MatcherConfig::Mode::kLexical) {
    return match_all(refs, candidates, [&config](const std::string& ref,
                                                 const SaliencyPoints& cands) {
      return match_point_lexical(ref, cands, config);
    });
  }
  if (gateway == nullptr) throw ConfigError("LLM matching requires a gateway");
  return match_all(refs, candidates,
                   [&config, gateway](const std::string& ref, const SaliencyPoints& cands) {
                     return match_point_llm(ref, cands, config, *gateway);
                   });
}

}  // namespace ems
