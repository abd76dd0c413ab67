#include "ems/scoring.hpp"

#include <algorithm>

#include "ems/errors.hpp"
#include "ems/gateway.hpp"
#include "ems/prompts.hpp"
#include "ems/text.hpp"

namespace ems {

double score_pair_llm(const std::string& kp1, const std::string& kp2,
                      const ScorerConfig& config, Gateway& gateway) {
  if (config.max_score < 1) throw ConfigError("max_score must be >= 1");
  const std::string& tmpl =
      config.prompt_template.empty() ? prompts::scoring_template() : config.prompt_template;
  if (tmpl.find("<kp1>") == std::string::npos || tmpl.find("<kp2>") == std::string::npos) {
    throw ConfigError("scoring prompt template lacks <kp1>/<kp2> placeholders");
  }
  std::string max_str = std::to_string(config.max_score);
  std::string prompt = prompts::render(tmpl, {{"<kp1>", "\"" + kp1 + "\""},
                                              {"<kp2>", "\"" + kp2 + "\""},
                                              {"{max_score}", max_str}});
  ChatRequest request;
  request.max_output_tokens = 16;
  request.messages.push_back({"user", prompt});
  int parse_failures = 0;
  bool range_retried = false;
  std::string last_reply;
  for (;;) {
    last_reply = gateway.chat_complete(request);
    int raw = 0;
    bool parsed = true;
    try {
      raw = parse_integer_reply(last_reply);
    } catch (const ReplyError&) {
      parsed = false;
    }
    if (parsed) {
      if (raw >= 0 && raw <= config.max_score) {
        return static_cast<double>(raw) / static_cast<double>(config.max_score);
      }
      if (range_retried) {
        int clamped = std::clamp(raw, 0, config.max_score);
        return static_cast<double>(clamped) / static_cast<double>(config.max_score);
      }
      range_retried = true;
      request.messages.push_back({"assistant", last_reply});
      request.messages.push_back(
          {"user", "The score must be a single integer between 0 and " + max_str + "."});
      continue;
    }
    if (++parse_failures > 2) break;
    request.messages.push_back({"assistant", last_reply});
    request.messages.push_back(
        {"user", "Reply with a single integer between 0 and " + max_str + ", nothing else."});
  }
  throw ScoringError("model did not produce an integer score", last_reply);
}

double score_pair_rouge(const std::string& kp1, const std::string& kp2, RougeVariant variant) {
  return rouge(kp1, kp2, variant).f1;
}

double score_pair_embedding(const std::string& kp1, const std::string& kp2, Gateway& gateway) {
  return embed_similarity(kp1, kp2, gateway);
}

double score_pair_exact(const std::string& kp1, const std::string& kp2) {
  return text::tokenize(kp1) == text::tokenize(kp2) ? 1.0 : 0.0;
}

AlignmentVector score_assignment(const SaliencyPoints& refs, const SaliencyPoints& candidates,
                                 const MatchAssignment& assignment, const PairScorer& scorer) {
  if (assignment.size() != refs.size()) {
    throw ContractError("assignment length does not match reference point count");
  }
  if (assignment.answer_count != static_cast<int>(candidates.size())) {
    throw ContractError("assignment answer_count does not match candidate point count");
  }
  assignment.validate();
  AlignmentVector out;
  out.side = Side::kReference;
  out.scores.reserve(refs.size());
  for (size_t i = 0; i < refs.size(); ++i) {
    int a = assignment.assignments[i];
    if (a == kUnmatched) {
      out.scores.push_back(0.0);
      continue;
    }
    double s;
    try {
      s = scorer(refs[i], candidates[static_cast<size_t>(a)]);
    } catch (const ScoringError& e) {
      throw ScoringError("reference point " + std::to_string(i) + ": " + e.what(),
                         e.raw_reply());
    }
    if (s < 0.0 || s > 1.0) {
      throw ContractError("scorer returned " + std::to_string(s) + " outside [0,1]");
    }
    out.scores.push_back(s);
  }
  return out;
}

AlignmentVector score_assignment(const SaliencyPoints& refs, const SaliencyPoints& candidates,
                                 const MatchAssignment& assignment, const ScorerConfig& config,
                                 Gateway* gateway) {
  PairScorer scorer;
  switch (config.mode) {
    case ScorerConfig::Mode::kRouge:
      scorer = [&config](const std::string& a, const std::string& b) {
        return score_pair_rouge(a, b, config.rouge_variant);
      };
      break;
    case ScorerConfig::Mode::kExact:
      scorer = [](const std::string& a, const std::string& b) { return score_pair_exact(a, b); };
      break;
    case ScorerConfig::Mode::kLlm:
      if (gateway == nullptr) throw ConfigError("LLM scoring requires a gateway");
      scorer = [&config, gateway](const std::string& a, const std::string& b) {
        return score_pair_llm(a, b, config, *gateway);
      };
      break;
    case ScorerConfig::Mode::kEmbedding:
      if (gateway == nullptr) throw ConfigError("embedding scoring requires a gateway");
      scorer = [gateway](const std::string& a, const std::string& b) {
        return score_pair_embedding(a, b, *gateway);
      };
      break;
  }
  return score_assignment(refs, candidates, assignment, scorer);
}

}  // namespace ems
