#pragma once

#include <functional>
#include <string>

#include "ems/baselines.hpp"
#include "ems/types.hpp"

namespace ems {

class Gateway;

struct ScorerConfig {
  enum class Mode { kLlm, kRouge, kEmbedding, kExact };

  Mode mode = Mode::kRouge;
  int max_score = 10;  // the {max_score} parameter of the scoring prompt
  RougeVariant rouge_variant = RougeVariant::kRougeL;
  std::string prompt_template;  // empty -> built-in template
};

/// Prompted pair scorer: expects an integer in [0, max_score] and returns
/// it divided by max_score. A reply with no integer is re-prompted up to
/// twice, then raises ScoringError; an out-of-range integer is re-prompted
/// once, then clamped.
double score_pair_llm(const std::string& kp1, const std::string& kp2,
                      const ScorerConfig& config, Gateway& gateway);

/// ROUGE F1 of the pair under the chosen variant. Symmetric.
double score_pair_rouge(const std::string& kp1, const std::string& kp2,
                        RougeVariant variant);

/// Embedding-cosine similarity of the pair, mapped to [0,1].
double score_pair_embedding(const std::string& kp1, const std::string& kp2,
                            Gateway& gateway);

/// 1 when the normalized token sequences are equal, else 0.
double score_pair_exact(const std::string& kp1, const std::string& kp2);

using PairScorer =
    std::function<double(const std::string& ref_point, const std::string& candidate_point)>;

/// Reference-side alignment vector: position i is the scorer's verdict on
/// (refs[i], candidates[assignment[i]]) for matched positions and exactly 0
/// for unmatched ones; the scorer is never invoked for unmatched positions.
/// Scorer errors are annotated with the reference index.
AlignmentVector score_assignment(const SaliencyPoints& refs,
                                 const SaliencyPoints& candidates,
                                 const MatchAssignment& assignment,
                                 const PairScorer& scorer);

/// Convenience overload wiring the configured scorer mode. `gateway` may be
/// null for rouge/exact modes.
AlignmentVector score_assignment(const SaliencyPoints& refs,
                                 const SaliencyPoints& candidates,
                                 const MatchAssignment& assignment,
                                 const ScorerConfig& config, Gateway* gateway);

}  // namespace ems
