#pragma once

#include <functional>
#include <string>

#include "ems/types.hpp"

namespace ems {

class Gateway;

struct MatcherConfig {
  enum class Mode { kLexical, kLlm };

  Mode mode = Mode::kLexical;
  double lexical_threshold = 0.5;  // in (0,1]
  double numeric_boost = 0.1;      // per exactly shared numeric token
  std::string prompt_template;     // empty -> built-in template
};

/// Token-overlap F1 between the normalized multisets of the two strings,
/// plus numeric_boost per exactly shared numeric token. Exposed for tests.
double token_overlap_score(const std::string& ref_point,
                           const std::string& candidate_point,
                           double numeric_boost);

/// Deterministic matcher: arg-max of token_overlap_score over candidates if
/// the best score reaches config.lexical_threshold, else kUnmatched. Ties
/// break to the lowest index.
int match_point_lexical(const std::string& ref_point,
                        const SaliencyPoints& candidates,
                        const MatcherConfig& config);

/// Prompted matcher: one call per reference point carrying the full
/// candidate list. The reply must decode to an index in {-1} U [0, M);
/// malformed or out-of-range replies are re-prompted up to twice, then
/// raise MatchingError with the raw reply.
int match_point_llm(const std::string& ref_point, const SaliencyPoints& candidates,
                    const MatcherConfig& config, Gateway& gateway);

using PointMatcher =
    std::function<int(const std::string& ref_point, const SaliencyPoints& candidates)>;

/// Assignment entry i is the matcher's verdict for reference point i against
/// the full candidate list. An empty candidate list yields all-unmatched
/// without invoking the matcher. Matcher errors are annotated with the
/// failing reference index.
MatchAssignment match_all(const SaliencyPoints& refs, const SaliencyPoints& candidates,
                          const PointMatcher& matcher);

/// Convenience overload wiring the configured matcher mode. `gateway` may
/// be null in lexical mode.
MatchAssignment match_all(const SaliencyPoints& refs, const SaliencyPoints& candidates,
                          const MatcherConfig& config, Gateway* gateway);

}  // namespace ems
