#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ems/extraction.hpp"
#include "ems/gateway.hpp"
#include "ems/matching.hpp"
#include "ems/report.hpp"
#include "ems/scoring.hpp"
#include "ems/types.hpp"

namespace ems {

struct PipelineConfig {
  ExtractorConfig extractor;
  MatcherConfig matcher;
  ScorerConfig scorer;
  GatewayConfig gateway;
  bool with_baselines = true;
  bool with_embedding_baseline = false;  // needs a gateway even in offline runs
  bool stamp_timestamp = false;
  bool strict = false;  // abort on the first failed triplet instead of flagging the row
  int threads = 1;      // row-level parallelism for LLM-backed runs
  std::uint64_t seed = 0;

  /// True when no stage needs a gateway.
  bool needs_gateway() const;

  std::string summary() const;
};

/// Load a pipeline config from a JSON file; missing fields keep defaults.
/// Unknown keys raise ConfigError.
PipelineConfig load_pipeline_config(const std::string& path);

PipelineConfig default_pipeline_config();

struct TripletResult {
  SaliencyPoints ref_points;
  SaliencyPoints cand_points;
  MatchAssignment assignment;
  AlignmentVector ref_scores;
  EmsMetrics metrics;
};

/// Run extract-match-score on one reference/candidate pair.
/// An empty reference (no extractable points) raises ContractError; an
/// empty candidate yields all-unmatched with zero metrics.
TripletResult evaluate_pair(const std::string& reference, const std::string& candidate,
                            const PipelineConfig& config, Gateway* gateway);

/// Evaluate a whole dataset and assemble the report. A triplet that fails
/// becomes a flagged zero row (strict mode aborts instead); if every triplet
/// fails the run itself is an Error. Aggregates cover successful rows only.
EvalReport evaluate_dataset(const std::vector<EvalTriplet>& triplets,
                            const PipelineConfig& config, Gateway* gateway);

/// One drafted long-form answer for a question (the individual-answer
/// prompt). Used to produce the versions generate_reference consolidates;
/// pass distinct seeds to sample distinct drafts.
std::string draft_answer(const std::string& question, Gateway& gateway,
                         std::optional<std::int64_t> seed = std::nullopt);

/// Consolidate >= 2 answer versions into one reference answer using the
/// consolidation prompt (question, transcript, numbered answer versions).
/// The model reply is returned verbatim.
std::string generate_reference(const std::string& question,
                               const std::vector<std::string>& answer_versions,
                               const std::string& transcript, Gateway& gateway);

}  // namespace ems
