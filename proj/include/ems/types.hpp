#pragma once

#include <string>
#include <vector>

namespace ems {

/// Sentinel index for a reference point with no matching answer point.
inline constexpr int kUnmatched = -1;

/// One question + long-form reference answer + long-form candidate answer.
struct EvalTriplet {
  std::string id;
  std::string company;
  int question_id = 0;
  std::string question;
  std::string reference;
  std::string candidate;
};

/// Ordered list of short claim strings extracted from a long-form text.
/// Duplicates are legal and meaningful; order follows the source text.
using SaliencyPoints = std::vector<std::string>;

/// Per-reference-point index of the best-matching candidate point. Entries
/// are 0-based or kUnmatched. Several entries may share one index.
struct MatchAssignment {
  std::vector<int> assignments;
  int answer_count = 0;

  std::size_t size() const { return assignments.size(); }

  /// Throws ContractError if any entry is outside {-1} U [0, answer_count).
  void validate() const;
};

enum class Side { kReference, kAnswer };

/// Per-point alignment scores in [0,1]. Reference-side vectors have one
/// entry per reference point, answer-side vectors one per answer point.
/// Unmatched positions carry exactly 0.
struct AlignmentVector {
  std::vector<double> scores;
  Side side = Side::kReference;

  std::size_t size() const { return scores.size(); }
};

struct EmsMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int n_ref = 0;
  int n_ans = 0;
};

}  // namespace ems
