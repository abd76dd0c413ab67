#pragma once

#include <span>
#include <vector>

#include "ems/types.hpp"

namespace ems {

/// Project reference-side scores onto the answer side: position j receives
/// the maximum score among reference points assigned to j, or 0 if nothing
/// maps there. Throws ContractError on length mismatch or an invalid
/// assignment.
AlignmentVector map_scores_to_answer(const MatchAssignment& assignment,
                                     const AlignmentVector& ref_scores);

/// Mean of the reference-side scores. An empty reference vector is a
/// ContractError: it means extraction upstream produced nothing.
double ems_recall(const AlignmentVector& ref_scores);

/// Mean of the answer-side scores; 0 when the answer produced no points
/// (an empty answer is a legitimately terrible answer, not an error).
double ems_precision(const AlignmentVector& ans_scores);

/// Harmonic mean of precision and recall, 0 when both are 0. Inputs outside
/// [0,1] are a ContractError.
double ems_f1(double precision, double recall);

/// Full metric bundle for one triplet from its assignment and scores.
EmsMetrics compute_metrics(const MatchAssignment& assignment,
                           const AlignmentVector& ref_scores);

/// Unweighted arithmetic mean of each metric across triplets (macro
/// average). Throws ContractError on an empty list.
EmsMetrics aggregate_metrics(std::span<const EmsMetrics> per_triplet);

}  // namespace ems
