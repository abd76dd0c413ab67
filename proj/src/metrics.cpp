#include "ems/metrics.hpp"

#include <algorithm>

#include "ems/errors.hpp"

namespace ems {

void MatchAssignment::validate() const {
  for (int a : assignments) {
    if (a == kUnmatched) continue;
    if (a < 0 || a >= answer_count) {
      throw ContractError("assignment index " + std::to_string(a) + " outside [0, " +
                          std::to_string(answer_count) + ")");
    }
  }
}

AlignmentVector map_scores_to_answer(const MatchAssignment& assignment,
                                     const AlignmentVector& ref_scores) {
  if (ref_scores.side != Side::kReference) {
    throw ContractError("map_scores_to_answer expects a reference-side vector");
  }
  if (assignment.size() != ref_scores.size()) {
    throw ContractError("assignment length " + std::to_string(assignment.size()) +
                        " != score length " + std::to_string(ref_scores.size()));
  }
  assignment.validate();
  AlignmentVector out;
  out.side = Side::kAnswer;
  out.scores.assign(static_cast<size_t>(assignment.answer_count), 0.0);
  for (size_t i = 0; i < assignment.size(); ++i) {
    int j = assignment.assignments[i];
    if (j == kUnmatched) continue;
    out.scores[static_cast<size_t>(j)] =
        std::max(out.scores[static_cast<size_t>(j)], ref_scores.scores[i]);
  }
  return out;
}

double ems_recall(const AlignmentVector& ref_scores) {
  if (ref_scores.side != Side::kReference) {
    throw ContractError("ems_recall expects a reference-side vector");
  }
  if (ref_scores.scores.empty()) {
    throw ContractError("recall undefined for an empty reference (no extracted points)");
  }
  double sum = 0.0;
  for (double s : ref_scores.scores) {
    if (s < 0.0 || s > 1.0) throw ContractError("alignment score outside [0,1]");
    sum += s;
  }
  return sum / static_cast<double>(ref_scores.scores.size());
}

double ems_precision(const AlignmentVector& ans_scores) {
  if (ans_scores.side != Side::kAnswer) {
    throw ContractError("ems_precision expects an answer-side vector");
  }
  if (ans_scores.scores.empty()) return 0.0;
  double sum = 0.0;
  for (double s : ans_scores.scores) {
    if (s < 0.0 || s > 1.0) throw ContractError("alignment score outside [0,1]");
    sum += s;
  }
  return sum / static_cast<double>(ans_scores.scores.size());
}

double ems_f1(double precision, double recall) {
  if (precision < 0.0 || precision > 1.0 || recall < 0.0 || recall > 1.0) {
    throw ContractError("precision/recall outside [0,1]");
  }
  double denom = precision + recall;
  if (denom == 0.0) return 0.0;
  return 2.0 * precision * recall / denom;
}

EmsMetrics compute_metrics(const MatchAssignment& assignment,
                           const AlignmentVector& ref_scores) {
  EmsMetrics m;
  m.n_ref = static_cast<int>(ref_scores.size());
  m.n_ans = assignment.answer_count;
  m.recall = ems_recall(ref_scores);
  if (assignment.answer_count == 0) {
    assignment.validate();
    m.precision = 0.0;
    m.f1 = 0.0;
    return m;
  }
  AlignmentVector ans = map_scores_to_answer(assignment, ref_scores);
  m.precision = ems_precision(ans);
  m.f1 = ems_f1(m.precision, m.recall);
  return m;
}

EmsMetrics aggregate_metrics(std::span<const EmsMetrics> per_triplet) {
  if (per_triplet.empty()) throw ContractError("cannot aggregate zero triplets");
  EmsMetrics out;
  for (const EmsMetrics& m : per_triplet) {
    out.precision += m.precision;
    out.recall += m.recall;
    out.f1 += m.f1;
    out.n_ref += m.n_ref;
    out.n_ans += m.n_ans;
  }
  double n = static_cast<double>(per_triplet.size());
  out.precision /= n;
  out.recall /= n;
  out.f1 /= n;
  return out;
}

}  // namespace ems
