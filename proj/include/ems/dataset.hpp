#pragma once

#include <string>
#include <vector>

#include "ems/types.hpp"

namespace ems {

/// Parse one JSONL record. Required fields: id, reference, candidate.
/// Optional: company, question_id, question.
EvalTriplet parse_triplet(const std::string& json_line, int line_number = 0);

/// Load a JSONL dataset. Blank lines are skipped; any malformed line or
/// missing required field raises DatasetError with the line number.
std::vector<EvalTriplet> load_dataset(const std::string& path);

/// Serialize triplets back to JSONL (one canonical JSON object per line).
std::string to_jsonl(const std::vector<EvalTriplet>& triplets);

void save_dataset(const std::vector<EvalTriplet>& triplets, const std::string& path);

struct Question {
  int id = 0;
  std::string text;
};

/// Load a question file: JSON array of {"id", "question"} objects.
std::vector<Question> load_questions(const std::string& path);

}  // namespace ems
