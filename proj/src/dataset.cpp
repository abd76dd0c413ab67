#include "ems/dataset.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "ems/errors.hpp"
#include "ems/text.hpp"

namespace ems {

using nlohmann::json;

namespace {

std::string where(int line_number) {
  return line_number > 0 ? "line " + std::to_string(line_number) + ": " : "";
}

}  // namespace

EvalTriplet parse_triplet(const std::string& json_line, int line_number) {
  json record = json::parse(json_line, nullptr, false);
  if (record.is_discarded() || !record.is_object()) {
    throw DatasetError(where(line_number) + "not a JSON object");
  }
  static const char* kKnown[] = {"id", "company", "question_id", "question", "reference",
                                 "candidate"};
  for (const auto& [key, value] : record.items()) {
    bool known = false;
    for (const char* k : kKnown) known = known || key == k;
    if (!known) throw DatasetError(where(line_number) + "unknown field \"" + key + "\"");
  }
  EvalTriplet t;
  for (const char* field : {"id", "reference", "candidate"}) {
    if (!record.contains(field) || !record[field].is_string() ||
        text::trim(record[field].get<std::string>()).empty()) {
      throw DatasetError(where(line_number) + "missing or empty required field \"" +
                         field + "\"");
    }
  }
  t.id = record["id"].get<std::string>();
  t.reference = record["reference"].get<std::string>();
  t.candidate = record["candidate"].get<std::string>();
  if (record.contains("company")) {
    if (!record["company"].is_string()) {
      throw DatasetError(where(line_number) + "field \"company\" must be a string");
    }
    t.company = record["company"].get<std::string>();
  }
  if (record.contains("question")) {
    if (!record["question"].is_string()) {
      throw DatasetError(where(line_number) + "field \"question\" must be a string");
    }
    t.question = record["question"].get<std::string>();
  }
  if (record.contains("question_id")) {
    if (!record["question_id"].is_number_integer()) {
      throw DatasetError(where(line_number) + "field \"question_id\" must be an integer");
    }
    t.question_id = record["question_id"].get<int>();
  }
  return t;
}

std::vector<EvalTriplet> load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open dataset file " + path);
  std::vector<EvalTriplet> triplets;
  std::unordered_map<std::string, int> seen;  // id -> line
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (text::trim(line).empty()) continue;
    EvalTriplet t = parse_triplet(line, line_number);
    auto [it, inserted] = seen.emplace(t.id, line_number);
    if (!inserted) {
      throw DatasetError("duplicate id \"" + t.id + "\" on lines " +
                         std::to_string(it->second) + " and " + std::to_string(line_number));
    }
    triplets.push_back(std::move(t));
  }
  if (triplets.empty()) throw DatasetError("dataset file " + path + " holds no records");
  return triplets;
}

std::string to_jsonl(const std::vector<EvalTriplet>& triplets) {
  std::string out;
  for (const EvalTriplet& t : triplets) {
    json record;
    record["id"] = t.id;
    if (!t.company.empty()) record["company"] = t.company;
    if (t.question_id != 0) record["question_id"] = t.question_id;
    if (!t.question.empty()) record["question"] = t.question;
    record["reference"] = t.reference;
    record["candidate"] = t.candidate;
    out += record.dump();
    out += "\n";
  }
  return out;
}

void save_dataset(const std::vector<EvalTriplet>& triplets, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DatasetError("cannot write dataset file " + path);
  out << to_jsonl(triplets);
}

std::vector<Question> load_questions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError("cannot open question file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  json parsed = json::parse(buf.str(), nullptr, false);
  if (!parsed.is_array()) throw DatasetError("question file must be a JSON array");
  std::vector<Question> questions;
  for (const json& item : parsed) {
    if (!item.is_object() || !item.contains("id") || !item.contains("question")) {
      throw DatasetError("each question needs \"id\" and \"question\" fields");
    }
    Question q;
    q.id = item["id"].get<int>();
    q.text = item["question"].get<std::string>();
    questions.push_back(std::move(q));
  }
  if (questions.empty()) throw DatasetError("question file holds no questions");
  return questions;
}

}  // namespace ems
