#include "ems/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "ems/errors.hpp"
#include "ems/metrics.hpp"
#include "ems/text.hpp"

namespace ems {

using nlohmann::json;

ReportFormat report_format_from_string(const std::string& name) {
  std::string n = text::to_lower(name);
  if (n == "json") return ReportFormat::kJson;
  if (n == "csv") return ReportFormat::kCsv;
  if (n == "markdown" || n == "md") return ReportFormat::kMarkdown;
  throw ConfigError("unknown report format: " + name);
}

double round2(double value) {
  double scaled = value * 100.0;
  double floor_v = std::floor(scaled);
  double frac = scaled - floor_v;
  double r;
  if (frac > 0.5) {
    r = floor_v + 1.0;
  } else if (frac < 0.5) {
    r = floor_v;
  } else {
    r = std::fmod(floor_v, 2.0) == 0.0 ? floor_v : floor_v + 1.0;  // ties to even
  }
  return r / 100.0;
}

namespace {

std::string fixed2(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", round2(value));
  return buf;
}

std::string csv_quote(const std::string& s) {
  bool needs = s.find_first_of(",\"\n") != std::string::npos;
  if (!needs) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

json row_to_json(const RowResult& row) {
  json r;
  r["id"] = row.id;
  r["company"] = row.company;
  r["question_id"] = row.question_id;
  r["n_ref"] = row.ems.n_ref;
  r["n_ans"] = row.ems.n_ans;
  r["matched"] = row.matched;
  r["precision"] = row.ems.precision;
  r["recall"] = row.ems.recall;
  r["f1"] = row.ems.f1;
  r["bleu"] = row.bleu;
  r["rouge1_f1"] = row.rouge1_f1;
  r["rouge2_f1"] = row.rouge2_f1;
  r["rougel_f1"] = row.rougel_f1;
  if (row.embed_sim) r["embed_sim"] = *row.embed_sim;
  r["assignment"] = row.assignment.assignments;
  r["ref_scores"] = row.ref_scores.scores;
  if (row.failed) r["failed"] = true;
  if (!row.note.empty()) r["note"] = row.note;
  return r;
}

RowResult row_from_json(const json& r) {
  RowResult row;
  row.id = r.at("id").get<std::string>();
  row.company = r.value("company", std::string());
  row.question_id = r.value("question_id", 0);
  row.ems.n_ref = r.at("n_ref").get<int>();
  row.ems.n_ans = r.at("n_ans").get<int>();
  row.matched = r.value("matched", 0);
  row.ems.precision = r.at("precision").get<double>();
  row.ems.recall = r.at("recall").get<double>();
  row.ems.f1 = r.at("f1").get<double>();
  row.bleu = r.value("bleu", 0.0);
  row.rouge1_f1 = r.value("rouge1_f1", 0.0);
  row.rouge2_f1 = r.value("rouge2_f1", 0.0);
  row.rougel_f1 = r.value("rougel_f1", 0.0);
  if (r.contains("embed_sim")) row.embed_sim = r["embed_sim"].get<double>();
  if (r.contains("assignment")) {
    row.assignment.assignments = r["assignment"].get<std::vector<int>>();
    row.assignment.answer_count = row.ems.n_ans;
  }
  if (r.contains("ref_scores")) {
    row.ref_scores.scores = r["ref_scores"].get<std::vector<double>>();
    row.ref_scores.side = Side::kReference;
  }
  row.failed = r.value("failed", false);
  row.note = r.value("note", std::string());
  return row;
}

std::string render_json(const EvalReport& report) {
  json doc;
  doc["config"] = report.config_summary;
  doc["seed"] = report.seed;
  if (!report.timestamp.empty()) doc["timestamp"] = report.timestamp;
  doc["rows"] = json::array();
  for (const RowResult& row : report.rows) doc["rows"].push_back(row_to_json(row));
  json agg;
  agg["precision"] = report.macro.precision;
  agg["recall"] = report.macro.recall;
  agg["f1"] = report.macro.f1;
  agg["bleu"] = report.macro_bleu;
  agg["rouge1_f1"] = report.macro_rouge1;
  agg["rouge2_f1"] = report.macro_rouge2;
  agg["rougel_f1"] = report.macro_rougel;
  if (report.macro_embed) agg["embed_sim"] = *report.macro_embed;
  doc["aggregate"] = agg;
  return doc.dump(2) + "\n";
}

void append_csv_metrics(std::string& out, const std::string& id, const RowResult* row,
                        const EvalReport* agg) {
  auto emit = [&](const std::string& metric, const std::string& value) {
    out += csv_quote(id);
    out += ",";
    out += metric;
    out += ",";
    out += value;
    out += "\n";
  };
  if (row != nullptr) {
    emit("n_ref", std::to_string(row->ems.n_ref));
    emit("n_ans", std::to_string(row->ems.n_ans));
    emit("matched", std::to_string(row->matched));
    emit("ems_precision", fixed2(row->ems.precision));
    emit("ems_recall", fixed2(row->ems.recall));
    emit("ems_f1", fixed2(row->ems.f1));
    emit("bleu", fixed2(row->bleu));
    emit("rouge1_f1", fixed2(row->rouge1_f1));
    emit("rouge2_f1", fixed2(row->rouge2_f1));
    emit("rougel_f1", fixed2(row->rougel_f1));
    if (row->embed_sim) emit("embed_sim", fixed2(*row->embed_sim));
    if (row->failed) emit("failed", "1");
  } else {
    emit("ems_precision", fixed2(agg->macro.precision));
    emit("ems_recall", fixed2(agg->macro.recall));
    emit("ems_f1", fixed2(agg->macro.f1));
    emit("bleu", fixed2(agg->macro_bleu));
    emit("rouge1_f1", fixed2(agg->macro_rouge1));
    emit("rouge2_f1", fixed2(agg->macro_rouge2));
    emit("rougel_f1", fixed2(agg->macro_rougel));
    if (agg->macro_embed) emit("embed_sim", fixed2(*agg->macro_embed));
  }
}

std::string render_csv(const EvalReport& report) {
  std::string out = "id,metric,value\n";
  for (const RowResult& row : report.rows) append_csv_metrics(out, row.id, &row, nullptr);
  append_csv_metrics(out, "ALL", nullptr, &report);
  return out;
}

std::string render_markdown(const EvalReport& report) {
  std::string out;
  out += "# Evaluation Report\n\n";
  out += "Config: `" + report.config_summary + "`\n\n";
  if (!report.timestamp.empty()) out += "Generated: " + report.timestamp + "\n\n";
  out += "## Aggregate (macro over " + std::to_string(report.rows.size()) + " triplets)\n\n";
  out += "| Metric | Value |\n|---|---|\n";
  out += "| EMS Precision | " + fixed2(report.macro.precision) + " |\n";
  out += "| EMS Recall | " + fixed2(report.macro.recall) + " |\n";
  out += "| EMS F1 | " + fixed2(report.macro.f1) + " |\n";
  out += "| BLEU | " + fixed2(report.macro_bleu) + " |\n";
  out += "| ROUGE-1 F1 | " + fixed2(report.macro_rouge1) + " |\n";
  out += "| ROUGE-2 F1 | " + fixed2(report.macro_rouge2) + " |\n";
  out += "| ROUGE-L F1 | " + fixed2(report.macro_rougel) + " |\n";
  if (report.macro_embed) out += "| Embedding | " + fixed2(*report.macro_embed) + " |\n";
  out += "\n## Per-triplet\n\n";
  out += "| id | N | M | matched | EMS P | EMS R | EMS F1 | BLEU | ROUGE-L F1 | note |\n";
  out += "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const RowResult& row : report.rows) {
    std::string note = row.failed ? ("FAILED: " + row.note) : row.note;
    out += "| " + row.id + " | " + std::to_string(row.ems.n_ref) + " | " +
           std::to_string(row.ems.n_ans) + " | " + std::to_string(row.matched) + " | " +
           fixed2(row.ems.precision) + " | " + fixed2(row.ems.recall) + " | " +
           fixed2(row.ems.f1) + " | " + fixed2(row.bleu) + " | " + fixed2(row.rougel_f1) +
           " | " + note + " |\n";
  }
  return out;
}

}  // namespace

EvalReport build_report(std::vector<RowResult> rows, const std::string& config_summary,
                        std::uint64_t seed) {
  if (rows.empty()) throw ReportError("cannot build a report from zero rows");
  EvalReport report;
  report.rows = std::move(rows);
  report.config_summary = config_summary;
  report.seed = seed;
  std::vector<EmsMetrics> ok;
  double bleu_sum = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double rl = 0.0;
  double emb = 0.0;
  bool all_embed = true;
  for (const RowResult& row : report.rows) {
    if (row.failed) continue;
    ok.push_back(row.ems);
    bleu_sum += row.bleu;
    r1 += row.rouge1_f1;
    r2 += row.rouge2_f1;
    rl += row.rougel_f1;
    if (row.embed_sim) {
      emb += *row.embed_sim;
    } else {
      all_embed = false;
    }
  }
  if (ok.empty()) throw Error("all triplets failed; nothing to aggregate");
  report.macro = aggregate_metrics(ok);
  double n = static_cast<double>(ok.size());
  report.macro_bleu = bleu_sum / n;
  report.macro_rouge1 = r1 / n;
  report.macro_rouge2 = r2 / n;
  report.macro_rougel = rl / n;
  if (all_embed) report.macro_embed = emb / n;
  return report;
}

std::string render_report(const EvalReport& report, ReportFormat format) {
  if (report.rows.empty()) throw ReportError("cannot render a report with zero rows");
  switch (format) {
    case ReportFormat::kJson: return render_json(report);
    case ReportFormat::kCsv: return render_csv(report);
    case ReportFormat::kMarkdown: return render_markdown(report);
  }
  throw ContractError("invalid report format");
}

void write_report(const EvalReport& report, ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ReportError("cannot write report file " + path);
  out << render_report(report, format);
  if (!out) throw ReportError("short write to report file " + path);
}

EvalReport parse_report_json(const std::string& json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ReportError("report file is not valid JSON");
  }
  EvalReport report;
  try {
    report.config_summary = doc.value("config", std::string());
    report.seed = doc.value("seed", std::uint64_t{0});
    report.timestamp = doc.value("timestamp", std::string());
    for (const json& r : doc.at("rows")) report.rows.push_back(row_from_json(r));
    const json& agg = doc.at("aggregate");
    report.macro.precision = agg.at("precision").get<double>();
    report.macro.recall = agg.at("recall").get<double>();
    report.macro.f1 = agg.at("f1").get<double>();
    report.macro_bleu = agg.value("bleu", 0.0);
    report.macro_rouge1 = agg.value("rouge1_f1", 0.0);
    report.macro_rouge2 = agg.value("rouge2_f1", 0.0);
    report.macro_rougel = agg.value("rougel_f1", 0.0);
    if (agg.contains("embed_sim")) report.macro_embed = agg["embed_sim"].get<double>();
  } catch (const json::exception& e) {
    throw ReportError(std::string("malformed report json: ") + e.what());
  }
  return report;
}

}  // namespace ems
