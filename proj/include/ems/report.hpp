#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ems/types.hpp"

namespace ems {

struct RowResult {
  std::string id;
  std::string company;
  int question_id = 0;
  EmsMetrics ems;
  int matched = 0;  // reference points with a non-unmatched assignment
  double bleu = 0.0;
  double rouge1_f1 = 0.0;
  double rouge2_f1 = 0.0;
  double rougel_f1 = 0.0;
  std::optional<double> embed_sim;  // only when the embedding baseline ran
  MatchAssignment assignment;
  AlignmentVector ref_scores;
  bool failed = false;    // excluded from aggregates
  std::string note;       // diagnostic flag (empty candidate, stage error, ...)
};

struct EvalReport {
  std::vector<RowResult> rows;
  EmsMetrics macro;  // unweighted mean of per-row precision/recall/f1
  double macro_bleu = 0.0;
  double macro_rouge1 = 0.0;
  double macro_rouge2 = 0.0;
  double macro_rougel = 0.0;
  std::optional<double> macro_embed;
  std::string config_summary;  // one-line description of the pipeline config
  std::uint64_t seed = 0;
  std::string timestamp;  // RFC 3339; empty unless explicitly stamped
};

enum class ReportFormat { kJson, kCsv, kMarkdown };

ReportFormat report_format_from_string(const std::string& name);

/// Round half-to-even at two decimals: the rounding applied to csv and
/// markdown cells. JSON keeps raw double precision.
double round2(double value);

/// Assemble aggregates over the non-failed rows. Throws ReportError when
/// there is no row at all, and Error when every row failed.
EvalReport build_report(std::vector<RowResult> rows, const std::string& config_summary,
                        std::uint64_t seed);

/// Render a report. JSON output is canonical (sorted keys, newline-
/// terminated, raw metric precision): identical inputs produce identical
/// bytes. csv/markdown print metrics rounded to 2 decimals.
std::string render_report(const EvalReport& report, ReportFormat format);

void write_report(const EvalReport& report, ReportFormat format, const std::string& path);

/// Parse a previously written JSON report (used by the `report` subcommand
/// to re-render into other formats).
EvalReport parse_report_json(const std::string& json_text);

}  // namespace ems
