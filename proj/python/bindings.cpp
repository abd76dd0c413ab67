#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <string>
#include <vector>

#include "ems/baselines.hpp"
#include "ems/dataset.hpp"
#include "ems/errors.hpp"
#include "ems/extraction.hpp"
#include "ems/matching.hpp"
#include "ems/metrics.hpp"
#include "ems/perturb.hpp"
#include "ems/pipeline.hpp"
#include "ems/report.hpp"
#include "ems/text.hpp"
#include "ems/types.hpp"

namespace py = pybind11;

namespace {

ems::MatchAssignment make_assignment(const std::vector<int>& assignments, int answer_count) {
  ems::MatchAssignment assignment{assignments, answer_count};
  assignment.validate();
  return assignment;
}

ems::AlignmentVector make_ref_scores(const std::vector<double>& scores) {
  return ems::AlignmentVector{scores, ems::Side::kReference};
}

py::dict prf_dict(const ems::PrfScore& score) {
  py::dict out;
  out["precision"] = score.precision;
  out["recall"] = score.recall;
  out["f1"] = score.f1;
  return out;
}

py::dict metrics_dict(const ems::EmsMetrics& metrics) {
  py::dict out;
  out["precision"] = metrics.precision;
  out["recall"] = metrics.recall;
  out["f1"] = metrics.f1;
  out["n_ref"] = metrics.n_ref;
  out["n_ans"] = metrics.n_ans;
  return out;
}

ems::PipelineConfig deterministic_config(const std::string& scorer,
                                         const std::string& rouge_variant,
                                         double lexical_threshold, double numeric_boost,
                                         int max_sentences_per_point) {
  ems::PipelineConfig config;
  if (scorer == "rouge") {
    config.scorer.mode = ems::ScorerConfig::Mode::kRouge;
  } else if (scorer == "exact") {
    config.scorer.mode = ems::ScorerConfig::Mode::kExact;
  } else {
    throw ems::ConfigError("scorer must be \"rouge\" or \"exact\" in the python bindings");
  }
  config.scorer.rouge_variant = ems::rouge_variant_from_string(rouge_variant);
  config.matcher.lexical_threshold = lexical_threshold;
  config.matcher.numeric_boost = numeric_boost;
  config.extractor.max_sentences_per_point = max_sentences_per_point;
  config.with_baselines = false;
  return config;
}

}  // namespace

PYBIND11_MODULE(_ems, m) {
  m.doc() = "Deterministic core of the EMS long-form answer evaluator: tokenization, "
            "heuristic saliency-point extraction, lexical matching, metric algebra, "
            "ROUGE/BLEU baselines and the perturbation harness. LLM-backed stages stay "
            "on the C++/CLI side.";

  py::register_exception<ems::Error>(m, "EmsError");

  m.def("tokenize",
        [](const std::string& text) { return ems::text::tokenize(text); },
        py::arg("text"),
        "Shared token normalizer: lowercase, alphanumeric runs, decimal/thousands "
        "separators kept inside numbers.");
  m.def("is_numeric_token",
        [](const std::string& token) { return ems::text::is_numeric_token(token); },
        py::arg("token"));

  m.def("split_points",
        [](const std::string& text, int max_sentences_per_point) {
          return ems::split_points(text, max_sentences_per_point);
        },
        py::arg("text"), py::arg("max_sentences_per_point") = 2,
        "Heuristic saliency-point splitter: bullets become one point each, prose is "
        "grouped into sentence runs, paragraphs never mix.");
  m.def("extract_points",
        [](const std::string& text, int max_sentences_per_point) {
          ems::ExtractorConfig config;
          config.max_sentences_per_point = max_sentences_per_point;
          return ems::extract(text, config, nullptr);
        },
        py::arg("text"), py::arg("max_sentences_per_point") = 2,
        "Full heuristic extraction stage: summary stripping, then split_points.");

  m.def("token_overlap_score",
        [](const std::string& ref_point, const std::string& candidate_point,
           double numeric_boost) {
          return ems::token_overlap_score(ref_point, candidate_point, numeric_boost);
        },
        py::arg("ref_point"), py::arg("candidate_point"), py::arg("numeric_boost") = 0.1);
  m.def("match_points",
        [](const std::vector<std::string>& ref_points,
           const std::vector<std::string>& candidate_points, double lexical_threshold,
           double numeric_boost) {
          ems::MatcherConfig config;
          config.lexical_threshold = lexical_threshold;
          config.numeric_boost = numeric_boost;
          return ems::match_all(ref_points, candidate_points, config, nullptr).assignments;
        },
        py::arg("ref_points"), py::arg("candidate_points"),
        py::arg("lexical_threshold") = 0.5, py::arg("numeric_boost") = 0.1,
        "Lexical matcher: per reference point, the arg-max candidate index or -1.");

  m.def("map_scores_to_answer",
        [](const std::vector<int>& assignments, int answer_count,
           const std::vector<double>& ref_scores) {
          return ems::map_scores_to_answer(make_assignment(assignments, answer_count),
                                           make_ref_scores(ref_scores))
              .scores;
        },
        py::arg("assignments"), py::arg("answer_count"), py::arg("ref_scores"),
        "Max-mapping of reference-side scores onto answer points.");
  m.def("ems_metrics",
        [](const std::vector<int>& assignments, int answer_count,
           const std::vector<double>& ref_scores) {
          return metrics_dict(ems::compute_metrics(make_assignment(assignments, answer_count),
                                                   make_ref_scores(ref_scores)));
        },
        py::arg("assignments"), py::arg("answer_count"), py::arg("ref_scores"),
        "EMS precision/recall/F1 from an assignment and reference-side scores.");
  m.def("ems_f1", &ems::ems_f1, py::arg("precision"), py::arg("recall"));

  m.def("rouge",
        [](const std::string& candidate, const std::string& reference,
           const std::string& variant) {
          return prf_dict(
              ems::rouge(candidate, reference, ems::rouge_variant_from_string(variant)));
        },
        py::arg("candidate"), py::arg("reference"), py::arg("variant") = "rouge-l");
  m.def("bleu",
        [](const std::string& candidate, const std::string& reference, int max_n) {
          return ems::bleu(candidate, reference, max_n);
        },
        py::arg("candidate"), py::arg("reference"), py::arg("max_n") = 4);
  m.def("lcs_length",
        [](const std::vector<std::string>& a, const std::vector<std::string>& b) {
          return ems::lcs_length(a, b);
        },
        py::arg("a"), py::arg("b"));

  m.def("evaluate_pair",
        [](const std::string& reference, const std::string& candidate,
           const std::string& scorer, const std::string& rouge_variant,
           double lexical_threshold, double numeric_boost, int max_sentences_per_point) {
          const auto config =
              deterministic_config(scorer, rouge_variant, lexical_threshold, numeric_boost,
                                   max_sentences_per_point);
          const auto result = ems::evaluate_pair(reference, candidate, config, nullptr);
          py::dict out = metrics_dict(result.metrics);
          out["ref_points"] = result.ref_points;
          out["cand_points"] = result.cand_points;
          out["assignment"] = result.assignment.assignments;
          out["ref_scores"] = result.ref_scores.scores;
          return out;
        },
        py::arg("reference"), py::arg("candidate"), py::arg("scorer") = "rouge",
        py::arg("rouge_variant") = "rouge-l", py::arg("lexical_threshold") = 0.5,
        py::arg("numeric_boost") = 0.1, py::arg("max_sentences_per_point") = 2,
        "Deterministic extract-match-score run over one reference/candidate pair.");

  m.def("perturb_points",
        [](const std::vector<std::string>& points, const std::string& kind, double intensity,
           std::uint64_t seed) {
          ems::PerturbationSpec spec;
          spec.kind = ems::perturbation_from_string(kind);
          spec.intensity = intensity;
          spec.seed = seed;
          return ems::perturb_points(points, spec);
        },
        py::arg("points"), py::arg("kind"), py::arg("intensity") = 0.5, py::arg("seed") = 0,
        "Seeded point-level perturbation: delete-points, duplicate-points, "
        "corrupt-numbers or shuffle-points.");
  m.def("corrupt_numbers",
        [](const std::string& text, std::uint64_t seed) {
          return ems::corrupt_numbers(text, seed);
        },
        py::arg("text"), py::arg("seed") = 0,
        "Rewrite every digit through a seeded no-fixed-point permutation.");
  m.def("delete_count", &ems::delete_count, py::arg("n_points"), py::arg("intensity"));

  m.def("round2", &ems::round2, py::arg("value"),
        "Round half-to-even at two decimals (the report display rounding).");

  m.def("load_dataset",
        [](const std::string& path) {
          py::list rows;
          for (const auto& triplet : ems::load_dataset(path)) {
            py::dict row;
            row["id"] = triplet.id;
            row["company"] = triplet.company;
            row["question_id"] = triplet.question_id;
            row["question"] = triplet.question;
            row["reference"] = triplet.reference;
            row["candidate"] = triplet.candidate;
            rows.append(row);
          }
          return rows;
        },
        py::arg("path"), "Load a JSONL dataset of {id, reference, candidate, ...} records.");
}
