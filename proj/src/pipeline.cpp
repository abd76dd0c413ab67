#include "ems/pipeline.hpp"

#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ems/baselines.hpp"
#include "ems/detail/parallel.hpp"
#include "ems/errors.hpp"
#include "ems/metrics.hpp"
#include "ems/prompts.hpp"
#include "ems/text.hpp"

namespace ems {

namespace fs = std::filesystem;
using nlohmann::json;

bool PipelineConfig::needs_gateway() const {
  return extractor.mode == ExtractorConfig::Mode::kLlm ||
         matcher.mode == MatcherConfig::Mode::kLlm ||
         scorer.mode == ScorerConfig::Mode::kLlm ||
         scorer.mode == ScorerConfig::Mode::kEmbedding || with_embedding_baseline;
}

std::string PipelineConfig::summary() const {
  std::string out = "extractor=";
  out += extractor.mode == ExtractorConfig::Mode::kHeuristic ? "heuristic" : "llm";
  out += " matcher=";
  out += matcher.mode == MatcherConfig::Mode::kLexical ? "lexical" : "llm";
  out += " scorer=";
  switch (scorer.mode) {
    case ScorerConfig::Mode::kLlm: out += "llm"; break;
    case ScorerConfig::Mode::kRouge: out += "rouge(" + to_string(scorer.rouge_variant) + ")"; break;
    case ScorerConfig::Mode::kEmbedding: out += "embedding"; break;
    case ScorerConfig::Mode::kExact: out += "exact"; break;
  }
  out += " baselines=";
  out += with_baselines ? "on" : "off";
  out += " seed=" + std::to_string(seed);
  return out;
}

PipelineConfig default_pipeline_config() { return PipelineConfig{}; }

namespace {

void reject_unknown(const json& obj, std::initializer_list<const char*> known,
                    const std::string& section) {
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) {
      throw ConfigError("unknown config key \"" + key + "\"" +
                        (section.empty() ? "" : " in section \"" + section + "\""));
    }
  }
}

std::string load_prompt_file(const fs::path& base_dir, const std::string& rel) {
  fs::path p = fs::path(rel).is_absolute() ? fs::path(rel) : base_dir / rel;
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot open prompt file " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string rfc3339_utc_now() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

PipelineConfig load_pipeline_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  json doc = json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ConfigError("config file " + path + " is not a JSON object");
  }
  fs::path base_dir = fs::path(path).parent_path();
  PipelineConfig config;
  reject_unknown(doc,
                 {"extractor", "matcher", "scorer", "gateway", "with_baselines",
                  "with_embedding_baseline", "stamp_timestamp", "strict", "threads", "seed"},
                 "");
  try {
    if (doc.contains("extractor")) {
      const json& e = doc["extractor"];
      reject_unknown(e, {"mode", "summary_cues", "max_sentences_per_point", "prompt_file"},
                     "extractor");
      if (e.contains("mode")) {
        std::string mode = e["mode"].get<std::string>();
        if (mode == "heuristic") config.extractor.mode = ExtractorConfig::Mode::kHeuristic;
        else if (mode == "llm") config.extractor.mode = ExtractorConfig::Mode::kLlm;
        else throw ConfigError("extractor.mode must be heuristic or llm");
      }
      if (e.contains("summary_cues")) {
        config.extractor.summary_cues = e["summary_cues"].get<std::vector<std::string>>();
      }
      if (e.contains("max_sentences_per_point")) {
        config.extractor.max_sentences_per_point = e["max_sentences_per_point"].get<int>();
        if (config.extractor.max_sentences_per_point < 1) {
          throw ConfigError("extractor.max_sentences_per_point must be >= 1");
        }
      }
      if (e.contains("prompt_file")) {
        config.extractor.prompt_template =
            load_prompt_file(base_dir, e["prompt_file"].get<std::string>());
      }
    }
    if (doc.contains("matcher")) {
      const json& m = doc["matcher"];
      reject_unknown(m, {"mode", "lexical_threshold", "numeric_boost", "prompt_file"},
                     "matcher");
      if (m.contains("mode")) {
        std::string mode = m["mode"].get<std::string>();
        if (mode == "lexical") config.matcher.mode = MatcherConfig::Mode::kLexical;
        else if (mode == "llm") config.matcher.mode = MatcherConfig::Mode::kLlm;
        else throw ConfigError("matcher.mode must be lexical or llm");
      }
      if (m.contains("lexical_threshold")) {
        config.matcher.lexical_threshold = m["lexical_threshold"].get<double>();
        if (config.matcher.lexical_threshold <= 0.0 || config.matcher.lexical_threshold > 1.0) {
          throw ConfigError("matcher.lexical_threshold must be in (0,1]");
        }
      }
      if (m.contains("numeric_boost")) {
        config.matcher.numeric_boost = m["numeric_boost"].get<double>();
        if (config.matcher.numeric_boost < 0.0) {
          throw ConfigError("matcher.numeric_boost must be >= 0");
        }
      }
      if (m.contains("prompt_file")) {
        config.matcher.prompt_template =
            load_prompt_file(base_dir, m["prompt_file"].get<std::string>());
      }
    }
    if (doc.contains("scorer")) {
      const json& s = doc["scorer"];
      reject_unknown(s, {"mode", "max_score", "rouge_variant", "prompt_file"}, "scorer");
      if (s.contains("mode")) {
        std::string mode = s["mode"].get<std::string>();
        if (mode == "llm") config.scorer.mode = ScorerConfig::Mode::kLlm;
        else if (mode == "rouge") config.scorer.mode = ScorerConfig::Mode::kRouge;
        else if (mode == "embedding") config.scorer.mode = ScorerConfig::Mode::kEmbedding;
        else if (mode == "exact") config.scorer.mode = ScorerConfig::Mode::kExact;
        else throw ConfigError("scorer.mode must be llm, rouge, embedding or exact");
      }
      if (s.contains("max_score")) {
        config.scorer.max_score = s["max_score"].get<int>();
        if (config.scorer.max_score < 1) throw ConfigError("scorer.max_score must be >= 1");
      }
      if (s.contains("rouge_variant")) {
        config.scorer.rouge_variant =
            rouge_variant_from_string(s["rouge_variant"].get<std::string>());
      }
      if (s.contains("prompt_file")) {
        config.scorer.prompt_template =
            load_prompt_file(base_dir, s["prompt_file"].get<std::string>());
      }
    }
    if (doc.contains("gateway")) {
      const json& g = doc["gateway"];
      reject_unknown(g,
                     {"base_url", "model", "embed_model", "concurrency", "retry_max",
                      "retry_backoff_ms", "timeout_s", "cache_dir", "offline", "seed"},
                     "gateway");
      if (g.contains("base_url")) config.gateway.base_url = g["base_url"].get<std::string>();
      if (g.contains("model")) config.gateway.model = g["model"].get<std::string>();
      if (g.contains("embed_model")) {
        config.gateway.embed_model = g["embed_model"].get<std::string>();
      }
      if (g.contains("concurrency")) config.gateway.concurrency = g["concurrency"].get<int>();
      if (g.contains("retry_max")) config.gateway.retry_max = g["retry_max"].get<int>();
      if (g.contains("retry_backoff_ms")) {
        config.gateway.retry_backoff_ms = g["retry_backoff_ms"].get<int>();
      }
      if (g.contains("timeout_s")) config.gateway.timeout_s = g["timeout_s"].get<int>();
      if (g.contains("cache_dir")) config.gateway.cache_dir = g["cache_dir"].get<std::string>();
      if (g.contains("offline")) config.gateway.offline = g["offline"].get<bool>();
      if (g.contains("seed")) config.gateway.seed = g["seed"].get<std::int64_t>();
    }
    if (doc.contains("with_baselines")) config.with_baselines = doc["with_baselines"].get<bool>();
    if (doc.contains("with_embedding_baseline")) {
      config.with_embedding_baseline = doc["with_embedding_baseline"].get<bool>();
    }
    if (doc.contains("stamp_timestamp")) {
      config.stamp_timestamp = doc["stamp_timestamp"].get<bool>();
    }
    if (doc.contains("strict")) config.strict = doc["strict"].get<bool>();
    if (doc.contains("threads")) {
      config.threads = doc["threads"].get<int>();
      if (config.threads < 1) throw ConfigError("threads must be >= 1");
    }
    if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  return config;
}

TripletResult evaluate_pair(const std::string& reference, const std::string& candidate,
                            const PipelineConfig& config, Gateway* gateway) {
  TripletResult result;
  result.ref_points = extract(reference, config.extractor, gateway);
  if (result.ref_points.empty()) {
    throw ContractError("reference text produced no saliency points");
  }
  if (!text::trim(candidate).empty()) {
    result.cand_points = extract(candidate, config.extractor, gateway);
  }
  if (result.cand_points.empty()) {
    result.assignment.answer_count = 0;
    result.assignment.assignments.assign(result.ref_points.size(), kUnmatched);
  } else {
    result.assignment =
        match_all(result.ref_points, result.cand_points, config.matcher, gateway);
  }
  result.ref_scores = score_assignment(result.ref_points, result.cand_points,
                                       result.assignment, config.scorer, gateway);
  result.metrics = compute_metrics(result.assignment, result.ref_scores);
  return result;
}

EvalReport evaluate_dataset(const std::vector<EvalTriplet>& triplets,
                            const PipelineConfig& config, Gateway* gateway) {
  if (triplets.empty()) throw ContractError("no triplets to evaluate");
  if (config.needs_gateway() && gateway == nullptr) {
    throw ConfigError("this pipeline configuration requires a gateway");
  }
  std::vector<RowResult> rows(triplets.size());
  detail::parallel_for(static_cast<int>(triplets.size()), config.threads, [&](int idx) {
    const EvalTriplet& t = triplets[static_cast<size_t>(idx)];
    RowResult& row = rows[static_cast<size_t>(idx)];
    row.id = t.id;
    row.company = t.company;
    row.question_id = t.question_id;
    try {
      TripletResult r = evaluate_pair(t.reference, t.candidate, config, gateway);
      row.ems = r.metrics;
      row.assignment = std::move(r.assignment);
      row.ref_scores = std::move(r.ref_scores);
      for (int a : row.assignment.assignments) {
        if (a != kUnmatched) ++row.matched;
      }
      if (row.ems.n_ans == 0) row.note = "empty candidate extraction";
      if (config.with_baselines) {
        row.bleu = bleu(t.candidate, t.reference);
        row.rouge1_f1 = rouge(t.candidate, t.reference, RougeVariant::kRouge1).f1;
        row.rouge2_f1 = rouge(t.candidate, t.reference, RougeVariant::kRouge2).f1;
        row.rougel_f1 = rouge(t.candidate, t.reference, RougeVariant::kRougeL).f1;
        if (config.with_embedding_baseline && gateway != nullptr) {
          row.embed_sim = embed_similarity(t.candidate, t.reference, *gateway);
        }
      }
    } catch (const Error& e) {
      if (config.strict) throw;
      row.failed = true;
      row.note = e.what();
      row.ems = EmsMetrics{};
    }
  });
  EvalReport report = build_report(std::move(rows), config.summary(), config.seed);
  if (config.stamp_timestamp) report.timestamp = rfc3339_utc_now();
  return report;
}

std::string draft_answer(const std::string& question, Gateway& gateway,
                         std::optional<std::int64_t> seed) {
  std::string prompt =
      prompts::render(prompts::draft_answer_template(), {{"<Question>", question}});
  ChatRequest request;
  request.max_output_tokens = 2048;
  request.seed = seed;
  request.messages.push_back({"user", prompt});
  return gateway.chat_complete(request);
}

std::string generate_reference(const std::string& question,
                               const std::vector<std::string>& answer_versions,
                               const std::string& transcript, Gateway& gateway) {
  if (answer_versions.size() < 2) {
    throw ContractError("generate_reference needs at least 2 answer versions");
  }
  std::string versions;
  for (size_t i = 0; i < answer_versions.size(); ++i) {
    if (i > 0) versions += "\n\n";
    versions += "Answer Version " + std::to_string(i + 1) + ":\n" + answer_versions[i];
  }
  std::string prompt = prompts::render(prompts::consolidation_template(),
                                       {{"<Question>", question},
                                        {"<Transcript>", transcript},
                                        {"<AnswerVersions>", versions}});
  ChatRequest request;
  request.max_output_tokens = 4096;
  request.messages.push_back({"user", prompt});
  return gateway.chat_complete(request);
}

}  // namespace ems
