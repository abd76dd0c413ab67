#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ems/baselines.hpp"
#include "ems/dataset.hpp"
#include "ems/errors.hpp"
#include "ems/extraction.hpp"
#include "ems/gateway.hpp"
#include "ems/perturb.hpp"
#include "ems/pipeline.hpp"
#include "ems/report.hpp"

namespace {

using nlohmann::json;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ems::ConfigError("cannot open file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_output(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-") {
    std::cout << content;
    return;
  }
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw ems::Error("cannot write output file " + out_path);
  out << content;
  if (!out) throw ems::Error("short write to output file " + out_path);
}

struct CommonOpts {
  std::string config_path;
  std::string dataset_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  bool offline = false;
  std::string base_url;
  std::string cache_dir;
};

ems::PipelineConfig resolve_config(const CommonOpts& opts) {
  ems::PipelineConfig config = opts.config_path.empty()
                                   ? ems::default_pipeline_config()
                                   : ems::load_pipeline_config(opts.config_path);
  if (opts.seed) {
    config.seed = *opts.seed;
    config.gateway.seed = static_cast<std::int64_t>(*opts.seed);
  }
  if (opts.offline) config.gateway.offline = true;
  if (!opts.base_url.empty()) config.gateway.base_url = opts.base_url;
  if (!opts.cache_dir.empty()) config.gateway.cache_dir = opts.cache_dir;
  return config;
}

std::unique_ptr<ems::Gateway> make_gateway(const ems::PipelineConfig& config, bool required) {
  if (!required) return nullptr;
  return std::make_unique<ems::Gateway>(config.gateway);
}

void print_stats(const ems::Gateway* gateway) {
  ems::GatewayStats stats;
  if (gateway != nullptr) stats = gateway->stats();
  std::fprintf(stderr, "gateway: %llu network calls, %llu cache hits, %llu retries\n",
               static_cast<unsigned long long>(stats.network_calls),
               static_cast<unsigned long long>(stats.cache_hits),
               static_cast<unsigned long long>(stats.retries));
}

int cmd_evaluate(const CommonOpts& opts, const std::string& format_name) {
  if (opts.dataset_path.empty()) throw ems::ConfigError("evaluate needs --dataset");
  ems::PipelineConfig config = resolve_config(opts);
  auto triplets = ems::load_dataset(opts.dataset_path);
  auto gateway = make_gateway(config, config.needs_gateway());
  ems::EvalReport report = ems::evaluate_dataset(triplets, config, gateway.get());
  ems::ReportFormat format = ems::report_format_from_string(format_name);
  write_output(opts.out_path, ems::render_report(report, format));
  print_stats(gateway.get());
  return 0;
}

int cmd_extract(const CommonOpts& opts, const std::string& in_path) {
  ems::PipelineConfig config = resolve_config(opts);
  std::string text = read_file(in_path);
  bool llm = config.extractor.mode == ems::ExtractorConfig::Mode::kLlm;
  auto gateway = make_gateway(config, llm);
  ems::SaliencyPoints points = ems::extract(text, config.extractor, gateway.get());
  json out = points;
  write_output(opts.out_path, out.dump(2) + "\n");
  if (llm) print_stats(gateway.get());
  return 0;
}

int cmd_perturb(const CommonOpts& opts, const std::string& in_path,
                const std::string& kind_name, double intensity) {
  ems::PerturbationSpec spec;
  spec.kind = ems::perturbation_from_string(kind_name);
  spec.intensity = intensity;
  spec.seed = opts.seed.value_or(0);
  std::string text = read_file(in_path);
  write_output(opts.out_path, ems::perturb_text(text, spec) + "\n");
  return 0;
}

int cmd_baselines(const CommonOpts& opts) {
  if (opts.dataset_path.empty()) throw ems::ConfigError("baselines needs --dataset");
  auto triplets = ems::load_dataset(opts.dataset_path);
  std::string out = "id,bleu,rouge1_f1,rouge2_f1,rougel_f1\n";
  for (const ems::EvalTriplet& t : triplets) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "%s,%.2f,%.2f,%.2f,%.2f\n", t.id.c_str(),
                  ems::round2(ems::bleu(t.candidate, t.reference)),
                  ems::round2(ems::rouge(t.candidate, t.reference,
                                         ems::RougeVariant::kRouge1).f1),
                  ems::round2(ems::rouge(t.candidate, t.reference,
                                         ems::RougeVariant::kRouge2).f1),
                  ems::round2(ems::rouge(t.candidate, t.reference,
                                         ems::RougeVariant::kRougeL).f1));
    out += buf;
  }
  write_output(opts.out_path, out);
  return 0;
}

int cmd_gen_reference(const CommonOpts& opts, const std::string& question,
                      const std::string& question_file, const std::string& answers_path,
                      const std::string& transcript_path, int drafts) {
  ems::PipelineConfig config = resolve_config(opts);
  std::string q = question;
  if (q.empty() && !question_file.empty()) q = read_file(question_file);
  if (q.empty()) throw ems::ConfigError("gen-reference needs --question or --question-file");
  std::vector<std::string> versions;
  if (!answers_path.empty()) {
    json parsed = json::parse(read_file(answers_path), nullptr, false);
    if (!parsed.is_array()) {
      throw ems::ConfigError("answers file must be a JSON array of strings");
    }
    versions = parsed.get<std::vector<std::string>>();
  }
  auto gateway = make_gateway(config, true);
  std::int64_t base_seed = config.gateway.seed.value_or(0);
  for (int i = 0; i < drafts; ++i) {
    versions.push_back(ems::draft_answer(q, *gateway, base_seed + i + 1));
  }
  std::string transcript = transcript_path.empty() ? "" : read_file(transcript_path);
  std::string reference = ems::generate_reference(q, versions, transcript, *gateway);
  write_output(opts.out_path, reference + "\n");
  print_stats(gateway.get());
  return 0;
}

int cmd_report(const CommonOpts& opts, const std::string& in_path,
               const std::string& format_name) {
  ems::EvalReport report = ems::parse_report_json(read_file(in_path));
  ems::ReportFormat format = ems::report_format_from_string(format_name);
  write_output(opts.out_path, ems::render_report(report, format));
  return 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Extract-match-score evaluation for long-form answers"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOpts opts;
  app.add_option("--config", opts.config_path, "Pipeline config file (JSON)");
  app.add_option("--dataset", opts.dataset_path, "JSONL dataset of {id, reference, candidate}");
  app.add_option("--out", opts.out_path, "Output path ('-' or empty for stdout)");
  app.add_option("--seed", opts.seed, "Run seed (also forwarded to the endpoint)");
  app.add_flag("--offline", opts.offline, "Serve LLM calls from the cache only");
  app.add_option("--base-url", opts.base_url, "Override the gateway base URL");
  app.add_option("--cache-dir", opts.cache_dir, "Override the gateway cache directory");

  auto* evaluate = app.add_subcommand("evaluate", "Run the full pipeline over a dataset");
  std::string eval_format = "json";
  evaluate->add_option("--format", eval_format, "Report format: json, csv or markdown");

  auto* extract = app.add_subcommand("extract", "Extract saliency points from a text file");
  std::string extract_in;
  extract->add_option("--in", extract_in, "Input text file")->required();

  auto* perturb = app.add_subcommand("perturb", "Degrade an answer for sensitivity tests");
  std::string perturb_in;
  std::string perturb_kind = "delete-points";
  double perturb_intensity = 0.5;
  perturb->add_option("--in", perturb_in, "Input text file")->required();
  perturb->add_option("--kind", perturb_kind,
                      "delete-points, duplicate-points, corrupt-numbers or shuffle-points");
  perturb->add_option("--intensity", perturb_intensity, "Fraction of points affected, (0,1]");

  auto* baselines = app.add_subcommand("baselines", "BLEU/ROUGE baselines only");

  auto* gen = app.add_subcommand("gen-reference", "Draft and consolidate a reference answer");
  std::string gen_question;
  std::string gen_question_file;
  std::string gen_answers;
  std::string gen_transcript;
  int gen_drafts = 0;
  gen->add_option("--question", gen_question, "Question text");
  gen->add_option("--question-file", gen_question_file, "File holding the question text");
  gen->add_option("--answers", gen_answers, "JSON array of pre-drafted answer versions");
  gen->add_option("--transcript", gen_transcript, "Transcript file for the consolidation");
  gen->add_option("--drafts", gen_drafts, "Answer versions to draft before consolidating");

  auto* report = app.add_subcommand("report", "Re-render a JSON report");
  std::string report_in;
  std::string report_format = "markdown";
  report->add_option("--in", report_in, "JSON report file")->required();
  report->add_option("--format", report_format, "Target format: json, csv or markdown");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (evaluate->parsed()) return cmd_evaluate(opts, eval_format);
  if (extract->parsed()) return cmd_extract(opts, extract_in);
  if (perturb->parsed()) return cmd_perturb(opts, perturb_in, perturb_kind, perturb_intensity);
  if (baselines->parsed()) return cmd_baselines(opts);
  if (gen->parsed()) {
    return cmd_gen_reference(opts, gen_question, gen_question_file, gen_answers,
                             gen_transcript, gen_drafts);
  }
  if (report->parsed()) return cmd_report(opts, report_in, report_format);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ems::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const ems::DatasetError& e) {
    std::fprintf(stderr, "dataset error: %s\n", e.what());
    return 2;
  } catch (const ems::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
