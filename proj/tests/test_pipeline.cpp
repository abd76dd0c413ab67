#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "ems/dataset.hpp"
#include "ems/errors.hpp"
#include "ems/mock_server.hpp"
#include "ems/pipeline.hpp"

using ems::default_pipeline_config;
using ems::EvalTriplet;
using ems::evaluate_dataset;
using ems::evaluate_pair;
using ems::ExtractorConfig;
using ems::load_pipeline_config;
using ems::MatcherConfig;
using ems::MockLlmServer;
using ems::PipelineConfig;
using ems::ScorerConfig;

namespace {

const std::string kAssetDir = EMS_ASSET_DIR;

struct TempJson {
  std::filesystem::path path;
  explicit TempJson(const std::string& content) {
    static int counter = 0;
    path = std::filesystem::temp_directory_path() /
           ("ems-config-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) +
            ".json");
    std::ofstream out(path);
    out << content;
  }
  ~TempJson() { std::filesystem::remove(path); }
};

EvalTriplet triplet(const std::string& id, const std::string& ref, const std::string& cand) {
  EvalTriplet t;
  t.id = id;
  t.reference = ref;
  t.candidate = cand;
  return t;
}

PipelineConfig mock_config(const MockLlmServer& server) {
  PipelineConfig config;
  config.gateway.base_url = server.base_url();
  config.gateway.cache_dir = "";
  config.gateway.retry_backoff_ms = 1;
  return config;
}

}  // namespace

TEST_CASE("needs_gateway tracks every stage") {
  PipelineConfig config;
  CHECK_FALSE(config.needs_gateway());
  config.matcher.mode = MatcherConfig::Mode::kLlm;
  CHECK(config.needs_gateway());
  config = PipelineConfig{};
  config.with_embedding_baseline = true;
  CHECK(config.needs_gateway());
  config = PipelineConfig{};
  config.scorer.mode = ScorerConfig::Mode::kEmbedding;
  CHECK(config.needs_gateway());
}

TEST_CASE("summary names the configured stages") {
  const auto s = default_pipeline_config().summary();
  CHECK(s.find("extractor=heuristic") != std::string::npos);
  CHECK(s.find("matcher=lexical") != std::string::npos);
  CHECK(s.find("scorer=rouge(rouge-l)") != std::string::npos);
  CHECK(s.find("seed=0") != std::string::npos);
}

TEST_CASE("load_pipeline_config applies overrides") {
  TempJson file(R"({
    "extractor": {"mode": "heuristic", "max_sentences_per_point": 1},
    "matcher": {"mode": "lexical", "lexical_threshold": 0.4},
    "scorer": {"mode": "rouge", "rouge_variant": "rouge-1"},
    "gateway": {"base_url": "http://127.0.0.1:9", "cache_dir": ""},
    "with_baselines": false,
    "threads": 2,
    "seed": 11
  })");
  const auto config = load_pipeline_config(file.path.string());
  CHECK(config.extractor.max_sentences_per_point == 1);
  CHECK(config.matcher.lexical_threshold == 0.4);
  CHECK(config.scorer.rouge_variant == ems::RougeVariant::kRouge1);
  CHECK(config.gateway.base_url == "http://127.0.0.1:9");
  CHECK_FALSE(config.with_baselines);
  CHECK(config.threads == 2);
  CHECK(config.seed == 11);
}

TEST_CASE("load_pipeline_config rejects unknown keys and bad values") {
  TempJson unknown(R"({"scorers": {}})");
  CHECK_THROWS_AS(load_pipeline_config(unknown.path.string()), ems::ConfigError);

  TempJson nested(R"({"matcher": {"thresh": 0.4}})");
  CHECK_THROWS_AS(load_pipeline_config(nested.path.string()), ems::ConfigError);

  TempJson threshold(R"({"matcher": {"lexical_threshold": 1.5}})");
  CHECK_THROWS_AS(load_pipeline_config(threshold.path.string()), ems::ConfigError);

  TempJson threads(R"({"threads": 0})");
  CHECK_THROWS_AS(load_pipeline_config(threads.path.string()), ems::ConfigError);

  TempJson badtype(R"({"seed": "eleven"})");
  CHECK_THROWS_AS(load_pipeline_config(badtype.path.string()), ems::ConfigError);

  TempJson notjson("{{{");
  CHECK_THROWS_AS(load_pipeline_config(notjson.path.string()), ems::ConfigError);

  CHECK_THROWS_AS(load_pipeline_config("/nonexistent/config.json"), ems::ConfigError);
}

TEST_CASE("load_pipeline_config resolves prompt files relative to the config") {
  const auto dir = std::filesystem::temp_directory_path();
  std::ofstream(dir / "ems-test-prompt.txt") << "Rate <kp1> against <kp2> up to {max_score}.";
  TempJson file(R"({"scorer": {"mode": "llm", "prompt_file": "ems-test-prompt.txt"}})");
  const auto config = load_pipeline_config(file.path.string());
  CHECK(config.scorer.prompt_template.find("<kp1>") != std::string::npos);
  std::filesystem::remove(dir / "ems-test-prompt.txt");

  TempJson missing(R"({"scorer": {"prompt_file": "does-not-exist.txt"}})");
  CHECK_THROWS_AS(load_pipeline_config(missing.path.string()), ems::ConfigError);
}

TEST_CASE("evaluate_pair runs the deterministic pipeline") {
  PipelineConfig config;
  const std::string reference =
      "Revenue grew 12% to $4.2 billion.\n\nOperating margin reached 18.5%.\n\n"
      "The dividend rose 5%.";
  const std::string candidate =
      "Revenue grew 12% to $4.2 billion.\n\nOperating margin reached 18.5%.";
  const auto result = evaluate_pair(reference, candidate, config, nullptr);
  REQUIRE(result.ref_points.size() == 3);
  REQUIRE(result.cand_points.size() == 2);
  CHECK(result.assignment.assignments == std::vector<int>{0, 1, ems::kUnmatched});
  CHECK(result.metrics.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(result.metrics.precision == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("evaluate_pair flags an empty reference and tolerates an empty candidate") {
  PipelineConfig config;
  CHECK_THROWS_AS(evaluate_pair("  ", "candidate", config, nullptr), ems::ContractError);

  const auto result = evaluate_pair("Revenue grew.", "   ", config, nullptr);
  CHECK(result.cand_points.empty());
  CHECK(result.assignment.answer_count == 0);
  CHECK(result.metrics.precision == 0.0);
  CHECK(result.metrics.recall == 0.0);
  CHECK(result.metrics.f1 == 0.0);
}

TEST_CASE("evaluate_dataset reports per-triplet rows in dataset order") {
  PipelineConfig config;
  const auto triplets = ems::load_dataset(kAssetDir + "/data/fixture_dataset.jsonl");
  const auto report = evaluate_dataset(triplets, config, nullptr);
  REQUIRE(report.rows.size() == 4);
  CHECK(report.rows[0].id == "northwind-q1");
  CHECK(report.rows[3].id == "juniper-q3");
  for (const auto& row : report.rows) {
    CHECK_FALSE(row.failed);
    CHECK(row.bleu >= 0.0);
    CHECK(row.rougel_f1 >= 0.0);
  }
  CHECK(report.macro.f1 > 0.0);
  CHECK(report.timestamp.empty());
  CHECK(report.config_summary == config.summary());
}

TEST_CASE("evaluate_dataset can stamp a timestamp on request") {
  PipelineConfig config;
  config.stamp_timestamp = true;
  const auto report =
      evaluate_dataset({triplet("a", "Revenue grew.", "Revenue grew.")}, config, nullptr);
  CHECK(report.timestamp.size() == 20);
  CHECK(report.timestamp.back() == 'Z');
}

TEST_CASE("evaluate_dataset requires a gateway only when a stage needs one") {
  PipelineConfig config;
  config.matcher.mode = MatcherConfig::Mode::kLlm;
  CHECK_THROWS_AS(
      evaluate_dataset({triplet("a", "Revenue grew.", "Revenue grew.")}, config, nullptr),
      ems::ConfigError);
  CHECK_THROWS_AS(evaluate_dataset({}, default_pipeline_config(), nullptr),
                  ems::ContractError);
}

TEST_CASE("an empty candidate extraction becomes a diagnostic zero row") {
  PipelineConfig config;
  const auto report = evaluate_dataset(
      {triplet("a", "Revenue grew.", "Revenue grew."), triplet("b", "Revenue grew.", "   ")},
      config, nullptr);
  REQUIRE(report.rows.size() == 2);
  CHECK_FALSE(report.rows[1].failed);
  CHECK(report.rows[1].note.find("empty candidate") != std::string::npos);
  CHECK(report.rows[1].ems.f1 == 0.0);
  // The diagnostic row still counts toward the aggregate.
  CHECK(report.macro.f1 == doctest::Approx(report.rows[0].ems.f1 / 2.0).epsilon(1e-12));
}

TEST_CASE("a failing triplet is flagged and excluded from aggregates") {
  MockLlmServer server;
  server.add_chat_rule({"poison pill"}, "never an integer");
  server.set_default_chat_reply("0");
  server.start();

  auto config = mock_config(server);
  config.matcher.mode = MatcherConfig::Mode::kLlm;
  config.scorer.mode = ScorerConfig::Mode::kExact;
  ems::Gateway gateway(config.gateway);

  const auto report = evaluate_dataset(
      {triplet("good", "Revenue grew.", "Revenue grew."),
       triplet("bad", "poison pill point.", "Revenue grew.")},
      config, &gateway);
  REQUIRE(report.rows.size() == 2);
  CHECK_FALSE(report.rows[0].failed);
  CHECK(report.rows[0].ems.f1 == 1.0);
  CHECK(report.rows[1].failed);
  CHECK_FALSE(report.rows[1].note.empty());
  CHECK(report.macro.f1 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("strict mode aborts on the first failing triplet") {
  MockLlmServer server;
  server.set_default_chat_reply("never an integer");
  server.start();

  auto config = mock_config(server);
  config.matcher.mode = MatcherConfig::Mode::kLlm;
  config.strict = true;
  ems::Gateway gateway(config.gateway);

  CHECK_THROWS_AS(evaluate_dataset({triplet("a", "Revenue grew.", "Revenue fell.")}, config,
                                   &gateway),
                  ems::MatchingError);
}

TEST_CASE("a run where every triplet fails is an error") {
  MockLlmServer server;
  server.set_default_chat_reply("never an integer");
  server.start();

  auto config = mock_config(server);
  config.matcher.mode = MatcherConfig::Mode::kLlm;
  ems::Gateway gateway(config.gateway);

  CHECK_THROWS_AS(evaluate_dataset({triplet("a", "Revenue grew.", "Revenue fell.")}, config,
                                   &gateway),
                  ems::Error);
}

TEST_CASE("row-level threading yields the single-thread result") {
  PipelineConfig sequential;
  PipelineConfig threaded;
  threaded.threads = 4;

  std::vector<EvalTriplet> triplets;
  for (int i = 0; i < 12; ++i) {
    triplets.push_back(triplet("row-" + std::to_string(i),
                               "Metric " + std::to_string(i) + " grew 1" +
                                   std::to_string(i) + "% in the quarter.\n\nCosts fell.",
                               "Metric " + std::to_string(i) + " grew 1" +
                                   std::to_string(i) + "% in the quarter."));
  }
  const auto a = evaluate_dataset(triplets, sequential, nullptr);
  const auto b = evaluate_dataset(triplets, threaded, nullptr);
  REQUIRE(a.rows.size() == b.rows.size());
  for (size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].id == b.rows[i].id);
    CHECK(a.rows[i].ems.f1 == b.rows[i].ems.f1);
    CHECK(a.rows[i].bleu == b.rows[i].bleu);
  }
}

TEST_CASE("the embedding baseline rides along when requested") {
  MockLlmServer server;
  server.start();

  auto config = mock_config(server);
  config.with_embedding_baseline = true;
  ems::Gateway gateway(config.gateway);

  const auto report = evaluate_dataset(
      {triplet("a", "Revenue grew 12%.", "Revenue grew 12%.")}, config, &gateway);
  REQUIRE(report.rows[0].embed_sim.has_value());
  CHECK(*report.rows[0].embed_sim == doctest::Approx(1.0).epsilon(1e-6));
  REQUIRE(report.macro_embed.has_value());
}

TEST_CASE("draft_answer renders the question into the draft prompt") {
  MockLlmServer server;
  server.set_default_chat_reply("A long drafted answer.");
  server.start();

  ems::GatewayConfig gc;
  gc.base_url = server.base_url();
  gc.cache_dir = "";
  ems::Gateway gateway(gc);

  CHECK(ems::draft_answer("How was revenue?", gateway) == "A long drafted answer.");
  const auto bodies = server.chat_bodies();
  REQUIRE(bodies.size() == 1);
  CHECK(bodies[0].find("How was revenue?") != std::string::npos);
}

TEST_CASE("generate_reference consolidates numbered answer versions") {
  MockLlmServer server;
  server.set_default_chat_reply("The consolidated reference answer.");
  server.start();

  ems::GatewayConfig gc;
  gc.base_url = server.base_url();
  gc.cache_dir = "";
  ems::Gateway gateway(gc);

  const auto reference = ems::generate_reference(
      "How was revenue?", {"Draft one.", "Draft two."}, "Transcript body here.", gateway);
  CHECK(reference == "The consolidated reference answer.");

  const auto bodies = server.chat_bodies();
  REQUIRE(bodies.size() == 1);
  CHECK(bodies[0].find("Answer Version 1:") != std::string::npos);
  CHECK(bodies[0].find("Answer Version 2:") != std::string::npos);
  CHECK(bodies[0].find("Draft one.") != std::string::npos);
  CHECK(bodies[0].find("Transcript body here.") != std::string::npos);

  CHECK_THROWS_AS(ems::generate_reference("q", {"only one"}, "t", gateway),
                  ems::ContractError);
}

TEST_CASE("the llm extraction stage feeds the deterministic tail") {
  MockLlmServer server;
  server.add_chat_rule({"Original answer text"},
                       R"(["Revenue grew 12%.", "Margins rose."])");
  server.add_chat_rule({"Candidate text body"}, R"(["Revenue grew 12%."])");
  server.start();

  auto config = mock_config(server);
  config.extractor.mode = ExtractorConfig::Mode::kLlm;
  ems::Gateway gateway(config.gateway);

  const auto result = evaluate_pair("Original answer text about revenue and margins.",
                                    "Candidate text body about revenue.", config, &gateway);
  REQUIRE(result.ref_points.size() == 2);
  REQUIRE(result.cand_points.size() == 1);
  CHECK(result.assignment.assignments == std::vector<int>{0, ems::kUnmatched});
  CHECK(result.metrics.recall == doctest::Approx(0.5).epsilon(1e-12));
}
