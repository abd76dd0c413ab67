#include <doctest.h>

#include <string>
#include <vector>

#include "ems/errors.hpp"
#include "ems/extraction.hpp"
#include "ems/gateway.hpp"
#include "ems/mock_server.hpp"

using ems::ExtractorConfig;
using ems::default_summary_cues;
using ems::extract;
using ems::parse_point_list_reply;
using ems::SaliencyPoints;
using ems::split_points;
using ems::strip_summary;

TEST_CASE("strip_summary drops leading and trailing cue paragraphs") {
  const auto cues = default_summary_cues();
  const std::string lead = "Overall, a strong quarter.\n\nRevenue grew 12%.\n\nMargins rose.";
  CHECK(strip_summary(lead, cues) == "Revenue grew 12%.\n\nMargins rose.");

  const std::string trail = "Revenue grew 12%.\n\nIn summary, results were strong.";
  CHECK(strip_summary(trail, cues) == "Revenue grew 12%.");

  const std::string both =
      "In conclusion up front.\n\nRevenue grew 12%.\n\nTo summarize, good quarter.";
  CHECK(strip_summary(both, cues) == "Revenue grew 12%.");
}

TEST_CASE("strip_summary is case-insensitive and leaves the interior alone") {
  const auto cues = default_summary_cues();
  const std::string mid = "Revenue grew.\n\nIn summary, mid-course recap.\n\nMargins rose.";
  CHECK(strip_summary(mid, cues) == mid);
  CHECK(strip_summary("IN SUMMARY, short.\n\nDetail point.", cues) == "Detail point.");
}

TEST_CASE("strip_summary never strips down to nothing") {
  const auto cues = default_summary_cues();
  const std::string only = "In summary, that is all.";
  CHECK(strip_summary(only, cues) == only);
  const std::string two = "Overall, opening recap.\n\nIn conclusion, closing recap.";
  CHECK(strip_summary(two, cues) == two);
}

TEST_CASE("split_points turns each bullet item into one point") {
  const std::string text =
      "- Revenue grew 12% to $4.2 billion.\n"
      "- Operating margin reached 18.5%.\n"
      "- Operating margin reached 18.5%.\n";
  const auto points = split_points(text);
  REQUIRE(points.size() == 3);
  CHECK(points[0] == "Revenue grew 12% to $4.2 billion.");
  CHECK(points[1] == points[2]);
}

TEST_CASE("split_points groups prose into two-sentence points") {
  const std::string text =
      "Revenue grew. Margins rose. Cash flow was strong. Debt fell. Buybacks continued.";
  const auto points = split_points(text, 2);
  REQUIRE(points.size() == 3);
  CHECK(points[0] == "Revenue grew. Margins rose.");
  CHECK(points[1] == "Cash flow was strong. Debt fell.");
  CHECK(points[2] == "Buybacks continued.");
}

TEST_CASE("split_points never mixes paragraphs") {
  const std::string text = "Revenue grew.\n\nMargins rose.";
  const auto points = split_points(text, 2);
  REQUIRE(points.size() == 2);
  CHECK(points[0] == "Revenue grew.");
  CHECK(points[1] == "Margins rose.");
}

TEST_CASE("split_points chunks long bullet items") {
  const std::string text = "- First sentence. Second sentence. Third sentence.";
  const auto points = split_points(text, 2);
  REQUIRE(points.size() == 2);
  CHECK(points[0] == "First sentence. Second sentence.");
  CHECK(points[1] == "Third sentence.");
}

TEST_CASE("parse_point_list_reply accepts a strict json list") {
  const auto points = parse_point_list_reply(R"(["first point", "second point"])");
  REQUIRE(points.size() == 2);
  CHECK(points[0] == "first point");
}

TEST_CASE("parse_point_list_reply finds a json list inside prose or fences") {
  const std::string reply = "Here are the bullet points:\n```json\n[\"a\", \"b\"]\n```\nDone.";
  const auto points = parse_point_list_reply(reply);
  REQUIRE(points.size() == 2);
  CHECK(points[1] == "b");
}

TEST_CASE("parse_point_list_reply falls back to bullet lines") {
  const auto points = parse_point_list_reply("- first\n- second\n* third");
  REQUIRE(points.size() == 3);
  CHECK(points[2] == "third");
}

TEST_CASE("parse_point_list_reply falls back to quoted lines") {
  const std::string reply =
      "\"Tesla Bot is approximately 5'8\" tall and weighs around 125 pounds.\",\n"
      "\"Second point.\"\n";
  const auto points = parse_point_list_reply(reply);
  REQUIRE(points.size() == 2);
  CHECK(points[0] == "Tesla Bot is approximately 5'8\" tall and weighs around 125 pounds.");
  CHECK(points[1] == "Second point.");
}

TEST_CASE("parse_point_list_reply rejects garbage") {
  CHECK(parse_point_list_reply("no structure at all").empty());
  CHECK(parse_point_list_reply("").empty());
  CHECK(parse_point_list_reply("[1, 2, 3]").empty());
}

TEST_CASE("heuristic extract strips summaries then splits") {
  ExtractorConfig config;
  const std::string text =
      "Overall, great quarter.\n\n- Revenue grew 12%.\n- Margins rose.\n\n"
      "In summary, momentum continues.";
  const auto points = extract(text, config, nullptr);
  REQUIRE(points.size() == 2);
  CHECK(points[0] == "Revenue grew 12%.");
}

TEST_CASE("extract rejects blank input and bad config") {
  ExtractorConfig config;
  CHECK_THROWS_AS(extract("   \n  ", config, nullptr), ems::ContractError);
  config.summary_cues.clear();
  CHECK_THROWS_AS(extract("text", config, nullptr), ems::ConfigError);

  ExtractorConfig llm;
  llm.mode = ExtractorConfig::Mode::kLlm;
  CHECK_THROWS_AS(extract("text", llm, nullptr), ems::ConfigError);
}

TEST_CASE("llm extraction parses the model reply") {
  ems::MockLlmServer server;
  server.set_default_chat_reply(R"(["Revenue grew 12%.", "Margins rose."])");
  server.start();

  ems::GatewayConfig gc;
  gc.base_url = server.base_url();
  gc.cache_dir = "";
  ems::Gateway gateway(gc);

  ExtractorConfig config;
  config.mode = ExtractorConfig::Mode::kLlm;
  const auto points = extract("Revenue grew 12%. Margins rose.", config, &gateway);
  REQUIRE(points.size() == 2);
  CHECK(points[1] == "Margins rose.");
  CHECK(server.chat_request_count() == 1);
}

TEST_CASE("llm extraction re-prompts on a malformed reply") {
  ems::MockLlmServer server;
  server.add_chat_rule({"previous reply"}, R"(["Recovered point."])");
  server.set_default_chat_reply("I cannot answer that.");
  server.start();

  ems::GatewayConfig gc;
  gc.base_url = server.base_url();
  gc.cache_dir = "";
  ems::Gateway gateway(gc);

  ExtractorConfig config;
  config.mode = ExtractorConfig::Mode::kLlm;
  const auto points = extract("Some answer text.", config, &gateway);
  REQUIRE(points.size() == 1);
  CHECK(points[0] == "Recovered point.");
  CHECK(server.chat_request_count() == 2);
}

TEST_CASE("llm extraction gives up after two re-prompts") {
  ems::MockLlmServer server;
  server.set_default_chat_reply("still not a list");
  server.start();

  ems::GatewayConfig gc;
  gc.base_url = server.base_url();
  gc.cache_dir = "";
  ems::Gateway gateway(gc);

  ExtractorConfig config;
  config.mode = ExtractorConfig::Mode::kLlm;
  try {
    extract("Some answer text.", config, &gateway);
    FAIL("expected ExtractionError");
  } catch (const ems::ExtractionError& e) {
    CHECK(e.raw_reply() == "still not a list");
  }
  CHECK(server.chat_request_count() == 3);
}
