#include <doctest.h>

#include <string>
#include <vector>

#include "ems/errors.hpp"
#include "ems/gateway.hpp"
#include "ems/mock_server.hpp"
#include "ems/scoring.hpp"

using ems::kUnmatched;
using ems::MatchAssignment;
using ems::RougeVariant;
using ems::SaliencyPoints;
using ems::score_assignment;
using ems::score_pair_exact;
using ems::score_pair_llm;
using ems::score_pair_rouge;
using ems::ScorerConfig;
using ems::Side;

namespace {

ems::Gateway make_gateway(const ems::MockLlmServer& server) {
  ems::GatewayConfig gc;
  gc.base_url = server.base_url();
  gc.cache_dir = "";
  return ems::Gateway(gc);
}

}  // namespace

TEST_CASE("rouge pair scorer is a bounded symmetric f1") {
  const double s = score_pair_rouge("Revenue grew 12% in Q3.", "Revenue grew 12%.",
                                    RougeVariant::kRougeL);
  CHECK(s > 0.5);
  CHECK(s < 1.0);
  CHECK(s == score_pair_rouge("Revenue grew 12%.", "Revenue grew 12% in Q3.",
                              RougeVariant::kRougeL));
  CHECK(score_pair_rouge("same text", "same text", RougeVariant::kRougeL) == 1.0);
  CHECK(score_pair_rouge("alpha", "beta", RougeVariant::kRougeL) == 0.0);
}

TEST_CASE("exact pair scorer compares normalized tokens") {
  CHECK(score_pair_exact("Revenue grew 12%.", "revenue GREW 12%") == 1.0);
  CHECK(score_pair_exact("Revenue grew 12%.", "Revenue grew 13%.") == 0.0);
}

TEST_CASE("score_assignment zeroes unmatched positions without calling the scorer") {
  int calls = 0;
  auto scorer = [&](const std::string&, const std::string&) {
    ++calls;
    return 0.5;
  };
  const SaliencyPoints refs{"a", "b", "c"};
  const SaliencyPoints cands{"x", "y"};
  const MatchAssignment assignment{{1, kUnmatched, 0}, 2};
  const auto scores = score_assignment(refs, cands, assignment, scorer);
  CHECK(scores.side == Side::kReference);
  CHECK(scores.scores == std::vector<double>{0.5, 0.0, 0.5});
  CHECK(calls == 2);
}

TEST_CASE("score_assignment validates shapes and scorer output") {
  auto ok = [](const std::string&, const std::string&) { return 0.5; };
  auto bad = [](const std::string&, const std::string&) { return 1.5; };
  const SaliencyPoints refs{"a"};
  const SaliencyPoints cands{"x"};
  CHECK_THROWS_AS(score_assignment(refs, cands, MatchAssignment{{0, 0}, 1}, ok),
                  ems::ContractError);
  CHECK_THROWS_AS(score_assignment(refs, cands, MatchAssignment{{0}, 2}, ok),
                  ems::ContractError);
  CHECK_THROWS_AS(score_assignment(refs, cands, MatchAssignment{{0}, 1}, bad),
                  ems::ContractError);
}

TEST_CASE("score_assignment annotates scorer errors with the reference index") {
  auto scorer = [](const std::string&, const std::string&) -> double {
    throw ems::ScoringError("model did not produce an integer score", "raw");
  };
  try {
    score_assignment({"a", "b"}, {"x"}, MatchAssignment{{kUnmatched, 0}, 1}, scorer);
    FAIL("expected ScoringError");
  } catch (const ems::ScoringError& e) {
    CHECK(std::string(e.what()).find("reference point 1") != std::string::npos);
  }
}

TEST_CASE("llm scorer divides the replied integer by max_score") {
  ems::MockLlmServer server;
  server.set_default_chat_reply("7");
  server.start();
  auto gateway = make_gateway(server);

  ScorerConfig config;
  config.mode = ScorerConfig::Mode::kLlm;
  CHECK(score_pair_llm("kp one", "kp two", config, gateway) ==
        doctest::Approx(0.7).epsilon(1e-12));
  CHECK(server.chat_request_count() == 1);
}

TEST_CASE("llm scorer honors a custom max_score") {
  ems::MockLlmServer server;
  server.set_default_chat_reply("3");
  server.start();
  auto gateway = make_gateway(server);

  ScorerConfig config;
  config.mode = ScorerConfig::Mode::kLlm;
  config.max_score = 5;
  CHECK(score_pair_llm("kp one", "kp two", config, gateway) ==
        doctest::Approx(0.6).epsilon(1e-12));

  config.max_score = 0;
  CHECK_THROWS_AS(score_pair_llm("kp one", "kp two", config, gateway), ems::ConfigError);
}

TEST_CASE("llm scorer retries an out-of-range score once") {
  ems::MockLlmServer server;
  server.add_chat_rule({"The score must be"}, "9");
  server.set_default_chat_reply("15");
  server.start();
  auto gateway = make_gateway(server);

  ScorerConfig config;
  config.mode = ScorerConfig::Mode::kLlm;
  CHECK(score_pair_llm("kp one", "kp two", config, gateway) ==
        doctest::Approx(0.9).epsilon(1e-12));
  CHECK(server.chat_request_count() == 2);
}

TEST_CASE("llm scorer clamps a second out-of-range score") {
  ems::MockLlmServer server;
  server.set_default_chat_reply("15");
  server.start();
  auto gateway = make_gateway(server);

  ScorerConfig config;
  config.mode = ScorerConfig::Mode::kLlm;
  CHECK(score_pair_llm("kp one", "kp two", config, gateway) == 1.0);
  CHECK(server.chat_request_count() == 2);

  ems::MockLlmServer negative;
  negative.set_default_chat_reply("-4");
  negative.start();
  auto gw2 = make_gateway(negative);
  CHECK(score_pair_llm("kp one", "kp two", config, gw2) == 0.0);
}

TEST_CASE("llm scorer re-prompts parse failures then raises ScoringError") {
  ems::MockLlmServer server;
  server.add_chat_rule({"nothing else"}, "8");
  server.set_default_chat_reply("hard to say");
  server.start();
  auto gateway = make_gateway(server);

  ScorerConfig config;
  config.mode = ScorerConfig::Mode::kLlm;
  CHECK(score_pair_llm("kp one", "kp two", config, gateway) ==
        doctest::Approx(0.8).epsilon(1e-12));
  CHECK(server.chat_request_count() == 2);

  ems::MockLlmServer hopeless;
  hopeless.set_default_chat_reply("hard to say");
  hopeless.start();
  auto gw2 = make_gateway(hopeless);
  try {
    score_pair_llm("kp one", "kp two", config, gw2);
    FAIL("expected ScoringError");
  } catch (const ems::ScoringError& e) {
    CHECK(e.raw_reply() == "hard to say");
  }
  CHECK(hopeless.chat_request_count() == 3);
}

TEST_CASE("config-driven score_assignment wires the chosen mode") {
  const SaliencyPoints refs{"Revenue grew 12%.", "Margins rose."};
  const SaliencyPoints cands{"Revenue grew 12%."};
  const MatchAssignment assignment{{0, kUnmatched}, 1};

  ScorerConfig rouge_config;
  rouge_config.mode = ScorerConfig::Mode::kRouge;
  const auto scores = score_assignment(refs, cands, assignment, rouge_config, nullptr);
  CHECK(scores.scores[0] == 1.0);
  CHECK(scores.scores[1] == 0.0);

  ScorerConfig llm_config;
  llm_config.mode = ScorerConfig::Mode::kLlm;
  CHECK_THROWS_AS(score_assignment(refs, cands, assignment, llm_config, nullptr),
                  ems::ConfigError);
}
