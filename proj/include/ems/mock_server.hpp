#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace ems {

/// In-process OpenAI-compatible server for tests and offline development.
/// Scriptable with (request-matcher -> canned reply) rules plus failure
/// injection; binds to an ephemeral 127.0.0.1 port.
class MockLlmServer {
 public:
  MockLlmServer();
  ~MockLlmServer();

  MockLlmServer(const MockLlmServer&) = delete;
  MockLlmServer& operator=(const MockLlmServer&) = delete;

  void start();
  void stop();
  std::string base_url() const;

  /// Reply with `content` when the raw request body satisfies `matches`.
  /// Rules are tried in registration order.
  void add_chat_rule(std::function<bool(const std::string& body)> matches,
                     std::string content);

  /// Reply with `content` when the body contains every needle.
  void add_chat_rule(std::vector<std::string> all_of, std::string content);

  /// Fallback when no rule matches (otherwise the server answers 400).
  void set_default_chat_reply(std::string content);

  /// Fail the next `count` chat/embedding requests with `status` before
  /// normal rule handling resumes.
  void inject_failures(int count, int status);

  /// Artificial per-request latency; lets tests observe true concurrency.
  void set_reply_delay_ms(int delay_ms);

  /// Fixed embedding for one exact input text. Unregistered texts get a
  /// deterministic hash-derived unit vector.
  void set_embedding(const std::string& input_text, std::vector<double> vector);

  int chat_request_count() const;
  int embed_request_count() const;
  int max_concurrent_observed() const;
  std::vector<std::string> chat_bodies() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ems
