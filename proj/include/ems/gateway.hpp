#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ems {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;  // empty -> gateway default
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
  int max_output_tokens = 1024;
};

struct GatewayConfig {
  std::string base_url;               // e.g. "https://api.example.com", with or without "/v1"
  std::string model = "gpt-4o-mini";  // chat model; defaults are arbitrary and configurable
  std::string embed_model = "text-embedding-3-small";
  int concurrency = 4;       // max in-flight requests across all threads
  int retry_max = 3;         // retries after the first attempt
  int retry_backoff_ms = 250;
  int timeout_s = 120;
  std::string cache_dir = ".ems-cache";  // empty disables the disk cache
  bool offline = false;      // cache-only: any network call is an error
  std::optional<std::int64_t> seed;  // forwarded to endpoints that accept one
};

struct GatewayStats {
  std::uint64_t network_calls = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t retries = 0;
};

/// Single access point to OpenAI-compatible chat-completion and embedding
/// endpoints. Adds bounded-concurrency, retry with exponential backoff on
/// 429/5xx/transport failures, and a persistent content-addressed response
/// cache so evaluation reruns cost nothing. The API key is read from the
/// EMS_API_KEY environment variable only. Safe to share across threads.
class Gateway {
 public:
  explicit Gateway(GatewayConfig config);
  ~Gateway();

  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// First choice's message content. Served from cache when possible.
  std::string chat_complete(const ChatRequest& request);

  /// One vector per input text, order preserved. Cached per-text.
  std::vector<std::vector<double>> embed(const std::vector<std::string>& texts);

  GatewayStats stats() const;
  const GatewayConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Name of the environment variable holding the API credential.
inline constexpr char kApiKeyEnvVar[] = "EMS_API_KEY";

/// First signed decimal integer in a model reply, after stripping markdown
/// fences and label prefixes. Throws ReplyError if none is present.
int parse_integer_reply(std::string_view reply);

/// Stable digest for a logical request: endpoint kind + model + canonical
/// request body. Identical requests produce identical keys across runs.
std::string cache_key(std::string_view kind, std::string_view model,
                      std::string_view canonical_body);

}  // namespace ems
