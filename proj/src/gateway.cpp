#include "ems/gateway.hpp"

#include <openssl/evp.h>

#include <atomic>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <semaphore>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ems/errors.hpp"

namespace ems {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw GatewayError("sha-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

std::string strip_trailing_slashes(std::string url) {
  while (!url.empty() && url.back() == '/') url.pop_back();
  return url;
}

// The request paths below already carry the /v1 prefix, so accept base URLs
// given either way: "https://api.example.com" or "https://api.example.com/v1".
std::string normalize_base_url(std::string url) {
  url = strip_trailing_slashes(std::move(url));
  if (url.size() >= 3 && url.compare(url.size() - 3, 3, "/v1") == 0) {
    url = strip_trailing_slashes(url.substr(0, url.size() - 3));
  }
  return url;
}

}  // namespace

std::string cache_key(std::string_view kind, std::string_view model,
                      std::string_view canonical_body) {
  std::string material;
  material.reserve(kind.size() + model.size() + canonical_body.size() + 2);
  material.append(kind);
  material.push_back('\n');
  material.append(model);
  material.push_back('\n');
  material.append(canonical_body);
  return sha256_hex(material);
}

int parse_integer_reply(std::string_view reply) {
  // Drop markdown fence lines, keep everything else verbatim.
  std::string flat;
  flat.reserve(reply.size());
  size_t pos = 0;
  while (pos <= reply.size()) {
    size_t eol = reply.find('\n', pos);
    std::string_view line =
        eol == std::string_view::npos ? reply.substr(pos) : reply.substr(pos, eol - pos);
    size_t b = line.find_first_not_of(" \t");
    bool fence = b != std::string_view::npos && line.substr(b).starts_with("```");
    if (!fence) {
      flat.append(line);
      flat.push_back('\n');
    }
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  for (size_t i = 0; i < flat.size(); ++i) {
    char c = flat[i];
    bool digit = c >= '0' && c <= '9';
    bool signed_start = (c == '-' || c == '+') && i + 1 < flat.size() &&
                        flat[i + 1] >= '0' && flat[i + 1] <= '9';
    if (!digit && !signed_start) continue;
    size_t end = i + (signed_start ? 1 : 0);
    while (end < flat.size() && flat[end] >= '0' && flat[end] <= '9') ++end;
    int value = 0;
    auto [ptr, ec] = std::from_chars(flat.data() + i, flat.data() + end, value);
    if (ec != std::errc()) {
      throw ReplyError("integer out of range in model reply", std::string(reply));
    }
    return value;
  }
  throw ReplyError("no integer found in model reply", std::string(reply));
}

struct Gateway::Impl {
  GatewayConfig config;
  std::string base_url;
  std::string api_key;
  std::counting_semaphore<> slots;
  std::atomic<std::uint64_t> network_calls{0};
  std::atomic<std::uint64_t> cache_hits{0};
  std::atomic<std::uint64_t> retries{0};

  explicit Impl(GatewayConfig cfg)
      : config(std::move(cfg)),
        base_url(normalize_base_url(config.base_url)),
        slots(config.concurrency) {
    if (config.concurrency < 1) throw ConfigError("gateway concurrency must be >= 1");
    if (config.retry_max < 0) throw ConfigError("gateway retry_max must be >= 0");
    if (config.retry_backoff_ms < 0) throw ConfigError("gateway retry_backoff_ms must be >= 0");
    if (base_url.empty() && !config.offline) {
      throw ConfigError("gateway base_url is empty (set one or run offline)");
    }
    if (const char* key = std::getenv(kApiKeyEnvVar)) api_key = key;
    if (!config.cache_dir.empty()) {
      std::error_code ec;
      fs::create_directories(config.cache_dir, ec);
      if (ec) throw ConfigError("cannot create cache dir " + config.cache_dir);
    }
  }

  fs::path cache_path(const std::string& key) const {
    return fs::path(config.cache_dir) / key;
  }

  std::optional<std::string> cache_read(const std::string& key) {
    if (config.cache_dir.empty()) return std::nullopt;
    std::ifstream in(cache_path(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buf;
    buf << in.rdbuf();
    cache_hits.fetch_add(1);
    return buf.str();
  }

  void cache_write(const std::string& key, std::string_view content) {
    if (config.cache_dir.empty()) return;
    static std::atomic<unsigned> counter{0};
    fs::path final_path = cache_path(key);
    fs::path tmp = final_path;
    tmp += ".tmp" + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw GatewayError("cannot write cache file " + tmp.string());
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
    std::error_code ec;
    fs::rename(tmp, final_path, ec);
    if (ec) fs::remove(tmp, ec);  // another writer won the race
  }

  std::string post_json(const std::string& path, const std::string& payload) {
    if (config.offline) {
      throw GatewayError("offline mode: request is not in the cache and the network is disabled");
    }
    for (int attempt = 0;; ++attempt) {
      int status = 0;
      std::string detail;
      bool retryable = false;
      {
        slots.acquire();
        struct Release {
          std::counting_semaphore<>* s;
          ~Release() { s->release(); }
        } release{&slots};
        httplib::Client client(base_url);
        client.set_connection_timeout(config.timeout_s, 0);
        client.set_read_timeout(config.timeout_s, 0);
        client.set_write_timeout(config.timeout_s, 0);
        httplib::Headers headers;
        if (!api_key.empty()) headers.emplace("Authorization", "Bearer " + api_key);
        network_calls.fetch_add(1);
        auto res = client.Post(path, headers, payload, "application/json");
        if (res && res->status == 200) return res->body;
        if (!res) {
          retryable = true;
          detail = "transport error: " + httplib::to_string(res.error());
        } else {
          status = res->status;
          retryable = status == 429 || status >= 500;
          detail = "http " + std::to_string(status) + " from " + path;
          if (status == 401 || status == 403) detail = "authentication rejected (" + detail + ")";
        }
      }
      if (!retryable) throw GatewayError(detail, status, false);
      if (attempt >= config.retry_max) {
        throw GatewayError("retries exhausted: " + detail, status, true);
      }
      retries.fetch_add(1);
      auto backoff = std::chrono::milliseconds(
          static_cast<long long>(config.retry_backoff_ms) * (1LL << attempt));
      std::this_thread::sleep_for(backoff);
    }
  }
};

Gateway::Gateway(GatewayConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
Gateway::~Gateway() = default;

std::string Gateway::chat_complete(const ChatRequest& request) {
  if (request.messages.empty()) throw ContractError("chat request needs at least one message");
  if (request.temperature < 0) throw ContractError("temperature must be >= 0");
  json body;
  body["model"] = request.model.empty() ? impl_->config.model : request.model;
  body["messages"] = json::array();
  for (const ChatMessage& m : request.messages) {
    body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  }
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_output_tokens;
  std::optional<std::int64_t> seed = request.seed ? request.seed : impl_->config.seed;
  if (seed) body["seed"] = *seed;
  std::string payload = body.dump();
  std::string key = cache_key("chat", body["model"].get<std::string>(), payload);
  if (auto cached = impl_->cache_read(key)) return *cached;
  std::string raw = impl_->post_json("/v1/chat/completions", payload);
  std::string content;
  try {
    json parsed = json::parse(raw);
    content = parsed.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw GatewayError(std::string("malformed chat completion response: ") + e.what());
  }
  impl_->cache_write(key, content);
  return content;
}

std::vector<std::vector<double>> Gateway::embed(const std::vector<std::string>& texts) {
  if (texts.empty()) throw ContractError("embed requires at least one text");
  const std::string& model = impl_->config.embed_model;
  std::vector<std::vector<double>> out(texts.size());
  std::vector<size_t> missing;
  std::vector<std::string> keys(texts.size());
  for (size_t i = 0; i < texts.size(); ++i) {
    json probe = {{"model", model}, {"input", texts[i]}};
    keys[i] = cache_key("embed", model, probe.dump());
    if (auto cached = impl_->cache_read(keys[i])) {
      out[i] = json::parse(*cached).get<std::vector<double>>();
    } else {
      missing.push_back(i);
    }
  }
  if (missing.empty()) return out;
  json body;
  body["model"] = model;
  body["input"] = json::array();
  for (size_t i : missing) body["input"].push_back(texts[i]);
  std::string raw = impl_->post_json("/v1/embeddings", body.dump());
  try {
    json parsed = json::parse(raw);
    const json& data = parsed.at("data");
    if (data.size() != missing.size()) {
      throw GatewayError("embedding response size mismatch");
    }
    for (const json& item : data) {
      size_t idx = item.at("index").get<size_t>();
      if (idx >= missing.size()) throw GatewayError("embedding index out of range");
      auto vec = item.at("embedding").get<std::vector<double>>();
      out[missing[idx]] = std::move(vec);
    }
  } catch (const json::exception& e) {
    throw GatewayError(std::string("malformed embedding response: ") + e.what());
  }
  for (size_t i : missing) {
    if (out[i].empty()) throw GatewayError("embedding response missing an input");
    impl_->cache_write(keys[i], json(out[i]).dump());
  }
  return out;
}

GatewayStats Gateway::stats() const {
  GatewayStats s;
  s.network_calls = impl_->network_calls.load();
  s.cache_hits = impl_->cache_hits.load();
  s.retries = impl_->retries.load();
  return s;
}

const GatewayConfig& Gateway::config() const { return impl_->config; }

}  // namespace ems
