#include "ems/mock_server.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "ems/errors.hpp"

namespace ems {

using nlohmann::json;

namespace {

// FNV-1a; stable across platforms so default embeddings are reproducible.
std::uint64_t fnv1a(std::string_view data, std::uint64_t seed = 1469598103934665603ULL) {
  std::uint64_t h = seed;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<double> derived_embedding(const std::string& text) {
  std::vector<double> v(8);
  double norm = 0.0;
  for (size_t i = 0; i < v.size(); ++i) {
    std::uint64_t h = fnv1a(text, 1469598103934665603ULL + i * 1000003ULL);
    v[i] = static_cast<double>(h % 20001) / 10000.0 - 1.0;  // [-1, 1]
    norm += v[i] * v[i];
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    v[0] = 1.0;
    return v;
  }
  for (double& x : v) x /= norm;
  return v;
}

}  // namespace

struct MockLlmServer::Impl {
  httplib::Server server;
  std::thread runner;
  int port = 0;
  bool running = false;

  mutable std::mutex mutex;
  std::vector<std::pair<std::function<bool(const std::string&)>, std::string>> rules;
  std::string default_reply;
  bool has_default = false;
  std::unordered_map<std::string, std::vector<double>> embeddings;
  std::vector<std::string> bodies;
  int fail_count = 0;
  int fail_status = 500;
  int delay_ms = 0;

  std::atomic<int> chat_requests{0};
  std::atomic<int> embed_requests{0};
  std::atomic<int> in_flight{0};
  std::atomic<int> max_in_flight{0};

  struct FlightGuard {
    Impl* impl;
    explicit FlightGuard(Impl* i) : impl(i) {
      int now = impl->in_flight.fetch_add(1) + 1;
      int prev = impl->max_in_flight.load();
      while (now > prev && !impl->max_in_flight.compare_exchange_weak(prev, now)) {
      }
    }
    ~FlightGuard() { impl->in_flight.fetch_sub(1); }
  };

  /// True when this request was consumed by failure injection.
  bool maybe_fail(httplib::Response& res) {
    std::lock_guard lock(mutex);
    if (fail_count <= 0) return false;
    --fail_count;
    res.status = fail_status;
    res.set_content("{\"error\":\"injected failure\"}", "application/json");
    return true;
  }

  void apply_delay() {
    int d;
    {
      std::lock_guard lock(mutex);
      d = delay_ms;
    }
    if (d > 0) std::this_thread::sleep_for(std::chrono::milliseconds(d));
  }

  void handle_chat(const httplib::Request& req, httplib::Response& res) {
    FlightGuard guard(this);
    chat_requests.fetch_add(1);
    apply_delay();
    if (maybe_fail(res)) return;
    std::string content;
    bool matched = false;
    {
      std::lock_guard lock(mutex);
      bodies.push_back(req.body);
      for (const auto& [pred, reply] : rules) {
        if (pred(req.body)) {
          content = reply;
          matched = true;
          break;
        }
      }
      if (!matched && has_default) {
        content = default_reply;
        matched = true;
      }
    }
    if (!matched) {
      res.status = 400;
      res.set_content("{\"error\":\"no mock rule matches this request\"}", "application/json");
      return;
    }
    json reply = {
        {"id", "mock-1"},
        {"object", "chat.completion"},
        {"choices",
         json::array({{{"index", 0},
                       {"finish_reason", "stop"},
                       {"message", {{"role", "assistant"}, {"content", content}}}}})},
    };
    res.set_content(reply.dump(), "application/json");
  }

  void handle_embed(const httplib::Request& req, httplib::Response& res) {
    FlightGuard guard(this);
    embed_requests.fetch_add(1);
    apply_delay();
    if (maybe_fail(res)) return;
    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception&) {
      res.status = 400;
      res.set_content("{\"error\":\"bad json\"}", "application/json");
      return;
    }
    std::vector<std::string> inputs;
    if (body.contains("input")) {
      if (body["input"].is_string()) {
        inputs.push_back(body["input"].get<std::string>());
      } else if (body["input"].is_array()) {
        for (const json& item : body["input"]) inputs.push_back(item.get<std::string>());
      }
    }
    if (inputs.empty()) {
      res.status = 400;
      res.set_content("{\"error\":\"no input\"}", "application/json");
      return;
    }
    json data = json::array();
    {
      std::lock_guard lock(mutex);
      for (size_t i = 0; i < inputs.size(); ++i) {
        auto it = embeddings.find(inputs[i]);
        std::vector<double> vec =
            it != embeddings.end() ? it->second : derived_embedding(inputs[i]);
        data.push_back({{"object", "embedding"},
                        {"index", static_cast<int>(i)},
                        {"embedding", vec}});
      }
    }
    json reply = {{"object", "list"}, {"data", data}};
    res.set_content(reply.dump(), "application/json");
  }
};

MockLlmServer::MockLlmServer() : impl_(std::make_unique<Impl>()) {
  impl_->server.Post("/v1/chat/completions",
                     [this](const httplib::Request& req, httplib::Response& res) {
                       impl_->handle_chat(req, res);
                     });
  impl_->server.Post("/v1/embeddings",
                     [this](const httplib::Request& req, httplib::Response& res) {
                       impl_->handle_embed(req, res);
                     });
}

MockLlmServer::~MockLlmServer() { stop(); }

void MockLlmServer::start() {
  if (impl_->running) return;
  impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  if (impl_->port <= 0) throw GatewayError("mock server could not bind a port");
  impl_->runner = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  impl_->running = true;
}

void MockLlmServer::stop() {
  if (!impl_->running) return;
  impl_->server.stop();
  if (impl_->runner.joinable()) impl_->runner.join();
  impl_->running = false;
}

std::string MockLlmServer::base_url() const {
  if (!impl_->running) throw GatewayError("mock server is not running");
  return "http://127.0.0.1:" + std::to_string(impl_->port);
}

void MockLlmServer::add_chat_rule(std::function<bool(const std::string&)> matches,
                                  std::string content) {
  std::lock_guard lock(impl_->mutex);
  impl_->rules.emplace_back(std::move(matches), std::move(content));
}

void MockLlmServer::add_chat_rule(std::vector<std::string> all_of, std::string content) {
  add_chat_rule(
      [needles = std::move(all_of)](const std::string& body) {
        for (const std::string& needle : needles) {
          if (body.find(needle) == std::string::npos) return false;
        }
        return true;
      },
      std::move(content));
}

void MockLlmServer::set_default_chat_reply(std::string content) {
  std::lock_guard lock(impl_->mutex);
  impl_->default_reply = std::move(content);
  impl_->has_default = true;
}

void MockLlmServer::inject_failures(int count, int status) {
  std::lock_guard lock(impl_->mutex);
  impl_->fail_count = count;
  impl_->fail_status = status;
}

void MockLlmServer::set_reply_delay_ms(int delay_ms) {
  std::lock_guard lock(impl_->mutex);
  impl_->delay_ms = delay_ms;
}

void MockLlmServer::set_embedding(const std::string& input_text, std::vector<double> vector) {
  std::lock_guard lock(impl_->mutex);
  impl_->embeddings[input_text] = std::move(vector);
}

int MockLlmServer::chat_request_count() const { return impl_->chat_requests.load(); }
int MockLlmServer::embed_request_count() const { return impl_->embed_requests.load(); }
int MockLlmServer::max_concurrent_observed() const { return impl_->max_in_flight.load(); }

std::vector<std::string> MockLlmServer::chat_bodies() const {
  std::lock_guard lock(impl_->mutex);
  return impl_->bodies;
}

}  // namespace ems
