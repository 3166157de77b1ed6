#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <climits>
#include <cstdlib>
#include <regex>
#include <semaphore>
#include <thread>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "typegen/error.hpp"
#include "typegen/llm.hpp"

namespace typegen {

namespace {

struct Endpoint {
  std::string scheme_host_port;  // what httplib::Client wants
  std::string host;
  std::string path;              // ".../chat/completions"
};

Endpoint parse_base_url(const std::string& base_url) {
  static const std::regex re(R"(^(https?)://(\[[^\]]+\]|[^/:]+)(:\d+)?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(base_url, m, re)) {
    throw InputError("invalid base URL '" + base_url + "'");
  }
  Endpoint e;
  e.host = m[2].str();
  e.scheme_host_port = m[1].str() + "://" + e.host + m[3].str();
  std::string prefix = m[4].matched ? m[4].str() : "";
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  e.path = prefix + "/chat/completions";
  return e;
}

enum class Outcome { Ok, Retry, Fail };

}  // namespace

struct HttpChatBackend::Impl {
  BackendConfig config;
  Endpoint endpoint;
  std::counting_semaphore<INT_MAX> slots;

  explicit Impl(BackendConfig c)
      : config(std::move(c)), endpoint(parse_base_url(config.base_url)),
        slots(std::max(1, config.max_in_flight)) {}

  std::string token() const {
    const char* v = std::getenv(config.credential_env.c_str());
    if (v == nullptr || *v == '\0') {
      throw AuthError("environment variable " + config.credential_env + " is not set");
    }
    return v;
  }

  // One logical request for `n` samples, retried on transient failures.
  std::vector<std::string> request(const CompletionRequest& req, int n) {
    nlohmann::json body = {
        {"model", config.model},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", req.prompt}}})},
        {"n", n},
        {"temperature", req.temperature},
        {"max_tokens", req.max_new_tokens}};
    const std::string payload = body.dump();
    httplib::Headers headers = {{"Authorization", "Bearer " + token()}};

    auto delay = config.backoff;
    for (int attempt = 0;; ++attempt) {
      bool last = attempt >= config.max_retries;
      httplib::Result res = [&] {
        slots.acquire();
        httplib::Client client(endpoint.scheme_host_port);
        auto seconds = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
        auto micros = std::chrono::duration_cast<std::chrono::microseconds>(config.timeout - seconds);
        client.set_connection_timeout(seconds.count(), micros.count());
        client.set_read_timeout(seconds.count(), micros.count());
        client.set_write_timeout(seconds.count(), micros.count());
        auto r = client.Post(endpoint.path, headers, payload, "application/json");
        slots.release();
        return r;
      }();

      if (!res) {
        auto err = res.error();
        bool timed_out = err == httplib::Error::Read || err == httplib::Error::Write ||
                         err == httplib::Error::ConnectionTimeout;
        std::string what = httplib::to_string(err);
        if (last) {
          if (timed_out) throw Timeout("request to " + config.base_url + " timed out: " + what);
          throw BackendError("request to " + config.base_url + " failed: " + what);
        }
        spdlog::warn("completion request failed ({}), retrying in {} ms", what, delay.count());
      } else if (res->status == 401 || res->status == 403) {
        throw AuthError("endpoint rejected the credentials (HTTP " + std::to_string(res->status) + ")");
      } else if (res->status == 429 || res->status >= 500) {
        if (last) {
          if (res->status == 429) throw RateLimited("rate limited after " + std::to_string(attempt + 1) + " attempts");
          throw BackendError("server error HTTP " + std::to_string(res->status));
        }
        spdlog::warn("completion request got HTTP {}, retrying in {} ms", res->status, delay.count());
      } else if (res->status != 200) {
        throw BackendError("unexpected HTTP " + std::to_string(res->status) + ": " + res->body);
      } else {
        return parse_choices(res->body);
      }
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
  }

  static std::vector<std::string> parse_choices(const std::string& body) {
    try {
      auto j = nlohmann::json::parse(body);
      std::vector<std::string> out;
      for (const auto& choice : j.at("choices")) {
        if (choice.contains("message")) {
          out.push_back(choice.at("message").at("content").get<std::string>());
        } else {
          out.push_back(choice.at("text").get<std::string>());
        }
      }
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw MalformedResponse(std::string("unexpected completion response: ") + e.what());
    }
  }
};

HttpChatBackend::HttpChatBackend(BackendConfig config) {
  if (config.base_url.empty() || config.model.empty()) {
    throw InputError("the HTTP backend needs a base URL and a model name");
  }
  impl_ = std::make_unique<Impl>(std::move(config));
}

HttpChatBackend::~HttpChatBackend() = default;

std::vector<std::string> HttpChatBackend::complete(const CompletionRequest& req) {
  if (req.n_samples < 1) throw BackendError("n_samples must be at least 1");
  if (network_disabled() && !is_loopback_host(impl_->endpoint.host)) {
    throw NetworkDisabled("network access is disabled (TYPEGEN_NO_NETWORK); refusing to contact " +
                          impl_->endpoint.host);
  }
  std::vector<std::string> out;
  int batch = std::max(1, impl_->config.max_batch);
  // Endpoints that ignore `n` return one choice; keep asking for the rest.
  while (static_cast<int>(out.size()) < req.n_samples) {
    int want = std::min(batch, req.n_samples - static_cast<int>(out.size()));
    auto got = impl_->request(req, want);
    if (got.empty()) throw MalformedResponse("completion response had no choices");
    for (auto& g : got) {
      if (static_cast<int>(out.size()) == req.n_samples) break;
      out.push_back(std::move(g));
    }
  }
  return out;
}

}  // namespace typegen
