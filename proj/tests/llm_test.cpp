#include <gtest/gtest.h>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "typegen/error.hpp"
#include "typegen/llm.hpp"

using namespace typegen;
using nlohmann::json;

namespace {

// Chat-completions stand-in on a loopback port. `handler` decides each reply.
class FakeEndpoint {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&, int call)>;

  explicit FakeEndpoint(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      int call = calls_++;
      {
        std::lock_guard<std::mutex> lock(mu_);
        bodies_.push_back(json::parse(req.body));
        auth_ = req.get_header_value("Authorization");
      }
      handler_(req, res, call);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int calls() const { return calls_; }
  json body(size_t i) {
    std::lock_guard<std::mutex> lock(mu_);
    return bodies_.at(i);
  }
  std::string auth() {
    std::lock_guard<std::mutex> lock(mu_);
    return auth_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> calls_{0};
  std::mutex mu_;
  std::vector<json> bodies_;
  std::string auth_;
};

std::string choices(int n, const std::string& text) {
  json arr = json::array();
  for (int i = 0; i < n; ++i) arr.push_back({{"index", i}, {"message", {{"role", "assistant"}, {"content", text + std::to_string(i)}}}});
  return json{{"choices", arr}}.dump();
}

BackendConfig config_for(const FakeEndpoint& ep) {
  BackendConfig c;
  c.kind = BackendKind::HttpChat;
  c.base_url = ep.base_url();
  c.model = "test-model";
  c.credential_env = "TYPEGEN_TEST_TOKEN";
  c.backoff = std::chrono::milliseconds(1);
  c.timeout = std::chrono::milliseconds(2000);
  c.max_retries = 3;
  return c;
}

CompletionRequest request(int n) {
  CompletionRequest r;
  r.prompt = "Python code:\nx = 1\nQ: ...\nA:";
  r.n_samples = n;
  return r;
}

struct TokenEnv {
  TokenEnv() { setenv("TYPEGEN_TEST_TOKEN", "secret", 1); }
  ~TokenEnv() { unsetenv("TYPEGEN_TEST_TOKEN"); }
};

}  // namespace

TEST(EstimateTokens, Bounds) {
  EXPECT_EQ(estimate_tokens(""), 0);
  EXPECT_GE(estimate_tokens("int int int"), 3);
  EXPECT_EQ(estimate_tokens("a b c d e f"), 6);
  EXPECT_EQ(estimate_tokens("abcdefgh"), 2);
  std::string text;
  long previous = 0;
  for (int i = 0; i < 500; ++i) {
    text += i % 7 == 0 ? "\n    " : "tok_" + std::to_string(i) + " ";
    long now = estimate_tokens(text);
    ASSERT_GE(now, previous);
    previous = now;
  }
}

TEST(EstimateTokens, WithinTwiceWordCountOnCode) {
  std::ifstream in(std::string(TYPEGEN_TEST_DATA) + "/settings_project/webapp/settings.py");
  std::string code((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::string prompt;
  while (prompt.size() < 4000) prompt += code;
  prompt.resize(4000);
  long words = 0;
  std::istringstream ss(prompt);
  for (std::string w; ss >> w;) ++words;
  long estimate = estimate_tokens(prompt);
  EXPECT_GE(estimate, words);
  EXPECT_LE(estimate, 2 * words);
}

TEST(MockBackend, CannedAndEcho) {
  MockBackend canned(MockMode::Canned, {{mock_key("a.py", "t1"), "1. The variable x is assigned from int. Therefore, the type of the variable x is `int`."}});
  auto req = request(3);
  req.key = mock_key("a.py", "t1");
  auto out = canned.complete(req);
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(out[0], out[2]);
  EXPECT_EQ(canned.complete(req), out);
  req.key = "missing";
  EXPECT_THROW(canned.complete(req), BackendError);

  MockBackend echo(MockMode::Echo, {{"k", "dict[str, int]"}});
  req.key = "k";
  req.n_samples = 2;
  auto echoed = echo.complete(req);
  ASSERT_EQ(echoed.size(), 2u);
  EXPECT_NE(echoed[0].find("`dict[str, int]`"), std::string::npos);
}

TEST(MockBackend, ReadsCannedFile) {
  auto path = std::filesystem::temp_directory_path() / "typegen-canned-test.jsonl";
  std::ofstream(path) << json{{"file", "m.py"}, {"target", "x1"}, {"text", "T `int`"}}.dump() << "\n\n";
  auto backend = MockBackend::canned_from_file(path.string());
  auto req = request(1);
  req.key = mock_key("m.py", "x1");
  EXPECT_EQ(backend.complete(req), std::vector<std::string>{"T `int`"});
  std::ofstream(path) << "{\"file\": 1}\n";
  EXPECT_THROW(MockBackend::canned_from_file(path.string()), InputError);
  std::filesystem::remove(path);
}

TEST(HttpChat, SendsChatRequestAndCollectsSamples) {
  TokenEnv env;
  FakeEndpoint ep([](const httplib::Request& req, httplib::Response& res, int) {
    int n = json::parse(req.body)["n"];
    res.set_content(choices(n, "s"), "application/json");
  });
  HttpChatBackend backend(config_for(ep));
  auto req = request(5);
  req.temperature = 1.0;
  req.max_new_tokens = 64;
  auto out = backend.complete(req);
  EXPECT_EQ(out.size(), 5u);
  auto body = ep.body(0);
  EXPECT_EQ(body["model"], "test-model");
  EXPECT_EQ(body["n"], 5);
  EXPECT_EQ(body["max_tokens"], 64);
  EXPECT_DOUBLE_EQ(body["temperature"].get<double>(), 1.0);
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], req.prompt);
  EXPECT_EQ(ep.auth(), "Bearer secret");
}

TEST(HttpChat, LoopsWhenEndpointIgnoresN) {
  TokenEnv env;
  FakeEndpoint ep([](const httplib::Request&, httplib::Response& res, int) {
    res.set_content(choices(1, "one"), "application/json");
  });
  HttpChatBackend backend(config_for(ep));
  EXPECT_EQ(backend.complete(request(4)).size(), 4u);
  EXPECT_EQ(ep.calls(), 4);
}

TEST(HttpChat, SplitsLargeSampleCounts) {
  TokenEnv env;
  FakeEndpoint ep([](const httplib::Request& req, httplib::Response& res, int) {
    int n = json::parse(req.body)["n"];
    res.set_content(choices(n, "s"), "application/json");
  });
  auto cfg = config_for(ep);
  cfg.max_batch = 20;
  HttpChatBackend backend(cfg);
  EXPECT_EQ(backend.complete(request(50)).size(), 50u);
  EXPECT_EQ(ep.calls(), 3);
  EXPECT_EQ(ep.body(2)["n"], 10);
}

TEST(HttpChat, RetriesTransientFailures) {
  TokenEnv env;
  FakeEndpoint ep([](const httplib::Request&, httplib::Response& res, int call) {
    if (call == 0) {
      res.status = 429;
    } else if (call == 1) {
      res.status = 503;
    } else {
      res.set_content(choices(2, "ok"), "application/json");
    }
  });
  HttpChatBackend backend(config_for(ep));
  auto out = backend.complete(request(2));
  EXPECT_EQ(out, (std::vector<std::string>{"ok0", "ok1"}));
  EXPECT_EQ(ep.calls(), 3);
}

TEST(HttpChat, ErrorKinds) {
  TokenEnv env;
  FakeEndpoint limited([](const httplib::Request&, httplib::Response& res, int) { res.status = 429; });
  EXPECT_THROW(HttpChatBackend(config_for(limited)).complete(request(1)), RateLimited);
  EXPECT_EQ(limited.calls(), 4);

  FakeEndpoint denied([](const httplib::Request&, httplib::Response& res, int) { res.status = 401; });
  EXPECT_THROW(HttpChatBackend(config_for(denied)).complete(request(1)), AuthError);
  EXPECT_EQ(denied.calls(), 1);

  FakeEndpoint garbled([](const httplib::Request&, httplib::Response& res, int) {
    res.set_content("{\"nope\": true}", "application/json");
  });
  EXPECT_THROW(HttpChatBackend(config_for(garbled)).complete(request(1)), MalformedResponse);

  FakeEndpoint slow([](const httplib::Request&, httplib::Response& res, int) {
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
    res.set_content(choices(1, "late"), "application/json");
  });
  auto cfg = config_for(slow);
  cfg.timeout = std::chrono::milliseconds(50);
  cfg.max_retries = 0;
  EXPECT_THROW(HttpChatBackend(cfg).complete(request(1)), Timeout);
}

TEST(HttpChat, MissingCredential) {
  FakeEndpoint ep([](const httplib::Request&, httplib::Response& res, int) {
    res.set_content(choices(1, "x"), "application/json");
  });
  unsetenv("TYPEGEN_TEST_TOKEN");
  EXPECT_THROW(HttpChatBackend(config_for(ep)).complete(request(1)), AuthError);
  EXPECT_EQ(ep.calls(), 0);
}

TEST(HttpChat, NetworkGuardBlocksRemoteHosts) {
  ASSERT_TRUE(network_disabled());
  TokenEnv env;
  BackendConfig c;
  c.kind = BackendKind::HttpChat;
  c.base_url = "https://api.example.com/v1";
  c.model = "m";
  c.credential_env = "TYPEGEN_TEST_TOKEN";
  EXPECT_THROW(HttpChatBackend(c).complete(request(1)), NetworkDisabled);
  EXPECT_TRUE(is_loopback_host("127.0.0.1"));
  EXPECT_TRUE(is_loopback_host("localhost"));
  EXPECT_FALSE(is_loopback_host("example.com"));
  c.base_url = "ftp://x";
  EXPECT_THROW(HttpChatBackend{c}, InputError);
}

TEST(HttpChat, BoundsRequestsInFlight) {
  TokenEnv env;
  std::atomic<int> active{0}, peak{0};
  FakeEndpoint ep([&](const httplib::Request&, httplib::Response& res, int) {
    int now = ++active;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(30));
    --active;
    res.set_content(choices(1, "x"), "application/json");
  });
  auto cfg = config_for(ep);
  cfg.max_in_flight = 2;
  HttpChatBackend backend(cfg);
  std::vector<std::thread> callers;
  for (int i = 0; i < 6; ++i) callers.emplace_back([&] { backend.complete(request(1)); });
  for (auto& t : callers) t.join();
  EXPECT_EQ(ep.calls(), 6);
  EXPECT_LE(peak.load(), 2);
}
