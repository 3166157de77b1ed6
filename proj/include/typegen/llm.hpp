#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace typegen {

struct CompletionRequest {
  std::string prompt;
  int n_samples = 1;
  double temperature = 1.0;
  int max_new_tokens = 256;
  std::string model;
  /// Identifies the target for the mock backend ("file::target-id"); remote
  /// backends ignore it.
  std::string key;
};

enum class BackendKind { HttpChat, Mock };
enum class MockMode { Canned, Echo };

struct BackendConfig {
  BackendKind kind = BackendKind::Mock;
  std::string base_url;
  std::string model;
  /// Name of the environment variable holding the bearer token.
  std::string credential_env = "TYPEGEN_API_KEY";
  std::chrono::milliseconds timeout{60000};
  int max_retries = 4;
  std::chrono::milliseconds backoff{500};  // first retry delay, doubled each time
  int max_in_flight = 4;
  /// Largest `n` sent in one request; bigger sample counts are split.
  int max_batch = 50;
};

/// Token count for budget checks: one token per four bytes, but never below
/// the whitespace-separated word count nor above twice that count.
long estimate_tokens(std::string_view text);

/// Key used to look up mock generations for a target.
std::string mock_key(std::string_view file, std::string_view target_id);

class CompletionBackend {
 public:
  virtual ~CompletionBackend() = default;
  /// Exactly req.n_samples generations. Throws a BackendError subclass.
  virtual std::vector<std::string> complete(const CompletionRequest& req) = 0;
};

/// Deterministic backend for offline runs. Canned mode returns the text
/// stored for the request key; echo mode answers with a conclusion quoting
/// the stored ground-truth type.
class MockBackend : public CompletionBackend {
 public:
  MockBackend(MockMode mode, std::map<std::string, std::string> entries);

  /// Reads JSON lines {"file", "target", "text"}.
  static MockBackend canned_from_file(const std::string& path);

  std::vector<std::string> complete(const CompletionRequest& req) override;
  MockMode mode() const { return mode_; }

 private:
  MockMode mode_;
  std::map<std::string, std::string> entries_;
};

/// OpenAI-compatible chat-completions client. Safe to share between threads;
/// at most `max_in_flight` requests are outstanding at once.
class HttpChatBackend : public CompletionBackend {
 public:
  explicit HttpChatBackend(BackendConfig config);
  ~HttpChatBackend() override;

  std::vector<std::string> complete(const CompletionRequest& req) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// True when TYPEGEN_NO_NETWORK is set to a non-empty value other than "0";
/// only loopback hosts may then be contacted.
bool network_disabled();
bool is_loopback_host(std::string_view host);

}  // namespace typegen
