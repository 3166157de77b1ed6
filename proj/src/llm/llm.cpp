#include "typegen/llm.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "typegen/error.hpp"

namespace typegen {

long estimate_tokens(std::string_view text) {
  long words = 0;
  bool in_word = false;
  for (char c : text) {
    bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
    if (!space && !in_word) ++words;
    in_word = !space;
  }
  long by_bytes = static_cast<long>((text.size() + 3) / 4);
  return std::max(words, std::min(by_bytes, 2 * words));
}

std::string mock_key(std::string_view file, std::string_view target_id) {
  return std::string(file) + "::" + std::string(target_id);
}

bool network_disabled() {
  const char* v = std::getenv("TYPEGEN_NO_NETWORK");
  return v != nullptr && *v != '\0' && std::string_view(v) != "0";
}

bool is_loopback_host(std::string_view host) {
  return host == "localhost" || host == "::1" || host == "[::1]" ||
         host.rfind("127.", 0) == 0;
}

MockBackend::MockBackend(MockMode mode, std::map<std::string, std::string> entries)
    : mode_(mode), entries_(std::move(entries)) {}

MockBackend MockBackend::canned_from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::map<std::string, std::string> entries;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      entries[mock_key(j.at("file").get<std::string>(), j.at("target").get<std::string>())] =
          j.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return MockBackend(MockMode::Canned, std::move(entries));
}

std::vector<std::string> MockBackend::complete(const CompletionRequest& req) {
  if (req.n_samples < 1) throw BackendError("n_samples must be at least 1");
  auto it = entries_.find(req.key);
  if (it == entries_.end()) throw BackendError("mock backend has no entry for " + req.key);
  std::string text = it->second;
  if (mode_ == MockMode::Echo) {
    text = "Therefore, the type of the target is `" + it->second + "`.";
  }
  return std::vector<std::string>(static_cast<size_t>(req.n_samples), text);
}

}  // namespace typegen
