#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "narrative/llm/types.hpp"

namespace narrative::llm {

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

/// Content-addressed response store. Always keeps an in-memory map; when a
/// directory is given, every entry is also persisted as `<key>.json`.
/// Safe for concurrent use.
class ResponseCache {
 public:
  ResponseCache() = default;
  explicit ResponseCache(std::filesystem::path dir);

  std::optional<ChatExchange> get(const std::string& key);
  void put(const ChatExchange& exchange);
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::optional<std::filesystem::path> dir_;
  std::unordered_map<std::string, ChatExchange> entries_;
};

// ---------------------------------------------------------------------------
// Providers
// ---------------------------------------------------------------------------

struct ProviderRequest {
  const ProviderConfig& config;
  const Messages& messages;
  double temperature;
  const std::string& cache_key;
};

struct ProviderReply {
  int status = 200;
  std::string text;  // completion text on success, error body otherwise
  json usage = json::object();
};

class Provider {
 public:
  virtual ~Provider() = default;
  /// Throws ProviderError(status 0) on transport failure.
  virtual ProviderReply send(const ProviderRequest& request) = 0;
  /// Remote providers go through the rate limiter.
  virtual bool remote() const { return false; }
};

/// Chat-completions over HTTP(S): POSTs {model, messages, temperature,
/// max_tokens} with a bearer token read from `config.api_key_env`.
class HttpProvider : public Provider {
 public:
  ProviderReply send(const ProviderRequest& request) override;
  bool remote() const override { return true; }
};

/// Replays responses keyed by cache key. Unknown keys answer 404 so the
/// item is recorded as a provider failure rather than silently invented.
class MockProvider : public Provider {
 public:
  MockProvider() = default;
  explicit MockProvider(std::map<std::string, std::string> transcript);

  /// Reads a JSON array of {"key": ..., "response": ...}.
  static std::shared_ptr<MockProvider> from_file(const std::filesystem::path& path);

  void add(const std::string& key, const std::string& response);
  ProviderReply send(const ProviderRequest& request) override;

  /// Keys requested but absent from the transcript, in request order.
  std::vector<std::string> missing_keys() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::string> transcript_;
  std::vector<std::string> missing_;
};

/// Writes a transcript file in the format MockProvider::from_file reads.
void write_transcript(const std::filesystem::path& path,
                      const std::map<std::string, std::string>& transcript);

/// Builds the provider named by `config.kind`.
std::shared_ptr<Provider> make_provider(const ProviderConfig& config);

// ---------------------------------------------------------------------------
// Client
// ---------------------------------------------------------------------------

/// Spaces requests at least 60/rpm seconds apart.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_minute);
  void acquire();

 private:
  std::mutex mu_;
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_{};
};

struct ClientStats {
  std::size_t provider_calls = 0;
  std::size_t cache_hits = 0;
};

class ChatClient {
 public:
  ChatClient(ProviderConfig config, std::shared_ptr<Provider> provider,
             std::shared_ptr<ResponseCache> cache = std::make_shared<ResponseCache>());

  /// Serves from cache on a key hit; otherwise calls the provider with up to
  /// `max_retries` retries on transport errors, 429 and 5xx. Successful
  /// responses are cached. Throws ProviderError when retries run out or on a
  /// non-retryable status.
  ChatExchange complete(const Messages& messages, TaskKind task = TaskKind::Comprehension);

  const ProviderConfig& config() const { return config_; }
  ClientStats stats() const;

 private:
  ProviderConfig config_;
  std::shared_ptr<Provider> provider_;
  std::shared_ptr<ResponseCache> cache_;
  RateLimiter limiter_;
  std::atomic<std::size_t> provider_calls_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

// ---------------------------------------------------------------------------
// Structured completion with repair
// ---------------------------------------------------------------------------

inline constexpr const char* kRepairInstruction = "Respond with only the JSON object.";

template <class T>
struct StructuredResult {
  std::optional<T> value;
  std::vector<ChatExchange> exchanges;
  /// Last parse error when `value` is empty.
  std::string error;
};

/// Runs `messages`, parses with `parse`; on ParseError sends up to `repairs`
/// follow-ups (previous answer + kRepairInstruction). Provider errors propagate.
template <class T>
StructuredResult<T> complete_structured(ChatClient& client, Messages messages,
                                        const std::function<T(const std::string&)>& parse,
                                        TaskKind task = TaskKind::Comprehension,
                                        int repairs = 1) {
  StructuredResult<T> result;
  for (int attempt = 0; attempt <= repairs; ++attempt) {
    ChatExchange ex = client.complete(messages, task);
    result.exchanges.push_back(ex);
    try {
      result.value = parse(ex.response);
      result.error.clear();
      return result;
    } catch (const ParseError& e) {
      result.error = e.what();
    }
    messages.push_back({"assistant", ex.response});
    messages.push_back({"user", kRepairInstruction});
  }
  return result;
}

}  // namespace narrative::llm
