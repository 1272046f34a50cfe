#pragma once

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "narrative/error.hpp"

namespace narrative::llm {

using json = nlohmann::json;

struct Message {
  std::string role;  // "system", "user" or "assistant"
  std::string content;
  friend bool operator==(const Message&, const Message&) = default;
};

using Messages = std::vector<Message>;

/// Comprehension tasks decode greedily; generation samples.
enum class TaskKind { Comprehension, Generation };

inline constexpr double kComprehensionTemperature = 0.0;
inline constexpr double kGenerationTemperature = 1.0;

struct ProviderConfig {
  std::string name = "mock";
  /// "openai" (chat-completions schema over HTTP) or "mock" (transcript replay).
  std::string kind = "mock";
  std::string endpoint;
  std::string model = "mock";
  /// When set, overrides the per-task default temperature.
  std::optional<double> temperature;
  int max_tokens = 1024;
  double timeout_seconds = 60.0;
  int max_retries = 2;
  double rate_limit_rpm = 60.0;
  /// Base delay for exponential backoff between retries.
  int retry_backoff_ms = 500;
  /// Environment variable holding the bearer token.
  std::string api_key_env = "NARRATIVE_API_KEY";
  /// Transcript file for the mock provider.
  std::string transcript;

  double temperature_for(TaskKind task) const;

  /// Throws InputError on invalid values.
  void validate() const;

  /// Serialisable view without secrets.
  json to_json() const;
  static ProviderConfig from_json(const std::string& name, const json& j);
};

/// Reads `{"providers": {"<name>": {...}}}` and returns the named block.
ProviderConfig load_provider_config(const std::string& path, const std::string& name);

struct ChatExchange {
  Messages request;
  std::string response;
  json usage = json::object();
  std::string cache_key;
  bool from_cache = false;
};

/// Digest of (model id, temperature, messages). Stable across runs and platforms.
std::string cache_key(const std::string& model, double temperature, const Messages& messages);

json to_json(const Messages& messages);
json to_json(const ChatExchange& exchange);

/// Transport failure or an error status from the provider. `status()` is 0
/// for transport-level failures.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, int status = 0) : Error(what), status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

}  // namespace narrative::llm
