#include "narrative/llm/client.hpp"

#include <fstream>
#include <thread>

namespace narrative::llm {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// ResponseCache

ResponseCache::ResponseCache(fs::path dir) : dir_(std::move(dir)) {
  fs::create_directories(*dir_);
}

std::optional<ChatExchange> ResponseCache::get(const std::string& key) {
  std::lock_guard lock(mu_);
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  if (!dir_) return std::nullopt;
  std::ifstream in(*dir_ / (key + ".json"));
  if (!in) return std::nullopt;
  try {
    const json j = json::parse(in);
    ChatExchange ex;
    ex.cache_key = key;
    ex.response = j.at("response").get<std::string>();
    ex.usage = j.value("usage", json::object());
    for (const auto& m : j.at("request"))
      ex.request.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
    entries_.emplace(key, ex);
    return ex;
  } catch (const json::exception&) {
    // Corrupt entry; treat as a miss and let the next put overwrite it.
    return std::nullopt;
  }
}

void ResponseCache::put(const ChatExchange& exchange) {
  std::lock_guard lock(mu_);
  entries_[exchange.cache_key] = exchange;
  if (!dir_) return;
  const fs::path target = *dir_ / (exchange.cache_key + ".json");
  const fs::path tmp = target.string() + ".tmp" +
                       std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp);
    out << to_json(exchange).dump(2) << '\n';
  }
  fs::rename(tmp, target);
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

// ---------------------------------------------------------------------------
// MockProvider

MockProvider::MockProvider(std::map<std::string, std::string> transcript)
    : transcript_(std::move(transcript)) {}

std::shared_ptr<MockProvider> MockProvider::from_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open transcript " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("transcript " + path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw ParseError("transcript " + path.string() + ": expected a JSON array");
  std::map<std::string, std::string> entries;
  for (const auto& e : j) {
    if (!e.contains("key") || !e.contains("response"))
      throw ParseError("transcript entry missing key/response");
    entries[e["key"].get<std::string>()] = e["response"].get<std::string>();
  }
  return std::make_shared<MockProvider>(std::move(entries));
}

void MockProvider::add(const std::string& key, const std::string& response) {
  std::lock_guard lock(mu_);
  transcript_[key] = response;
}

ProviderReply MockProvider::send(const ProviderRequest& request) {
  std::lock_guard lock(mu_);
  auto it = transcript_.find(request.cache_key);
  if (it == transcript_.end()) {
    missing_.push_back(request.cache_key);
    return {404, "no transcript entry for key " + request.cache_key, json::object()};
  }
  return {200, it->second, {{"provider", "mock"}}};
}

std::vector<std::string> MockProvider::missing_keys() const {
  std::lock_guard lock(mu_);
  return missing_;
}

void write_transcript(const fs::path& path, const std::map<std::string, std::string>& transcript) {
  json arr = json::array();
  for (const auto& [key, response] : transcript) arr.push_back({{"key", key}, {"response", response}});
  std::ofstream out(path);
  if (!out) throw InputError("cannot write transcript " + path.string());
  out << arr.dump(2) << '\n';
}

std::shared_ptr<Provider> make_provider(const ProviderConfig& config) {
  config.validate();
  if (config.kind == "openai") return std::make_shared<HttpProvider>();
  if (config.transcript.empty()) return std::make_shared<MockProvider>();
  return MockProvider::from_file(config.transcript);
}

// ---------------------------------------------------------------------------
// RateLimiter

RateLimiter::RateLimiter(double requests_per_minute)
    : interval_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(60.0 / requests_per_minute))) {}

void RateLimiter::acquire() {
  std::chrono::steady_clock::time_point slot;
  {
    std::lock_guard lock(mu_);
    const auto now = std::chrono::steady_clock::now();
    slot = std::max(now, next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

// ---------------------------------------------------------------------------
// ChatClient

namespace {

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

ChatClient::ChatClient(ProviderConfig config, std::shared_ptr<Provider> provider,
                       std::shared_ptr<ResponseCache> cache)
    : config_(std::move(config)),
      provider_(std::move(provider)),
      cache_(std::move(cache)),
      limiter_(config_.rate_limit_rpm) {
  config_.validate();
}

ChatExchange ChatClient::complete(const Messages& messages, TaskKind task) {
  const double temperature = config_.temperature_for(task);
  const std::string key = cache_key(config_.model, temperature, messages);
  if (auto hit = cache_->get(key)) {
    ++cache_hits_;
    hit->from_cache = true;
    return *hit;
  }

  const ProviderRequest request{config_, messages, temperature, key};
  std::string last_error;
  int last_status = 0;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0 && config_.retry_backoff_ms > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(config_.retry_backoff_ms << (attempt - 1)));
    }
    if (provider_->remote()) limiter_.acquire();
    ++provider_calls_;
    ProviderReply reply;
    try {
      reply = provider_->send(request);
    } catch (const ProviderError& e) {
      last_error = e.what();
      last_status = e.status();
      if (e.status() != 0 && !retryable(e.status())) throw;
      continue;
    }
    if (reply.status >= 200 && reply.status < 300) {
      ChatExchange ex{messages, std::move(reply.text), std::move(reply.usage), key, false};
      cache_->put(ex);
      return ex;
    }
    last_error = reply.text;
    last_status = reply.status;
    if (!retryable(reply.status)) break;
  }
  throw ProviderError("provider '" + config_.name + "' failed (status " +
                          std::to_string(last_status) + "): " + last_error,
                      last_status);
}

ClientStats ChatClient::stats() const { return {provider_calls_.load(), cache_hits_.load()}; }

}  // namespace narrative::llm
