#pragma once

#include <atomic>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <string>

#include "narrative/bench.hpp"
#include "narrative/corpus.hpp"
#include "narrative/llm/client.hpp"
#include "narrative/llm/parsers.hpp"
#include "narrative/llm/prompts.hpp"

namespace narrative::testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(NARRATIVE_FIXTURES) / name;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("narrative-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

/// Provider that answers from a queue of scripted replies, or from a
/// function of the request when the queue is empty.
class ScriptedProvider : public llm::Provider {
 public:
  using Responder = std::function<llm::ProviderReply(const llm::ProviderRequest&)>;

  explicit ScriptedProvider(Responder fallback = nullptr, bool remote = false)
      : fallback_(std::move(fallback)), remote_(remote) {}

  void push(int status, std::string text) {
    std::lock_guard lock(mu_);
    queue_.push_back({status, std::move(text), llm::json::object()});
  }

  llm::ProviderReply send(const llm::ProviderRequest& request) override {
    ++calls_;
    {
      std::lock_guard lock(mu_);
      last_messages_ = request.messages;
      last_temperature_ = request.temperature;
      if (!queue_.empty()) {
        auto r = queue_.front();
        queue_.pop_front();
        if (r.status < 0) throw llm::ProviderError("scripted transport failure", 0);
        return r;
      }
    }
    if (fallback_) return fallback_(request);
    return {500, "no scripted reply", llm::json::object()};
  }

  bool remote() const override { return remote_; }
  int calls() const { return calls_; }
  llm::Messages last_messages() const {
    std::lock_guard lock(mu_);
    return last_messages_;
  }
  double last_temperature() const {
    std::lock_guard lock(mu_);
    return last_temperature_;
  }

 private:
  mutable std::mutex mu_;
  std::deque<llm::ProviderReply> queue_;
  Responder fallback_;
  bool remote_;
  std::atomic<int> calls_{0};
  llm::Messages last_messages_;
  double last_temperature_ = -1;
};

inline llm::ProviderConfig fast_config() {
  llm::ProviderConfig c;
  c.retry_backoff_ms = 1;
  c.max_retries = 2;
  c.rate_limit_rpm = 600000;
  return c;
}

inline std::shared_ptr<llm::ChatClient> client_for(std::shared_ptr<llm::Provider> provider,
                                                   llm::ProviderConfig config = fast_config()) {
  return std::make_shared<llm::ChatClient>(config, std::move(provider));
}

/// Replay transcript answering every benchmark prompt with the gold label,
/// TP positions shifted by `tp_offset`.
inline std::map<std::string, std::string> gold_transcript(const corpus::CorpusStore& store,
                                                          const bench::GoldMap& gold, int tp_offset,
                                                          const llm::ProviderConfig& config = {}) {
  std::map<std::string, std::string> t;
  const double temp = config.temperature_for(llm::TaskKind::Comprehension);
  const auto key = [&](const llm::Messages& m) { return llm::cache_key(config.model, temp, m); };
  for (const auto& [id, g] : gold) {
    const auto sentences = store.at(id).texts();
    if (g.arc) {
      const std::string arc_answer = "{\"arc\": \"" + std::string(discourse::arc_key(*g.arc)) + "\"}";
      t[key(llm::arc_identify_prompt(sentences))] = arc_answer;
      t[key(llm::arc_identify_with_tps_prompt(sentences, g.tps))] = arc_answer;
    }
    auto shifted = g.tps;
    for (auto tp : discourse::kAllTurningPoints) shifted[tp] += tp_offset;
    const std::string tp_answer = llm::format_tps(shifted);
    t[key(llm::tp_identify_prompt(sentences))] = tp_answer;
    if (g.arc) t[key(llm::tp_identify_with_arc_prompt(sentences, *g.arc))] = tp_answer;
  }
  return t;
}

}  // namespace narrative::testing
