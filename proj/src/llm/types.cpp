#include "narrative/llm/types.hpp"

#include <fstream>

#include "narrative/text.hpp"

namespace narrative::llm {

double ProviderConfig::temperature_for(TaskKind task) const {
  if (temperature) return *temperature;
  return task == TaskKind::Generation ? kGenerationTemperature : kComprehensionTemperature;
}

void ProviderConfig::validate() const {
  if (kind != "openai" && kind != "mock")
    throw InputError("provider '" + name + "': unknown kind '" + kind + "'");
  if (temperature && *temperature < 0) throw InputError("provider '" + name + "': temperature < 0");
  if (max_retries < 0) throw InputError("provider '" + name + "': max_retries < 0");
  if (!(rate_limit_rpm > 0)) throw InputError("provider '" + name + "': rate limit must be > 0");
  if (max_tokens <= 0) throw InputError("provider '" + name + "': max_tokens must be > 0");
  if (!(timeout_seconds > 0)) throw InputError("provider '" + name + "': timeout must be > 0");
  if (kind == "openai" && endpoint.empty())
    throw InputError("provider '" + name + "': endpoint required");
}

json ProviderConfig::to_json() const {
  json j = {{"kind", kind},
            {"endpoint", endpoint},
            {"model", model},
            {"max_tokens", max_tokens},
            {"timeout_seconds", timeout_seconds},
            {"max_retries", max_retries},
            {"rate_limit_rpm", rate_limit_rpm},
            {"retry_backoff_ms", retry_backoff_ms},
            {"api_key_env", api_key_env},
            {"transcript", transcript}};
  j["temperature"] = temperature ? json(*temperature) : json(nullptr);
  return j;
}

ProviderConfig ProviderConfig::from_json(const std::string& name, const json& j) {
  ProviderConfig c;
  c.name = name;
  c.kind = j.value("kind", c.kind);
  c.endpoint = j.value("endpoint", c.endpoint);
  c.model = j.value("model", c.model);
  if (j.contains("temperature") && !j["temperature"].is_null())
    c.temperature = j["temperature"].get<double>();
  c.max_tokens = j.value("max_tokens", c.max_tokens);
  c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.rate_limit_rpm = j.value("rate_limit_rpm", c.rate_limit_rpm);
  c.retry_backoff_ms = j.value("retry_backoff_ms", c.retry_backoff_ms);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.transcript = j.value("transcript", c.transcript);
  c.validate();
  return c;
}

ProviderConfig load_provider_config(const std::string& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("config " + path + ": " + e.what());
  }
  if (!j.contains("providers") || !j["providers"].contains(name))
    throw InputError("config " + path + " has no provider '" + name + "'");
  return ProviderConfig::from_json(name, j["providers"][name]);
}

json to_json(const Messages& messages) {
  json arr = json::array();
  for (const auto& m : messages) arr.push_back({{"role", m.role}, {"content", m.content}});
  return arr;
}

std::string cache_key(const std::string& model, double temperature, const Messages& messages) {
  const json payload = {model, text::fixed(temperature, 6), to_json(messages)};
  return text::sha256_hex(payload.dump());
}

json to_json(const ChatExchange& exchange) {
  return {{"key", exchange.cache_key},
          {"request", to_json(exchange.request)},
          {"response", exchange.response},
          {"usage", exchange.usage}};
}

}  // namespace narrative::llm
