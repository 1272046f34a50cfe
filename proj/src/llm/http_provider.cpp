#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>

#include "narrative/llm/client.hpp"

namespace narrative::llm {

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

Endpoint split_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw InputError("endpoint must be an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

ProviderReply HttpProvider::send(const ProviderRequest& request) {
  const auto& cfg = request.config;
  const Endpoint ep = split_endpoint(cfg.endpoint);

  httplib::Client http(ep.origin);
  const auto timeout_s = static_cast<time_t>(cfg.timeout_seconds);
  http.set_connection_timeout(timeout_s, 0);
  http.set_read_timeout(timeout_s, 0);
  http.set_write_timeout(timeout_s, 0);

  httplib::Headers headers;
  if (const char* token = std::getenv(cfg.api_key_env.c_str()); token && *token)
    headers.emplace("Authorization", std::string("Bearer ") + token);

  const json body = {{"model", cfg.model},
                     {"messages", to_json(request.messages)},
                     {"temperature", request.temperature},
                     {"max_tokens", cfg.max_tokens}};

  auto res = http.Post(ep.path, headers, body.dump(), "application/json");
  if (!res) throw ProviderError("transport error: " + httplib::to_string(res.error()));
  if (res->status < 200 || res->status >= 300) return {res->status, res->body, json::object()};

  try {
    const json reply = json::parse(res->body);
    ProviderReply out;
    out.status = res->status;
    out.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    out.usage = reply.value("usage", json::object());
    return out;
  } catch (const json::exception& e) {
    throw ProviderError(std::string("malformed completion body: ") + e.what(), res->status);
  }
}

}  // namespace narrative::llm
