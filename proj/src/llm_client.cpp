#include "stackeval/llm_client.hpp"

#include <atomic>
#include <regex>

#include "httplib.h"
#include "json.hpp"
#include "stackeval/error.hpp"

namespace stackeval {

namespace {

std::atomic<bool> g_network{true};
std::atomic<std::size_t> g_attempts{0};

struct Url {
  std::string scheme_host_port;
  std::string path;
  bool https = false;
};

Url split_url(const std::string& url) {
  static const std::regex re(R"(^(https?)://([^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw Error(ErrorCode::InvalidArgument, "bad endpoint url '" + url + "'");
  Url u;
  u.https = m[1] == "https";
  u.scheme_host_port = m[1].str() + "://" + m[2].str();
  u.path = m[3].matched ? m[3].str() : "";
  while (!u.path.empty() && u.path.back() == '/') u.path.pop_back();
  return u;
}

}  // namespace

void set_network_enabled(bool enabled) { g_network = enabled; }
bool network_enabled() { return g_network; }
std::size_t network_attempts() { return g_attempts; }

std::string query_llm(const LiveEndpoint& endpoint, const std::string& prompt,
                      const std::optional<std::string>& api_key) {
  if (!api_key || api_key->empty()) {
    throw Error(ErrorCode::AuthError, std::string(kApiKeyVariable) + " is not set");
  }
  const Url url = split_url(endpoint.url);
  if (!g_network) throw Error(ErrorCode::NetworkError, "network access is disabled");
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (url.https) throw Error(ErrorCode::NetworkError, "built without TLS; use an http endpoint");
#endif

  const nlohmann::json body = {
      {"model", endpoint.model},
      {"temperature", endpoint.temperature},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
  };
  httplib::Client client(url.scheme_host_port);
  client.set_connection_timeout(endpoint.timeout_seconds, 0);
  client.set_read_timeout(endpoint.timeout_seconds, 0);
  client.set_bearer_token_auth(*api_key);
  ++g_attempts;
  auto res = client.Post(url.path + "/chat/completions", body.dump(), "application/json");
  if (!res) throw Error(ErrorCode::NetworkError, "request failed: " + httplib::to_string(res.error()));
  if (res->status == 401 || res->status == 403) {
    throw Error(ErrorCode::AuthError, "endpoint rejected credentials (" + std::to_string(res->status) + ")");
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::NetworkError, "endpoint returned status " + std::to_string(res->status));
  }
  if (res->body.empty()) throw Error(ErrorCode::MalformedResponse, "empty response body");

  try {
    const auto j = nlohmann::json::parse(res->body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string() || content.get<std::string>().empty()) {
      throw Error(ErrorCode::MalformedResponse, "completion has no text");
    }
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedResponse, std::string("unexpected response: ") + e.what());
  }
}

}  // namespace stackeval
