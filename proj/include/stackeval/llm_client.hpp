#pragma once

#include <cstddef>
#include <optional>
#include <string>

namespace stackeval {

inline constexpr const char* kApiKeyVariable = "STACKEVAL_API_KEY";

struct LiveEndpoint {
  std::string url;  // base URL, e.g. http://localhost:8080/v1
  std::string model;
  double temperature = 0.6;
  int timeout_seconds = 60;
};

// Process-wide switch; when off every query fails with NetworkError before
// opening a socket.
void set_network_enabled(bool enabled);
bool network_enabled();
// Connections attempted since start.
std::size_t network_attempts();

// POSTs a single-message chat completion to <url>/chat/completions.
// Throws AuthError (no key, or 401/403), NetworkError or MalformedResponse.
std::string query_llm(const LiveEndpoint& endpoint, const std::string& prompt,
                      const std::optional<std::string>& api_key);

}  // namespace stackeval
