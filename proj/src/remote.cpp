#include "vlbridge/remote.hpp"

#include <thread>

#include <httplib.h>

#include "vlbridge/error.hpp"

namespace vlb {

nlohmann::json post_json(const std::string& endpoint, const std::string& path, const nlohmann::json& body,
                         int timeout_ms, const RetryPolicy& policy) {
  const std::string payload = body.dump();
  std::string last_error;
  auto backoff = policy.initial_backoff;
  for (int attempt = 1; attempt <= policy.attempts; ++attempt) {
    httplib::Client client(endpoint);
    const auto timeout = std::chrono::milliseconds(timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(path, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status != 200) {
      last_error = "HTTP status " + std::to_string(res->status);
    } else {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error& e) {
        last_error = std::string("unparsable response: ") + e.what();
      }
    }
    if (attempt < policy.attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  fail(ErrorCode::kRemote, "POST " + endpoint + path + " failed after " + std::to_string(policy.attempts) +
                               " attempts: " + last_error);
}

}  // namespace vlb
