#pragma once

#include <chrono>
#include <string>

#include <json.hpp>

namespace vlb {

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{100};
};

/// POSTs a JSON body to `endpoint` + `path` and returns the parsed response.
/// Transport errors, non-200 statuses and unparsable bodies are retried with
/// exponential backoff; the final error reports the attempt count.
nlohmann::json post_json(const std::string& endpoint, const std::string& path, const nlohmann::json& body,
                         int timeout_ms, const RetryPolicy& policy = {});

}  // namespace vlb
