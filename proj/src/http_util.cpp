// Copyright 2026 The AgentSim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "agentsim/http_util.hpp"

#include <chrono>
#include <thread>

#include "agentsim/error.hpp"
#include "httplib.h"

namespace agentsim::http {

Endpoint parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "URL has no scheme: " + url);
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorCode::kInvalidArgument, "unsupported URL scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  Endpoint endpoint;
  if (path_start == std::string::npos) {
    endpoint.origin = url;
    endpoint.path = "/";
  } else {
    endpoint.origin = url.substr(0, path_start);
    endpoint.path = url.substr(path_start);
  }
  if (endpoint.origin.size() == scheme_end + 3) {
    throw Error(ErrorCode::kInvalidArgument, "URL has no host: " + url);
  }
  return endpoint;
}

nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         const std::map<std::string, std::string>& headers,
                         const RetryPolicy& policy, ErrorCode failure_code) {
  const ErrorCode code = failure_code;
  const Endpoint endpoint = parse_url(url);
  httplib::Client client(endpoint.origin);
  const auto timeout = std::chrono::duration<double>(policy.timeout_seconds);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::microseconds>(timeout));
  httplib::Headers request_headers;
  for (const auto& [key, value] : headers) request_headers.emplace(key, value);
  const std::string payload = body.dump();

  std::string last_error;
  int backoff_ms = policy.backoff_initial_ms;
  const int attempts = std::max(1, policy.max_attempts);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
    auto response = client.Post(endpoint.path, request_headers, payload, "application/json");
    if (!response) {
      last_error = "transport error: " + httplib::to_string(response.error());
      continue;
    }
    if (response->status == 429 || response->status >= 500) {
      last_error = "HTTP " + std::to_string(response->status);
      continue;
    }
    if (response->status < 200 || response->status >= 300) {
      throw Error(code, url + " answered HTTP " + std::to_string(response->status) + ": " +
                            response->body.substr(0, 200));
    }
    try {
      return nlohmann::json::parse(response->body);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(code, url + " returned malformed JSON: " + e.what());
    }
  }
  throw Error(code, url + " unavailable after " + std::to_string(attempts) +
                        " attempts (" + last_error + ")");
}

bool probe(const std::string& url, double timeout_seconds) {
  const Endpoint endpoint = parse_url(url);
  httplib::Client client(endpoint.origin);
  const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
      std::chrono::duration<double>(timeout_seconds));
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  return static_cast<bool>(client.Get(endpoint.path));
}

}  // namespace agentsim::http
