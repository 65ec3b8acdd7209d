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

#pragma once

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "agentsim/error.hpp"

namespace agentsim::http {

struct RetryPolicy {
  int max_attempts = 3;
  int backoff_initial_ms = 500;  // doubled after every failed attempt
  double timeout_seconds = 30.0;
};

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

// Throws InvalidArgument for URLs without an http(s) scheme.
Endpoint parse_url(const std::string& url);

// POSTs a JSON body and returns the parsed JSON response. Transport failures,
// 429 and 5xx responses are retried with exponential backoff; other non-2xx
// responses fail immediately. Throws ProviderUnavailable or BackendError
// (failure_code) once attempts are exhausted.
nlohmann::json post_json(const std::string& url, const nlohmann::json& body,
                         const std::map<std::string, std::string>& headers,
                         const RetryPolicy& policy, ErrorCode failure_code);

// GET that reports whether the server answered at all (any status).
bool probe(const std::string& url, double timeout_seconds);

}  // namespace agentsim::http
