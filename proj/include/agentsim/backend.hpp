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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "agentsim/http_util.hpp"
#include "agentsim/trace.hpp"

namespace agentsim {

enum class BackendRole { kAnalyst, kCritic };

// Structured view of the turn that scripted backends match rules against.
// Remote backends see only the rendered messages.
struct ScriptContext {
  BackendRole role = BackendRole::kAnalyst;
  std::string trace_id;
  std::string seed_query;
  std::size_t cycle = 0;
  std::size_t attempt = 0;
  std::size_t reretrievals = 0;
  std::string last_query;                  // most recent executed search, else the seed query
  std::vector<std::string> last_retrieved; // doc ids of that search
  std::vector<std::string> last_excerpts;  // leading words of each retrieved doc
  std::optional<AgentAction> proposal;     // critic turns
};

struct ModelRequest {
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  std::uint64_t seed = 0;
  ScriptContext context;
};

class ModelBackend {
 public:
  virtual ~ModelBackend() = default;
  virtual const std::string& id() const = 0;
  // Returns the raw completion text. Throws BackendError.
  virtual std::string complete(const ModelRequest& request) = 0;
};

// First matching rule answers. The response text may reference
//   {{seed_query}} {{last_query}} {{cycle}} {{doc1}} {{doc2}} {{doc3}}
//   {{excerpt1}} {{excerpt2}} {{excerpt3}} {{proposal_query}}
// which are substituted JSON-string-escaped, and {{retrieved}} / {{proposal}}
// which are substituted as raw JSON.
struct ScriptRule {
  std::optional<BackendRole> role;
  std::optional<std::size_t> cycle;      // exact match
  std::optional<std::size_t> min_cycle;
  std::optional<std::size_t> max_cycle;
  std::optional<std::size_t> reretrievals;
  std::string query_contains;            // case-insensitive substring of the seed query
  std::size_t bucket_mod = 0;            // 0 disables the bucket test
  std::size_t bucket_eq = 0;             // fnv1a64(seed_query) % mod == eq
  std::vector<std::string> responses;    // indexed by cycle, last one repeats

  bool matches(const ScriptContext& context) const;
};

class ScriptedBackend final : public ModelBackend {
 public:
  ScriptedBackend(std::string id, std::vector<ScriptRule> rules);
  const std::string& id() const override { return id_; }
  std::string complete(const ModelRequest& request) override;

 private:
  std::string id_;
  std::vector<ScriptRule> rules_;
};

std::string render_script_response(const std::string& response, const ScriptContext& context);

struct RemoteChatConfig {
  std::string id;
  std::string endpoint_url;
  std::string model_name;
  std::string api_key;
  http::RetryPolicy retry;
};

class RemoteChatBackend final : public ModelBackend {
 public:
  explicit RemoteChatBackend(RemoteChatConfig config);
  const std::string& id() const override { return config_.id; }
  std::string complete(const ModelRequest& request) override;

 private:
  RemoteChatConfig config_;
};

struct BackendConfig {
  std::string id;
  std::string kind = "scripted";  // scripted | remote_chat
  RemoteChatConfig remote;
  std::vector<ScriptRule> rules;
};

std::shared_ptr<ModelBackend> make_backend(const BackendConfig& config);

}  // namespace agentsim
