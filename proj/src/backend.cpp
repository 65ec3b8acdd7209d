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

#include "agentsim/backend.hpp"

#include <algorithm>

#include "agentsim/error.hpp"
#include "agentsim/text.hpp"

namespace agentsim {

namespace {

std::string lower_ascii(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string json_escaped(const std::string& value) {
  const std::string quoted = nlohmann::json(value).dump();
  return quoted.substr(1, quoted.size() - 2);
}

std::string nth(const std::vector<std::string>& values, std::size_t i) {
  return i < values.size() ? values[i] : std::string();
}

void replace_all(std::string& text, std::string_view from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

}  // namespace

bool ScriptRule::matches(const ScriptContext& context) const {
  if (role && *role != context.role) return false;
  if (cycle && *cycle != context.cycle) return false;
  if (min_cycle && context.cycle < *min_cycle) return false;
  if (max_cycle && context.cycle > *max_cycle) return false;
  if (reretrievals && *reretrievals != context.reretrievals) return false;
  if (!query_contains.empty() &&
      lower_ascii(context.seed_query).find(lower_ascii(query_contains)) == std::string::npos) {
    return false;
  }
  if (bucket_mod > 0 && fnv1a64(context.seed_query) % bucket_mod != bucket_eq) return false;
  return !responses.empty();
}

std::string render_script_response(const std::string& response, const ScriptContext& context) {
  std::string out = response;
  replace_all(out, "{{seed_query}}", json_escaped(context.seed_query));
  replace_all(out, "{{last_query}}", json_escaped(context.last_query));
  replace_all(out, "{{cycle}}", std::to_string(context.cycle));
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string n = std::to_string(i + 1);
    replace_all(out, "{{doc" + n + "}}", json_escaped(nth(context.last_retrieved, i)));
    replace_all(out, "{{excerpt" + n + "}}", json_escaped(nth(context.last_excerpts, i)));
  }
  replace_all(out, "{{retrieved}}", nlohmann::json(context.last_retrieved).dump());
  if (context.proposal) {
    replace_all(out, "{{proposal}}", action_to_json(*context.proposal).dump());
    replace_all(out, "{{proposal_query}}", json_escaped(context.proposal->query));
  }
  return out;
}

ScriptedBackend::ScriptedBackend(std::string id, std::vector<ScriptRule> rules)
    : id_(std::move(id)), rules_(std::move(rules)) {}

std::string ScriptedBackend::complete(const ModelRequest& request) {
  const auto& context = request.context;
  for (const auto& rule : rules_) {
    if (!rule.matches(context)) continue;
    const auto& response = rule.responses[std::min(context.cycle, rule.responses.size() - 1)];
    return render_script_response(response, context);
  }
  throw Error(ErrorCode::kBackendError,
              "scripted backend " + id_ + " has no rule for cycle " + std::to_string(context.cycle));
}

RemoteChatBackend::RemoteChatBackend(RemoteChatConfig config) : config_(std::move(config)) {
  if (config_.endpoint_url.empty() || config_.model_name.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "remote chat backend " + config_.id + " needs endpoint_url and model_name");
  }
}

std::string RemoteChatBackend::complete(const ModelRequest& request) {
  nlohmann::ordered_json body;
  body["model"] = config_.model_name;
  auto messages = nlohmann::ordered_json::array();
  for (const auto& m : request.messages) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  body["messages"] = std::move(messages);
  body["temperature"] = request.temperature;
  body["seed"] = request.seed;
  std::map<std::string, std::string> headers;
  if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;
  const auto reply = http::post_json(config_.endpoint_url, nlohmann::json::parse(body.dump()),
                                     headers, config_.retry, ErrorCode::kBackendError);
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kBackendError,
                "malformed chat response from " + config_.id + ": " + e.what());
  }
}

std::shared_ptr<ModelBackend> make_backend(const BackendConfig& config) {
  if (config.kind == "scripted") return std::make_shared<ScriptedBackend>(config.id, config.rules);
  if (config.kind == "remote_chat") {
    RemoteChatConfig remote = config.remote;
    remote.id = config.id;
    return std::make_shared<RemoteChatBackend>(std::move(remote));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown backend kind: " + config.kind);
}

}  // namespace agentsim
