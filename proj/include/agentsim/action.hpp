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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace agentsim {

enum class ActionType { kSearch, kRerank, kSummarize, kSynthesize, kAbstain };

std::string_view to_string(ActionType type);
std::optional<ActionType> parse_action_type(std::string_view name);

// Which payload fields are meaningful depends on the type:
//   search      query
//   rerank      doc_ids (new order)
//   summarize   doc_ids + text (summary)
//   synthesize  text (answer) + doc_ids (citations, at least one)
//   abstain     text (reason)
struct AgentAction {
  ActionType type = ActionType::kSearch;
  std::string query;
  std::vector<std::string> doc_ids;
  std::string text;

  static AgentAction search(std::string query);
  static AgentAction rerank(std::vector<std::string> order);
  static AgentAction summarize(std::vector<std::string> doc_ids, std::string summary);
  static AgentAction synthesize(std::string answer, std::vector<std::string> cited);
  static AgentAction abstain(std::string reason);

  // Empty string when the payload satisfies the type's invariants, otherwise
  // a description of the violation.
  std::string violation() const;

  bool operator==(const AgentAction&) const = default;
};

// Two model choices count as the same action exactly when their keys match:
// same type and whitespace-collapsed, lowercased payload text; rerank (and the
// citation list of summarize) compare by doc_id sequence; every abstention is
// the same action.
std::string canonical_key(const AgentAction& action);

nlohmann::ordered_json action_to_json(const AgentAction& action);
// Throws UnparseableAction.
AgentAction action_from_json(const nlohmann::json& j);

struct ModelReply {
  std::string thought;
  std::optional<AgentAction> action;  // empty when the reply is an approval
  bool approve = false;
};

// Parses "Thought: ...\nAction: {json}" or "Verdict: approve". Throws
// UnparseableAction when neither form is present or the action is invalid.
ModelReply parse_model_reply(std::string_view text, bool allow_approve);

}  // namespace agentsim
