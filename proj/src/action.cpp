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

#include "agentsim/action.hpp"

#include <algorithm>
#include <cctype>

#include "agentsim/error.hpp"
#include "agentsim/text.hpp"

namespace agentsim {

namespace {

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out.push_back('\x1f');
    out += ids[i];
  }
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// Case-insensitive search for a "Label:" marker at the start of a line.
std::size_t find_label(std::string_view text, std::string_view label) {
  for (std::size_t pos = 0; pos + label.size() <= text.size(); ++pos) {
    if (pos > 0 && text[pos - 1] != '\n') continue;
    std::size_t start = pos;
    while (start < text.size() && (text[start] == ' ' || text[start] == '\t' || text[start] == '*')) {
      ++start;
    }
    if (start + label.size() > text.size()) continue;
    bool match = true;
    for (std::size_t i = 0; i < label.size() && match; ++i) {
      match = std::tolower(static_cast<unsigned char>(text[start + i])) ==
              std::tolower(static_cast<unsigned char>(label[i]));
    }
    if (match) return start + label.size();
  }
  return std::string_view::npos;
}

std::string string_field(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) {
    throw Error(ErrorCode::kUnparseableAction, std::string("action field '") + key + "' must be a string");
  }
  return it->get<std::string>();
}

std::vector<std::string> ids_field(const nlohmann::json& j) {
  const auto it = j.find("doc_ids");
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_array()) throw Error(ErrorCode::kUnparseableAction, "action field 'doc_ids' must be an array");
  std::vector<std::string> ids;
  for (const auto& v : *it) ids.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  return ids;
}

}  // namespace

std::string_view to_string(ActionType type) {
  switch (type) {
    case ActionType::kSearch: return "search";
    case ActionType::kRerank: return "rerank";
    case ActionType::kSummarize: return "summarize";
    case ActionType::kSynthesize: return "synthesize";
    case ActionType::kAbstain: return "abstain";
  }
  return "unknown";
}

std::optional<ActionType> parse_action_type(std::string_view name) {
  for (const auto type : {ActionType::kSearch, ActionType::kRerank, ActionType::kSummarize,
                          ActionType::kSynthesize, ActionType::kAbstain}) {
    if (to_string(type) == name) return type;
  }
  return std::nullopt;
}

AgentAction AgentAction::search(std::string query) {
  AgentAction a;
  a.type = ActionType::kSearch;
  a.query = std::move(query);
  return a;
}

AgentAction AgentAction::rerank(std::vector<std::string> order) {
  AgentAction a;
  a.type = ActionType::kRerank;
  a.doc_ids = std::move(order);
  return a;
}

AgentAction AgentAction::summarize(std::vector<std::string> doc_ids, std::string summary) {
  AgentAction a;
  a.type = ActionType::kSummarize;
  a.doc_ids = std::move(doc_ids);
  a.text = std::move(summary);
  return a;
}

AgentAction AgentAction::synthesize(std::string answer, std::vector<std::string> cited) {
  AgentAction a;
  a.type = ActionType::kSynthesize;
  a.text = std::move(answer);
  a.doc_ids = std::move(cited);
  return a;
}

AgentAction AgentAction::abstain(std::string reason) {
  AgentAction a;
  a.type = ActionType::kAbstain;
  a.text = std::move(reason);
  return a;
}

std::string AgentAction::violation() const {
  switch (type) {
    case ActionType::kSearch:
      if (normalize_payload(query).empty()) return "search query is empty";
      break;
    case ActionType::kRerank:
      if (doc_ids.empty()) return "rerank has no doc_ids";
      break;
    case ActionType::kSummarize:
      if (doc_ids.empty()) return "summarize has no doc_ids";
      break;
    case ActionType::kSynthesize:
      if (doc_ids.empty()) return "synthesize cites no documents";
      if (normalize_payload(text).empty()) return "synthesize answer is empty";
      break;
    case ActionType::kAbstain:
      break;
  }
  return {};
}

std::string canonical_key(const AgentAction& action) {
  std::string key(to_string(action.type));
  key.push_back('|');
  switch (action.type) {
    case ActionType::kSearch:
      key += normalize_payload(action.query);
      break;
    case ActionType::kRerank:
      key += join_ids(action.doc_ids);
      break;
    case ActionType::kSummarize:
      key += join_ids(action.doc_ids);
      key.push_back('|');
      key += normalize_payload(action.text);
      break;
    case ActionType::kSynthesize:
      key += normalize_payload(action.text);
      break;
    case ActionType::kAbstain:
      break;
  }
  return key;
}

nlohmann::ordered_json action_to_json(const AgentAction& action) {
  nlohmann::ordered_json j;
  j["type"] = to_string(action.type);
  switch (action.type) {
    case ActionType::kSearch:
      j["query"] = action.query;
      break;
    case ActionType::kRerank:
      j["doc_ids"] = action.doc_ids;
      break;
    case ActionType::kSummarize:
      j["doc_ids"] = action.doc_ids;
      j["summary"] = action.text;
      break;
    case ActionType::kSynthesize:
      j["answer"] = action.text;
      j["doc_ids"] = action.doc_ids;
      break;
    case ActionType::kAbstain:
      j["reason"] = action.text;
      break;
  }
  return j;
}

AgentAction action_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kUnparseableAction, "action must be a JSON object");
  const auto type_name = string_field(j, "type");
  const auto type = parse_action_type(type_name);
  if (!type) throw Error(ErrorCode::kUnparseableAction, "unknown action type '" + type_name + "'");
  AgentAction action;
  action.type = *type;
  switch (*type) {
    case ActionType::kSearch:
      action.query = string_field(j, "query");
      break;
    case ActionType::kRerank:
      action.doc_ids = ids_field(j);
      break;
    case ActionType::kSummarize:
      action.doc_ids = ids_field(j);
      action.text = string_field(j, "summary");
      break;
    case ActionType::kSynthesize:
      action.text = string_field(j, "answer");
      action.doc_ids = ids_field(j);
      break;
    case ActionType::kAbstain:
      action.text = string_field(j, "reason");
      break;
  }
  if (auto problem = action.violation(); !problem.empty()) {
    throw Error(ErrorCode::kUnparseableAction, problem);
  }
  return action;
}

ModelReply parse_model_reply(std::string_view text, bool allow_approve) {
  ModelReply reply;
  if (allow_approve) {
    const auto verdict = find_label(text, "verdict:");
    if (verdict != std::string_view::npos) {
      auto end = text.find('\n', verdict);
      std::string value = normalize_payload(trim(text.substr(verdict, end == std::string_view::npos ? std::string_view::npos : end - verdict)));
      if (value.rfind("approve", 0) == 0) {
        reply.approve = true;
        return reply;
      }
    }
  }
  const auto action_pos = find_label(text, "action:");
  if (action_pos == std::string_view::npos) {
    throw Error(ErrorCode::kUnparseableAction, "reply has no 'Action:' block");
  }
  const auto thought_pos = find_label(text, "thought:");
  if (thought_pos != std::string_view::npos && thought_pos < action_pos) {
    const auto action_label = text.rfind('\n', action_pos);
    reply.thought = trim(text.substr(thought_pos, action_label - thought_pos));
  }
  const auto open = text.find('{', action_pos);
  const auto close = text.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw Error(ErrorCode::kUnparseableAction, "'Action:' block holds no JSON object");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.substr(open, close - open + 1));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::kUnparseableAction, std::string("action JSON: ") + e.what());
  }
  reply.action = action_from_json(j);
  return reply;
}

}  // namespace agentsim
