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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentsim/action.hpp"
#include "agentsim/corpus.hpp"
#include "agentsim/seeding.hpp"

namespace agentsim {

enum class AgentRole { kAnalyst, kCritic, kJudge, kSystem };
enum class StepStatus { kAccepted, kFlagged, kAutoReretrieved, kPromoted, kRevised, kDiscarded };
enum class Outcome { kAnswered, kAbstained, kDiscarded };

std::string_view to_string(AgentRole role);
std::string_view to_string(StepStatus status);
std::string_view to_string(Outcome outcome);
AgentRole parse_role(std::string_view name);
StepStatus parse_status(std::string_view name);
Outcome parse_outcome(std::string_view name);

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

struct Observation {
  std::optional<RetrievalResult> retrieval;
  std::string text;

  bool operator==(const Observation&) const = default;
};

struct TraceStep {
  std::string trace_id;
  std::size_t step_index = 0;
  std::size_t cycle_index = 0;
  AgentRole role = AgentRole::kSystem;
  std::string model_id;
  std::string thought;
  std::optional<AgentAction> action;
  Observation observation;
  std::optional<double> divergence_score;      // judge steps
  std::optional<double> grounding_confidence;  // executed synthesize steps
  StepStatus status = StepStatus::kAccepted;
  std::int64_t timestamp_ms = 0;
  std::vector<ChatMessage> prompt;  // complete model input (analyst/critic)
  std::string raw_response;         // complete model output (analyst/critic)
  std::string review_item_id;       // set on flagged judge steps

  // Judge steps and system steps that carry an action were executed.
  bool executed() const;
  bool operator==(const TraceStep&) const = default;
};

struct Trace {
  std::string trace_id;
  std::string seed_id;
  std::string seed_query;
  std::string analyst_id;
  std::string template_hash;
  Outcome outcome = Outcome::kDiscarded;
  std::vector<TraceStep> steps;

  bool has_pending_review() const;
  std::size_t analyst_proposals() const;
  bool operator==(const Trace&) const = default;
};

struct ToolCall {
  std::string tool;  // action type
  std::string input;
  std::string output_summary;
  std::vector<std::string> doc_ids;  // retrieved (search) or referenced docs

  bool operator==(const ToolCall&) const = default;
};

struct FinalResult {
  bool abstained = false;
  std::string answer;  // answer text, or the abstention reason
  std::vector<std::string> cited_doc_ids;

  bool operator==(const FinalResult&) const = default;
};

struct Trajectory {
  std::string trace_id;
  SeedRecord seed;
  std::string analyst_id;
  std::vector<ToolCall> tool_calls;
  std::optional<FinalResult> final;
  Outcome outcome = Outcome::kDiscarded;

  bool operator==(const Trajectory&) const = default;
};

// Prompt-free view of a trace: every executed action in order, plus the
// terminal result.
Trajectory project_trajectory(const Trace& trace, const SeedRecord& seed);

nlohmann::ordered_json step_to_json(const TraceStep& step);
TraceStep step_from_json(const nlohmann::json& j);
nlohmann::ordered_json retrieval_to_json(const RetrievalResult& result);
RetrievalResult retrieval_from_json(const nlohmann::json& j);
nlohmann::ordered_json trace_to_json(const Trace& trace);
Trace trace_from_json(const nlohmann::json& j);
nlohmann::ordered_json trajectory_to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const nlohmann::json& j);

}  // namespace agentsim
