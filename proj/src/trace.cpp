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

#include "agentsim/trace.hpp"

#include "agentsim/error.hpp"

namespace agentsim {

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view name, const Enum (&values)[N], const char* what) {
  for (const auto v : values) {
    if (to_string(v) == name) return v;
  }
  throw Error(ErrorCode::kCorruptData, std::string("unknown ") + what + " '" + std::string(name) + "'");
}

std::string join_comma(const std::vector<std::string>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ",";
    out += ids[i];
  }
  return out;
}

template <typename T>
nlohmann::ordered_json optional_number(const std::optional<T>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

std::optional<double> read_optional_double(const nlohmann::json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

}  // namespace

std::string_view to_string(AgentRole role) {
  switch (role) {
    case AgentRole::kAnalyst: return "analyst";
    case AgentRole::kCritic: return "critic";
    case AgentRole::kJudge: return "judge";
    case AgentRole::kSystem: return "system";
  }
  return "unknown";
}

std::string_view to_string(StepStatus status) {
  switch (status) {
    case StepStatus::kAccepted: return "accepted";
    case StepStatus::kFlagged: return "flagged";
    case StepStatus::kAutoReretrieved: return "auto_reretrieved";
    case StepStatus::kPromoted: return "promoted";
    case StepStatus::kRevised: return "revised";
    case StepStatus::kDiscarded: return "discarded";
  }
  return "unknown";
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::kAnswered: return "answered";
    case Outcome::kAbstained: return "abstained";
    case Outcome::kDiscarded: return "discarded";
  }
  return "unknown";
}

AgentRole parse_role(std::string_view name) {
  static constexpr AgentRole kAll[] = {AgentRole::kAnalyst, AgentRole::kCritic, AgentRole::kJudge,
                                       AgentRole::kSystem};
  return parse_enum(name, kAll, "role");
}

StepStatus parse_status(std::string_view name) {
  static constexpr StepStatus kAll[] = {StepStatus::kAccepted,        StepStatus::kFlagged,
                                        StepStatus::kAutoReretrieved, StepStatus::kPromoted,
                                        StepStatus::kRevised,         StepStatus::kDiscarded};
  return parse_enum(name, kAll, "status");
}

Outcome parse_outcome(std::string_view name) {
  static constexpr Outcome kAll[] = {Outcome::kAnswered, Outcome::kAbstained, Outcome::kDiscarded};
  return parse_enum(name, kAll, "outcome");
}

bool TraceStep::executed() const {
  return action.has_value() && (role == AgentRole::kJudge || role == AgentRole::kSystem);
}

bool Trace::has_pending_review() const {
  for (const auto& step : steps) {
    if (step.status == StepStatus::kFlagged) return true;
  }
  return false;
}

std::size_t Trace::analyst_proposals() const {
  std::size_t n = 0;
  for (const auto& step : steps) n += step.role == AgentRole::kAnalyst ? 1 : 0;
  return n;
}

Trajectory project_trajectory(const Trace& trace, const SeedRecord& seed) {
  Trajectory out;
  out.trace_id = trace.trace_id;
  out.seed = seed;
  out.analyst_id = trace.analyst_id;
  out.outcome = trace.outcome;
  for (const auto& step : trace.steps) {
    if (!step.executed()) continue;
    const AgentAction& action = *step.action;
    ToolCall call;
    call.tool = std::string(to_string(action.type));
    switch (action.type) {
      case ActionType::kSearch: {
        call.input = action.query;
        if (step.observation.retrieval) call.doc_ids = step.observation.retrieval->doc_ids();
        call.output_summary = std::to_string(call.doc_ids.size()) + " hits";
        if (!call.doc_ids.empty()) call.output_summary += ": " + join_comma(call.doc_ids);
        break;
      }
      case ActionType::kRerank:
      case ActionType::kSummarize:
        call.input = join_comma(action.doc_ids);
        call.doc_ids = action.doc_ids;
        call.output_summary = step.observation.text;
        break;
      case ActionType::kSynthesize:
        call.input = action.text;
        call.doc_ids = action.doc_ids;
        call.output_summary = step.observation.text;
        out.final = FinalResult{false, action.text, action.doc_ids};
        break;
      case ActionType::kAbstain:
        call.input = action.text;
        call.output_summary = step.observation.text;
        out.final = FinalResult{true, action.text, {}};
        break;
    }
    out.tool_calls.push_back(std::move(call));
  }
  if (out.outcome == Outcome::kDiscarded) out.final.reset();
  return out;
}

nlohmann::ordered_json retrieval_to_json(const RetrievalResult& result) {
  nlohmann::ordered_json j;
  j["query"] = result.query;
  j["depth"] = result.depth;
  auto hits = nlohmann::ordered_json::array();
  for (const auto& hit : result.hits) {
    nlohmann::ordered_json h;
    h["doc_id"] = hit.doc_id;
    h["score"] = hit.score;
    hits.push_back(std::move(h));
  }
  j["hits"] = std::move(hits);
  return j;
}

RetrievalResult retrieval_from_json(const nlohmann::json& j) {
  RetrievalResult r;
  r.query = j.at("query").get<std::string>();
  r.depth = j.at("depth").get<std::size_t>();
  for (const auto& h : j.at("hits")) {
    r.hits.push_back({h.at("doc_id").get<std::string>(), h.at("score").get<double>()});
  }
  return r;
}

nlohmann::ordered_json step_to_json(const TraceStep& step) {
  nlohmann::ordered_json j;
  j["trace_id"] = step.trace_id;
  j["step_index"] = step.step_index;
  j["cycle_index"] = step.cycle_index;
  j["role"] = to_string(step.role);
  j["model_id"] = step.model_id;
  j["thought"] = step.thought;
  j["action"] = step.action ? action_to_json(*step.action) : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json obs;
  obs["retrieval"] = step.observation.retrieval ? retrieval_to_json(*step.observation.retrieval)
                                                : nlohmann::ordered_json(nullptr);
  obs["text"] = step.observation.text;
  j["observation"] = std::move(obs);
  j["divergence_score"] = optional_number(step.divergence_score);
  j["grounding_confidence"] = optional_number(step.grounding_confidence);
  j["status"] = to_string(step.status);
  j["timestamp_ms"] = step.timestamp_ms;
  auto prompt = nlohmann::ordered_json::array();
  for (const auto& m : step.prompt) {
    nlohmann::ordered_json msg;
    msg["role"] = m.role;
    msg["content"] = m.content;
    prompt.push_back(std::move(msg));
  }
  j["prompt"] = std::move(prompt);
  j["raw_response"] = step.raw_response;
  j["review_item_id"] = step.review_item_id;
  return j;
}

TraceStep step_from_json(const nlohmann::json& j) {
  try {
    TraceStep step;
    step.trace_id = j.at("trace_id").get<std::string>();
    step.step_index = j.at("step_index").get<std::size_t>();
    step.cycle_index = j.at("cycle_index").get<std::size_t>();
    step.role = parse_role(j.at("role").get<std::string>());
    step.model_id = j.at("model_id").get<std::string>();
    step.thought = j.at("thought").get<std::string>();
    if (const auto& a = j.at("action"); !a.is_null()) step.action = action_from_json(a);
    const auto& obs = j.at("observation");
    if (const auto& r = obs.at("retrieval"); !r.is_null()) step.observation.retrieval = retrieval_from_json(r);
    step.observation.text = obs.at("text").get<std::string>();
    step.divergence_score = read_optional_double(j, "divergence_score");
    step.grounding_confidence = read_optional_double(j, "grounding_confidence");
    step.status = parse_status(j.at("status").get<std::string>());
    step.timestamp_ms = j.at("timestamp_ms").get<std::int64_t>();
    for (const auto& m : j.at("prompt")) {
      step.prompt.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
    }
    step.raw_response = j.at("raw_response").get<std::string>();
    step.review_item_id = j.value("review_item_id", std::string());
    return step;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptData, std::string("malformed trace step: ") + e.what());
  }
}

nlohmann::ordered_json trace_to_json(const Trace& trace) {
  nlohmann::ordered_json j;
  j["trace_id"] = trace.trace_id;
  j["seed_id"] = trace.seed_id;
  j["seed_query"] = trace.seed_query;
  j["analyst_id"] = trace.analyst_id;
  j["template_hash"] = trace.template_hash;
  j["outcome"] = to_string(trace.outcome);
  auto steps = nlohmann::ordered_json::array();
  for (const auto& s : trace.steps) steps.push_back(step_to_json(s));
  j["steps"] = std::move(steps);
  return j;
}

Trace trace_from_json(const nlohmann::json& j) {
  try {
    Trace trace;
    trace.trace_id = j.at("trace_id").get<std::string>();
    trace.seed_id = j.at("seed_id").get<std::string>();
    trace.seed_query = j.at("seed_query").get<std::string>();
    trace.analyst_id = j.at("analyst_id").get<std::string>();
    trace.template_hash = j.at("template_hash").get<std::string>();
    trace.outcome = parse_outcome(j.at("outcome").get<std::string>());
    for (const auto& s : j.at("steps")) trace.steps.push_back(step_from_json(s));
    return trace;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptData, std::string("malformed trace: ") + e.what());
  }
}

nlohmann::ordered_json trajectory_to_json(const Trajectory& trajectory) {
  nlohmann::ordered_json j;
  j["trace_id"] = trajectory.trace_id;
  j["seed"] = seed_to_json(trajectory.seed);
  j["analyst_id"] = trajectory.analyst_id;
  auto calls = nlohmann::ordered_json::array();
  for (const auto& c : trajectory.tool_calls) {
    nlohmann::ordered_json call;
    call["tool"] = c.tool;
    call["input"] = c.input;
    call["output_summary"] = c.output_summary;
    call["doc_ids"] = c.doc_ids;
    calls.push_back(std::move(call));
  }
  j["tool_calls"] = std::move(calls);
  if (trajectory.final) {
    nlohmann::ordered_json f;
    f["abstained"] = trajectory.final->abstained;
    f["answer"] = trajectory.final->answer;
    f["cited_doc_ids"] = trajectory.final->cited_doc_ids;
    j["final"] = std::move(f);
  } else {
    j["final"] = nullptr;
  }
  j["outcome"] = to_string(trajectory.outcome);
  return j;
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
  try {
    Trajectory t;
    t.trace_id = j.at("trace_id").get<std::string>();
    t.seed = seed_from_json(j.at("seed"));
    t.analyst_id = j.at("analyst_id").get<std::string>();
    for (const auto& c : j.at("tool_calls")) {
      t.tool_calls.push_back({c.at("tool").get<std::string>(), c.at("input").get<std::string>(),
                              c.at("output_summary").get<std::string>(),
                              c.at("doc_ids").get<std::vector<std::string>>()});
    }
    if (const auto& f = j.at("final"); !f.is_null()) {
      t.final = FinalResult{f.at("abstained").get<bool>(), f.at("answer").get<std::string>(),
                            f.at("cited_doc_ids").get<std::vector<std::string>>()};
    }
    t.outcome = parse_outcome(j.at("outcome").get<std::string>());
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptData, std::string("malformed trajectory: ") + e.what());
  }
}

}  // namespace agentsim
