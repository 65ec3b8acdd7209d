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

#include "agentsim/validation.hpp"

#include <algorithm>

#include "agentsim/error.hpp"
#include "agentsim/text.hpp"

namespace agentsim {

namespace {

bool same_call(const ReviewDecision& a, const ReviewDecision& b) {
  if (a.verdict != b.verdict) return false;
  return a.verdict != Verdict::kPromote || a.chosen_candidate_index == b.chosen_candidate_index;
}

Resolution to_resolution(const ReviewDecision& d) {
  return {d.verdict, d.chosen_candidate_index, d.revised_action};
}

void check_fraction(double v, const char* field) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, std::string("validation.") + field + " must be in [0,1]");
  }
}

}  // namespace

void ValidationConfig::validate() const {
  check_fraction(theta, "theta");
  check_fraction(grounding_threshold, "grounding_threshold");
  check_fraction(double_annotation_rate, "double_annotation_rate");
}

GroundingReport verify_grounding(const AgentAction& answer,
                                 std::span<const std::string> evidence_texts,
                                 const StopwordSet& stopwords) {
  GroundingReport report;
  if (answer.type == ActionType::kAbstain) {
    report.is_refusal = true;
    return report;
  }
  const auto answer_tokens = content_tokens(answer.text, stopwords);
  if (answer_tokens.empty()) {
    report.vacuous = true;
    report.token_coverage = 1.0;
    return report;
  }
  std::set<std::string> evidence;
  for (const auto& text : evidence_texts) {
    for (auto& token : content_tokens(text, stopwords)) evidence.insert(std::move(token));
  }
  for (const auto& token : answer_tokens) {
    if (evidence.contains(token)) {
      report.covered_tokens.insert(token);
    } else {
      report.uncovered_tokens.insert(token);
    }
  }
  report.token_coverage =
      static_cast<double>(report.covered_tokens.size()) /
      static_cast<double>(report.covered_tokens.size() + report.uncovered_tokens.size());
  return report;
}

GroundingReport verify_grounding(const AgentAction& answer, const Corpus& corpus) {
  std::vector<std::string> evidence;
  for (const auto& id : answer.doc_ids) {
    const auto index = corpus.find(id);
    if (!index) throw Error(ErrorCode::kUnknownDocId, "cited document '" + id + "' is not in the corpus");
    evidence.push_back(corpus.document(*index).text);
  }
  return verify_grounding(answer, evidence, corpus.stopwords());
}

double grounding_confidence(const TraceStep& step, const Corpus& corpus) {
  if (!step.action || step.action->type != ActionType::kSynthesize) {
    throw Error(ErrorCode::kInvalidArgument, "grounding confidence applies to synthesize steps only");
  }
  return verify_grounding(*step.action, corpus).token_coverage;
}

GroundingRate grounding_rate(std::span<const Trajectory> trajectories, const Corpus& corpus,
                             const ValidationConfig& config) {
  GroundingRate rate;
  double coverage_sum = 0.0;
  for (const auto& t : trajectories) {
    if (t.outcome == Outcome::kDiscarded || !t.final) continue;
    if (t.final->abstained) {
      ++rate.refusals;
      continue;
    }
    const auto report =
        verify_grounding(AgentAction::synthesize(t.final->answer, t.final->cited_doc_ids), corpus);
    ++rate.substantive;
    coverage_sum += report.token_coverage;
    if (!triggers_reretrieval(report.token_coverage, config)) ++rate.grounded;
  }
  if (rate.substantive > 0) rate.mean_coverage = coverage_sum / static_cast<double>(rate.substantive);
  return rate;
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kPromote: return "promote";
    case Verdict::kRevise: return "revise";
    case Verdict::kDiscard: return "discard";
  }
  return "unknown";
}

Verdict parse_verdict(std::string_view name) {
  if (name == "promote") return Verdict::kPromote;
  if (name == "revise") return Verdict::kRevise;
  if (name == "discard") return Verdict::kDiscard;
  throw Error(ErrorCode::kInvalidDecision, "verdict must be promote, revise or discard");
}

std::optional<Resolution> ReviewItem::resolution() const {
  if (status != ReviewStatus::kDecided || decisions.empty()) return std::nullopt;
  if (decisions.size() < 3) return to_resolution(decisions.front());
  for (std::size_t i = 0; i < 3; ++i) {
    std::size_t votes = 0;
    for (std::size_t j = 0; j < 3; ++j) votes += same_call(decisions[i], decisions[j]) ? 1 : 0;
    if (votes >= 2) return to_resolution(decisions[i]);
  }
  return to_resolution(decisions[2]);
}

std::string review_item_id(std::string_view trace_id, std::size_t step_index) {
  return std::string(trace_id) + "/s" + std::to_string(step_index);
}

bool in_double_annotation_band(std::string_view item_id, double rate) {
  return static_cast<double>(fnv1a64(item_id) % 100) < 100.0 * rate;
}

ReviewItem make_review_item(std::string trace_id, std::size_t step_index, std::string seed_query,
                            std::vector<std::string> context_excerpt,
                            std::vector<Candidate> candidates, double divergence_score,
                            const ValidationConfig& config) {
  if (!(divergence_score > config.theta)) {
    throw Error(ErrorCode::kInvalidArgument, "divergence " + std::to_string(divergence_score) +
                                                 " does not exceed theta; nothing to review");
  }
  std::set<std::string> keys;
  for (const auto& c : candidates) keys.insert(canonical_key(c.action));
  if (keys.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "a review item needs at least two distinct candidates");
  }
  ReviewItem item;
  item.item_id = review_item_id(trace_id, step_index);
  item.trace_id = std::move(trace_id);
  item.step_index = step_index;
  item.seed_query = std::move(seed_query);
  item.context_excerpt = std::move(context_excerpt);
  item.candidates = std::move(candidates);
  item.divergence_score = divergence_score;
  item.double_annotation = in_double_annotation_band(item.item_id, config.double_annotation_rate);
  return item;
}

ReviewItem apply_review_decision(ReviewItem item, const ReviewDecision& decision) {
  if (item.status == ReviewStatus::kDecided) {
    throw Error(ErrorCode::kAlreadyDecided, "item " + item.item_id + " is already decided");
  }
  if (decision.expected_version && *decision.expected_version != item.version) {
    throw Error(ErrorCode::kStaleItem, "item " + item.item_id + " is at version " +
                                           std::to_string(item.version) + ", decision expected " +
                                           std::to_string(*decision.expected_version));
  }
  if (decision.reviewer_id.empty()) {
    throw Error(ErrorCode::kInvalidDecision, "reviewer_id is required");
  }
  if (std::find(item.assigned_reviewers.begin(), item.assigned_reviewers.end(),
                decision.reviewer_id) != item.assigned_reviewers.end()) {
    throw Error(ErrorCode::kAlreadyDecided,
                "reviewer " + decision.reviewer_id + " already decided item " + item.item_id);
  }
  switch (decision.verdict) {
    case Verdict::kPromote:
      if (!decision.chosen_candidate_index ||
          *decision.chosen_candidate_index >= item.candidates.size()) {
        throw Error(ErrorCode::kInvalidDecision, "promote needs a valid chosen_candidate_index");
      }
      break;
    case Verdict::kRevise:
      if (!decision.revised_action) {
        throw Error(ErrorCode::kInvalidDecision, "revise needs a revised_action");
      }
      if (auto problem = decision.revised_action->violation(); !problem.empty()) {
        throw Error(ErrorCode::kInvalidDecision, "revised_action is invalid: " + problem);
      }
      break;
    case Verdict::kDiscard:
      break;
  }

  ReviewDecision accepted = decision;
  accepted.expected_version = item.version;
  if (item.needs_adjudication) accepted.reviewer_role = "adjudicator";
  item.decisions.push_back(std::move(accepted));
  item.assigned_reviewers.push_back(decision.reviewer_id);
  ++item.version;

  if (!item.double_annotation || item.decisions.size() >= 3) {
    item.status = ReviewStatus::kDecided;
    item.needs_adjudication = false;
  } else if (item.decisions.size() == 2) {
    if (same_call(item.decisions[0], item.decisions[1])) {
      item.status = ReviewStatus::kDecided;
    } else {
      item.needs_adjudication = true;
    }
  }
  return item;
}

void apply_resolution(Trace& trace, const ReviewItem& item) {
  const auto resolution = item.resolution();
  if (!resolution) return;
  auto step = std::find_if(trace.steps.begin(), trace.steps.end(),
                           [&](const TraceStep& s) { return s.step_index == item.step_index; });
  if (step == trace.steps.end()) {
    throw Error(ErrorCode::kNotFound, "trace " + trace.trace_id + " has no step " +
                                          std::to_string(item.step_index));
  }
  switch (resolution->verdict) {
    case Verdict::kPromote:
      step->action = item.candidates.at(*resolution->candidate).action;
      step->status = StepStatus::kPromoted;
      break;
    case Verdict::kRevise:
      step->action = *resolution->revised_action;
      step->status = StepStatus::kRevised;
      break;
    case Verdict::kDiscard:
      step->status = StepStatus::kDiscarded;
      trace.outcome = Outcome::kDiscarded;
      break;
  }
}

double agreement_rate(std::span<const ReviewItem> items) {
  std::size_t total = 0;
  std::size_t agreeing = 0;
  for (const auto& item : items) {
    if (!item.double_annotation || item.decisions.size() < 2) continue;
    ++total;
    agreeing += same_call(item.decisions[0], item.decisions[1]) ? 1 : 0;
  }
  if (total == 0) {
    throw Error(ErrorCode::kNoDoubleAnnotatedItems, "no double-annotated item has two decisions yet");
  }
  return static_cast<double>(agreeing) / static_cast<double>(total);
}

nlohmann::ordered_json decision_to_json(const ReviewDecision& d) {
  nlohmann::ordered_json j;
  j["reviewer_id"] = d.reviewer_id;
  j["reviewer_role"] = d.reviewer_role;
  j["verdict"] = to_string(d.verdict);
  j["chosen_candidate_index"] = d.chosen_candidate_index
                                    ? nlohmann::ordered_json(*d.chosen_candidate_index)
                                    : nlohmann::ordered_json(nullptr);
  j["revised_action"] = d.revised_action ? action_to_json(*d.revised_action)
                                         : nlohmann::ordered_json(nullptr);
  j["notes"] = d.notes;
  j["decided_at"] = d.decided_at;
  j["version"] = d.expected_version ? nlohmann::ordered_json(*d.expected_version)
                                    : nlohmann::ordered_json(nullptr);
  return j;
}

ReviewDecision decision_from_json(const nlohmann::json& j) {
  try {
    ReviewDecision d;
    d.reviewer_id = j.at("reviewer_id").get<std::string>();
    d.reviewer_role = j.value("reviewer_role", std::string("reviewer"));
    d.verdict = parse_verdict(j.at("verdict").get<std::string>());
    if (auto it = j.find("chosen_candidate_index"); it != j.end() && !it->is_null()) {
      d.chosen_candidate_index = it->get<std::size_t>();
    }
    if (auto it = j.find("revised_action"); it != j.end() && !it->is_null()) {
      d.revised_action = action_from_json(*it);
    }
    d.notes = j.value("notes", std::string());
    d.decided_at = j.value("decided_at", std::int64_t{0});
    if (auto it = j.find("version"); it != j.end() && !it->is_null()) {
      d.expected_version = it->get<std::uint64_t>();
    }
    return d;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptData, std::string("malformed decision: ") + e.what());
  }
}

nlohmann::ordered_json review_item_to_json(const ReviewItem& item) {
  nlohmann::ordered_json j;
  j["item_id"] = item.item_id;
  j["trace_id"] = item.trace_id;
  j["step_index"] = item.step_index;
  j["seed_query"] = item.seed_query;
  j["context_excerpt"] = item.context_excerpt;
  auto candidates = nlohmann::ordered_json::array();
  for (const auto& c : item.candidates) {
    nlohmann::ordered_json cj;
    cj["model_id"] = c.model_id;
    cj["action"] = action_to_json(c.action);
    candidates.push_back(std::move(cj));
  }
  j["candidates"] = std::move(candidates);
  j["divergence_score"] = item.divergence_score;
  j["status"] = item.status == ReviewStatus::kPending ? "pending" : "decided";
  j["double_annotation"] = item.double_annotation;
  j["assigned_reviewers"] = item.assigned_reviewers;
  auto decisions = nlohmann::ordered_json::array();
  for (const auto& d : item.decisions) decisions.push_back(decision_to_json(d));
  j["decisions"] = std::move(decisions);
  j["needs_adjudication"] = item.needs_adjudication;
  j["version"] = item.version;
  return j;
}

ReviewItem review_item_from_json(const nlohmann::json& j) {
  try {
    ReviewItem item;
    item.item_id = j.at("item_id").get<std::string>();
    item.trace_id = j.at("trace_id").get<std::string>();
    item.step_index = j.at("step_index").get<std::size_t>();
    item.seed_query = j.at("seed_query").get<std::string>();
    item.context_excerpt = j.at("context_excerpt").get<std::vector<std::string>>();
    for (const auto& c : j.at("candidates")) {
      item.candidates.push_back({c.at("model_id").get<std::string>(), action_from_json(c.at("action"))});
    }
    item.divergence_score = j.at("divergence_score").get<double>();
    item.status = j.value("status", std::string("pending")) == "decided" ? ReviewStatus::kDecided
                                                                         : ReviewStatus::kPending;
    item.double_annotation = j.at("double_annotation").get<bool>();
    item.assigned_reviewers = j.value("assigned_reviewers", std::vector<std::string>{});
    if (auto it = j.find("decisions"); it != j.end()) {
      for (const auto& d : *it) item.decisions.push_back(decision_from_json(d));
    }
    item.needs_adjudication = j.value("needs_adjudication", false);
    item.version = j.value("version", std::uint64_t{0});
    return item;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptData, std::string("malformed review item: ") + e.what());
  }
}

}  // namespace agentsim
