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
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentsim/action.hpp"
#include "agentsim/corpus.hpp"
#include "agentsim/trace.hpp"

namespace agentsim {

struct ValidationConfig {
  double theta = 0.4;                   // divergence above this goes to review
  double grounding_threshold = 0.3;     // confidence below this is re-retrieved
  double double_annotation_rate = 0.10;
  std::size_t max_reretrievals = 2;

  void validate() const;  // throws InvalidArgument
};

struct GroundingReport {
  double token_coverage = 0.0;
  std::set<std::string> covered_tokens;
  std::set<std::string> uncovered_tokens;
  bool vacuous = false;     // answer has no content tokens; coverage 1.0
  bool is_refusal = false;  // abstention; coverage not computed
};

// Fraction of the answer's distinct content-token types that occur anywhere in
// the evidence texts' content tokens.
GroundingReport verify_grounding(const AgentAction& answer,
                                 std::span<const std::string> evidence_texts,
                                 const StopwordSet& stopwords);

// Evidence is the answer's cited documents. Throws UnknownDocId.
GroundingReport verify_grounding(const AgentAction& answer, const Corpus& corpus);

// Token coverage of a synthesize step's action against its citations.
// Throws InvalidArgument for steps that are not synthesize steps.
double grounding_confidence(const TraceStep& step, const Corpus& corpus);

inline bool triggers_reretrieval(double confidence, const ValidationConfig& config) {
  return confidence < config.grounding_threshold;
}

struct GroundingRate {
  std::size_t substantive = 0;  // answered trajectories
  std::size_t grounded = 0;     // of those, coverage >= grounding threshold
  std::size_t refusals = 0;     // abstentions; never in the denominator
  double mean_coverage = 0.0;

  double rate() const {
    return substantive == 0 ? 0.0 : static_cast<double>(grounded) / static_cast<double>(substantive);
  }
};

GroundingRate grounding_rate(std::span<const Trajectory> trajectories, const Corpus& corpus,
                             const ValidationConfig& config = {});

enum class Verdict { kPromote, kRevise, kDiscard };
std::string_view to_string(Verdict verdict);
Verdict parse_verdict(std::string_view name);  // throws InvalidDecision

struct Candidate {
  std::string model_id;
  AgentAction action;

  bool operator==(const Candidate&) const = default;
};

struct ReviewDecision {
  std::string reviewer_id;
  std::string reviewer_role = "reviewer";  // "adjudicator" for tie-breaking decisions
  Verdict verdict = Verdict::kPromote;
  std::optional<std::size_t> chosen_candidate_index;  // promote
  std::optional<AgentAction> revised_action;          // revise
  std::string notes;
  std::int64_t decided_at = 0;
  std::optional<std::uint64_t> expected_version;  // optimistic concurrency

  bool operator==(const ReviewDecision&) const = default;
};

enum class ReviewStatus { kPending, kDecided };

struct Resolution {
  Verdict verdict = Verdict::kPromote;
  std::optional<std::size_t> candidate;
  std::optional<AgentAction> revised_action;
};

struct ReviewItem {
  std::string item_id;
  std::string trace_id;
  std::size_t step_index = 0;
  std::string seed_query;
  std::vector<std::string> context_excerpt;
  std::vector<Candidate> candidates;
  double divergence_score = 0.0;
  ReviewStatus status = ReviewStatus::kPending;
  bool double_annotation = false;
  std::vector<std::string> assigned_reviewers;  // reviewers who have decided
  std::vector<ReviewDecision> decisions;
  bool needs_adjudication = false;
  std::uint64_t version = 0;  // bumped by every accepted decision

  std::size_t required_decisions() const { return double_annotation ? 2 : 1; }
  // Outcome of a decided item.
  std::optional<Resolution> resolution() const;
  bool operator==(const ReviewItem&) const = default;
};

std::string review_item_id(std::string_view trace_id, std::size_t step_index);

// hash(item_id) mod 100 < 100 * rate.
bool in_double_annotation_band(std::string_view item_id, double rate);

// Builds a pending item. Throws InvalidArgument unless ds > theta and the
// candidates hold at least two distinct actions.
ReviewItem make_review_item(std::string trace_id, std::size_t step_index, std::string seed_query,
                            std::vector<std::string> context_excerpt,
                            std::vector<Candidate> candidates, double divergence_score,
                            const ValidationConfig& config);

// Pure state transition. Throws AlreadyDecided, StaleItem or InvalidDecision.
// Double-annotated items decide on two agreeing decisions; disagreement sets
// needs_adjudication and a third decision settles it by majority (the third
// decision stands when all three differ).
ReviewItem apply_review_decision(ReviewItem item, const ReviewDecision& decision);

// Installs a decided item's resolution into its trace: promote and revise
// replace the flagged step's action; discard drops the whole trajectory.
void apply_resolution(Trace& trace, const ReviewItem& item);

// Fraction of double-annotated items (with two decisions) whose first two
// decisions agree on verdict, and on the candidate for promote.
// Throws NoDoubleAnnotatedItems.
double agreement_rate(std::span<const ReviewItem> items);

nlohmann::ordered_json decision_to_json(const ReviewDecision& decision);
ReviewDecision decision_from_json(const nlohmann::json& j);
nlohmann::ordered_json review_item_to_json(const ReviewItem& item);
ReviewItem review_item_from_json(const nlohmann::json& j);

}  // namespace agentsim
