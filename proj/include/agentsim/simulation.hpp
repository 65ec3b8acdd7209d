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
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "agentsim/backend.hpp"
#include "agentsim/corpus.hpp"
#include "agentsim/seeding.hpp"
#include "agentsim/trace.hpp"
#include "agentsim/validation.hpp"

namespace agentsim {

struct PromptTemplates {
  std::string analyst_system;
  std::string analyst_user;
  std::string critic_system;
  std::string critic_user;

  static PromptTemplates builtin();
  std::string hash() const;  // stamped into every trace
};

using Clock = std::function<std::int64_t()>;

Clock system_clock_ms();
// Starts at start_ms and advances by step_ms on every call.
Clock fixed_step_clock(std::int64_t start_ms = 0, std::int64_t step_ms = 1);

struct SimulationConfig {
  std::shared_ptr<ModelBackend> analyst;
  std::vector<std::shared_ptr<ModelBackend>> critics;
  std::size_t max_cycles = 7;
  std::size_t retrieval_depth = 10;
  ValidationConfig validation;
  bool adaptive_consultation = false;
  Clock clock;  // defaults to the system clock when empty
  std::uint64_t rng_seed = 0;
  Bm25Params bm25;
  double temperature = 0.0;
  std::size_t context_token_budget = 4000;  // whitespace words of rendered history
  std::size_t explorations_per_seed = 1;
  PromptTemplates templates = PromptTemplates::builtin();

  void validate() const;  // throws InvalidArgument
};

// Everything a backend turn needs to see.
struct TurnContext {
  const Trace& trace;
  const Corpus& corpus;
  const SimulationConfig& config;
  std::size_t cycle = 0;
  std::size_t reretrievals = 0;
  std::uint64_t call_seed = 0;
};

struct ProposalResult {
  std::string thought;
  AgentAction action;
  bool approved = false;  // critic turns only
  std::vector<ChatMessage> prompt;
  std::string raw_response;
};

// History of executed actions and observations, oldest observations elided
// first until the rendering fits the budget.
std::string render_history(const Trace& trace, std::size_t token_budget);

std::vector<ChatMessage> analyst_messages(const TurnContext& turn);
std::vector<ChatMessage> critic_messages(const TurnContext& turn, const std::string& proposer,
                                         const AgentAction& proposal);

// One retry on an unparseable reply, then UnparseableAction. Actions citing
// doc ids absent from the corpus count as unparseable.
ProposalResult analyst_propose(ModelBackend& backend, const TurnContext& turn);
ProposalResult critic_review(ModelBackend& backend, const AgentAction& proposal,
                             const std::string& proposer, const TurnContext& turn);

struct JudgeResult {
  double divergence_score = 0.0;
  bool flagged = false;
  AgentAction chosen;                 // plurality action, provisional when flagged
  std::vector<Candidate> candidates;  // one per distinct action, first proposer order
};

// proposals[0] is the analyst. DS = 1 - plurality/|M|; flagged iff DS > theta.
JudgeResult judge_step(const std::vector<Candidate>& proposals, const ValidationConfig& config);

struct SimulationResult {
  Trace trace;
  Trajectory trajectory;
  std::vector<ReviewItem> review_items;
  std::string error;  // set when a backend failure discarded the trajectory
};

std::string make_trace_id(const SeedRecord& seed, std::size_t exploration);

SimulationResult run_trajectory(const SeedRecord& seed, const Corpus& corpus,
                                const SimulationConfig& config, std::size_t exploration = 0);

}  // namespace agentsim
