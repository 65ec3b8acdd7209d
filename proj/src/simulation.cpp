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

#include "agentsim/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <map>
#include <sstream>

#include "agentsim/assets.hpp"
#include "agentsim/error.hpp"
#include "agentsim/rng.hpp"
#include "agentsim/text.hpp"

namespace agentsim {

namespace {

constexpr std::size_t kObservationExcerptWords = 30;
constexpr std::size_t kScriptExcerptWords = 12;
constexpr std::size_t kContextExcerptEntries = 6;
constexpr std::string_view kElided = "[observation elided]";

void replace_all(std::string& text, std::string_view from, const std::string& to) {
  std::size_t pos = 0;
  while ((pos = text.find(from, pos)) != std::string::npos) {
    text.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::string leading_words(std::string_view text, std::size_t n) {
  std::istringstream in{std::string(text)};
  std::string word, out;
  for (std::size_t i = 0; i < n && in >> word; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

struct HistoryEntry {
  std::string header;
  std::string observation;
};

std::vector<HistoryEntry> history_entries(const Trace& trace) {
  std::vector<HistoryEntry> entries;
  for (const auto& step : trace.steps) {
    if (!step.executed()) continue;
    HistoryEntry e;
    e.header = "Cycle " + std::to_string(step.cycle_index + 1) + " (" +
               std::string(to_string(step.role)) + "): " + action_to_json(*step.action).dump();
    e.observation = step.observation.text;
    entries.push_back(std::move(e));
  }
  return entries;
}

std::string join_entries(const std::vector<HistoryEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    if (!out.empty()) out += "\n\n";
    out += e.header;
    out += "\nObservation: ";
    out += e.observation;
  }
  return out;
}

const TraceStep* last_search(const Trace& trace) {
  for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
    if (it->executed() && it->action->type == ActionType::kSearch) return &*it;
  }
  return nullptr;
}

ScriptContext script_context(const TurnContext& turn, BackendRole role) {
  ScriptContext ctx;
  ctx.role = role;
  ctx.trace_id = turn.trace.trace_id;
  ctx.seed_query = turn.trace.seed_query;
  ctx.cycle = turn.cycle;
  ctx.reretrievals = turn.reretrievals;
  ctx.last_query = turn.trace.seed_query;
  if (const TraceStep* s = last_search(turn.trace)) {
    ctx.last_query = s->action->query;
    if (s->observation.retrieval) {
      for (const auto& hit : s->observation.retrieval->hits) {
        ctx.last_retrieved.push_back(hit.doc_id);
        const auto idx = turn.corpus.find(hit.doc_id);
        ctx.last_excerpts.push_back(
            idx ? leading_words(turn.corpus.document(*idx).text, kScriptExcerptWords) : "");
      }
    }
  }
  return ctx;
}

std::string fill_common(std::string text, const TurnContext& turn) {
  replace_all(text, "{{max_cycles}}", std::to_string(turn.config.max_cycles));
  replace_all(text, "{{cycle}}", std::to_string(turn.cycle + 1));
  replace_all(text, "{{seed_query}}", turn.trace.seed_query);
  replace_all(text, "{{history}}", render_history(turn.trace, turn.config.context_token_budget));
  return text;
}

// Throws UnparseableAction for replies that cannot be executed.
ProposalResult parse_reply(const std::string& raw, bool allow_approve, const Corpus& corpus) {
  ModelReply reply = parse_model_reply(raw, allow_approve);
  ProposalResult out;
  out.thought = std::move(reply.thought);
  out.raw_response = raw;
  if (reply.approve) {
    out.approved = true;
    return out;
  }
  if (!reply.action) throw Error(ErrorCode::kUnparseableAction, "reply carries no action");
  if (auto why = reply.action->violation(); !why.empty()) {
    throw Error(ErrorCode::kUnparseableAction, why);
  }
  for (const auto& id : reply.action->doc_ids) {
    if (!corpus.contains(id)) {
      throw Error(ErrorCode::kUnparseableAction, "action references unknown doc id " + id);
    }
  }
  out.action = std::move(*reply.action);
  return out;
}

ProposalResult propose_with_retry(ModelBackend& backend, ModelRequest request, bool allow_approve,
                                  const Corpus& corpus) {
  std::string raw = backend.complete(request);
  try {
    auto result = parse_reply(raw, allow_approve, corpus);
    result.prompt = request.messages;
    return result;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnparseableAction) throw;
    request.messages.push_back({"assistant", raw});
    request.messages.push_back({"user", std::string("Your previous reply could not be used: ") +
                                            e.what() + ". Reply again in the required form."});
    request.context.attempt = 1;
  }
  raw = backend.complete(request);
  try {
    auto result = parse_reply(raw, allow_approve, corpus);
    result.prompt = request.messages;
    return result;
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kUnparseableAction) throw;
    throw Error(ErrorCode::kUnparseableAction,
                backend.id() + " reply unusable after retry: " + e.what());
  }
}

std::string search_observation(const RetrievalResult& result, const Corpus& corpus) {
  if (result.hits.empty()) return "no documents matched";
  std::string out;
  for (const auto& hit : result.hits) {
    if (!out.empty()) out.push_back('\n');
    out += "[" + hit.doc_id + "] ";
    out += leading_words(corpus.document(*corpus.find(hit.doc_id)).text, kObservationExcerptWords);
  }
  return out;
}

RetrievalResult run_search(const Corpus& corpus, const std::string& query,
                           const SimulationConfig& config) {
  try {
    return retrieve(corpus, query, config.retrieval_depth, config.bm25);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptyQuery) throw;
    RetrievalResult empty;
    empty.query = query;
    empty.depth = config.retrieval_depth;
    return empty;
  }
}

// Fills the observation of an executed action step.
void execute(TraceStep& step, const Corpus& corpus, const SimulationConfig& config) {
  const AgentAction& action = *step.action;
  switch (action.type) {
    case ActionType::kSearch: {
      auto result = run_search(corpus, action.query, config);
      step.observation.text = search_observation(result, corpus);
      step.observation.retrieval = std::move(result);
      break;
    }
    case ActionType::kRerank:
      step.observation.text = "reranked " + std::to_string(action.doc_ids.size()) + " documents";
      break;
    case ActionType::kSummarize: {
      const auto report = verify_grounding(
          AgentAction::synthesize(action.text, action.doc_ids), corpus);
      step.grounding_confidence = report.token_coverage;
      step.observation.text = "summary recorded";
      break;
    }
    case ActionType::kSynthesize:
      step.grounding_confidence = grounding_confidence(step, corpus);
      step.observation.text = "answer submitted";
      break;
    case ActionType::kAbstain:
      step.observation.text = "abstained";
      break;
  }
}

std::string reretrieval_query(const std::string& base, const AgentAction& answer,
                              const GroundingReport& report, const StopwordSet& stopwords) {
  std::string query = base;
  std::size_t added = 0;
  std::set<std::string> used;
  for (const auto& token : content_tokens(answer.text, stopwords)) {
    if (added == 3) break;
    if (!report.uncovered_tokens.contains(token) || !used.insert(token).second) continue;
    query += " " + token;
    ++added;
  }
  return query;
}

std::vector<std::string> context_excerpt(const Trace& trace) {
  auto entries = history_entries(trace);
  std::vector<std::string> out;
  const std::size_t start =
      entries.size() > kContextExcerptEntries ? entries.size() - kContextExcerptEntries : 0;
  for (std::size_t i = start; i < entries.size(); ++i) {
    out.push_back(entries[i].header + "\nObservation: " + entries[i].observation);
  }
  return out;
}

}  // namespace

PromptTemplates PromptTemplates::builtin() {
  return {std::string(assets::analyst_system_v1()), std::string(assets::analyst_user_v1()),
          std::string(assets::critic_system_v1()), std::string(assets::critic_user_v1())};
}

std::string PromptTemplates::hash() const {
  std::string joined;
  for (const auto* part : {&analyst_system, &analyst_user, &critic_system, &critic_user}) {
    joined += *part;
    joined.push_back('\0');
  }
  return hex64(fnv1a64(joined));
}

Clock system_clock_ms() {
  return [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

Clock fixed_step_clock(std::int64_t start_ms, std::int64_t step_ms) {
  // State lives in the closure, so every copy restarts from start_ms.
  return [now = start_ms, step_ms]() mutable {
    const auto t = now;
    now += step_ms;
    return t;
  };
}

void SimulationConfig::validate() const {
  if (!analyst) throw Error(ErrorCode::kInvalidArgument, "simulation needs an analyst backend");
  if (critics.empty()) throw Error(ErrorCode::kInvalidArgument, "simulation needs at least one critic");
  for (const auto& c : critics) {
    if (!c) throw Error(ErrorCode::kInvalidArgument, "null critic backend");
  }
  if (max_cycles < 1) throw Error(ErrorCode::kInvalidArgument, "max_cycles must be >= 1");
  if (retrieval_depth < 1) throw Error(ErrorCode::kInvalidArgument, "retrieval_depth must be >= 1");
  if (explorations_per_seed < 1) {
    throw Error(ErrorCode::kInvalidArgument, "explorations_per_seed must be >= 1");
  }
  validation.validate();
}

std::string render_history(const Trace& trace, std::size_t token_budget) {
  auto entries = history_entries(trace);
  if (entries.empty()) return "(no actions yet)";
  for (auto& e : entries) {
    if (word_count(join_entries(entries)) <= token_budget) break;
    e.observation = std::string(kElided);
  }
  return join_entries(entries);
}

std::vector<ChatMessage> analyst_messages(const TurnContext& turn) {
  const auto& t = turn.config.templates;
  return {{"system", fill_common(t.analyst_system, turn)},
          {"user", fill_common(t.analyst_user, turn)}};
}

std::vector<ChatMessage> critic_messages(const TurnContext& turn, const std::string& proposer,
                                         const AgentAction& proposal) {
  const auto& t = turn.config.templates;
  std::string user = fill_common(t.critic_user, turn);
  replace_all(user, "{{proposer}}", proposer);
  replace_all(user, "{{proposal}}", action_to_json(proposal).dump());
  return {{"system", fill_common(t.critic_system, turn)}, {"user", std::move(user)}};
}

ProposalResult analyst_propose(ModelBackend& backend, const TurnContext& turn) {
  ModelRequest request;
  request.messages = analyst_messages(turn);
  request.temperature = turn.config.temperature;
  request.seed = turn.call_seed;
  request.context = script_context(turn, BackendRole::kAnalyst);
  return propose_with_retry(backend, std::move(request), false, turn.corpus);
}

ProposalResult critic_review(ModelBackend& backend, const AgentAction& proposal,
                             const std::string& proposer, const TurnContext& turn) {
  ModelRequest request;
  request.messages = critic_messages(turn, proposer, proposal);
  request.temperature = turn.config.temperature;
  request.seed = turn.call_seed;
  request.context = script_context(turn, BackendRole::kCritic);
  request.context.proposal = proposal;
  auto result = propose_with_retry(backend, std::move(request), true, turn.corpus);
  if (result.approved) result.action = proposal;
  return result;
}

JudgeResult judge_step(const std::vector<Candidate>& proposals, const ValidationConfig& config) {
  if (proposals.empty()) throw Error(ErrorCode::kInvalidArgument, "judge needs proposals");
  struct Group {
    std::size_t first = 0;
    std::size_t count = 0;
  };
  std::map<std::string, Group> groups;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    auto key = canonical_key(proposals[i].action);
    auto [it, inserted] = groups.try_emplace(key, Group{i, 0});
    if (inserted) order.push_back(key);
    ++it->second.count;
  }
  std::size_t best = 0;
  for (const auto& [key, g] : groups) best = std::max(best, g.count);

  // Plurality ties go to the analyst's class, then to the smallest key.
  const std::string analyst_key = order.front();
  std::string chosen_key;
  if (groups.at(analyst_key).count == best) {
    chosen_key = analyst_key;
  } else {
    for (const auto& [key, g] : groups) {
      if (g.count == best) {
        chosen_key = key;
        break;
      }
    }
  }

  JudgeResult out;
  out.divergence_score =
      1.0 - static_cast<double>(best) / static_cast<double>(proposals.size());
  out.flagged = out.divergence_score > config.theta;
  out.chosen = proposals[groups.at(chosen_key).first].action;
  for (const auto& key : order) out.candidates.push_back(proposals[groups.at(key).first]);
  return out;
}

std::string make_trace_id(const SeedRecord& seed, std::size_t exploration) {
  return seed.seed_id + "-x" + std::to_string(exploration);
}

SimulationResult run_trajectory(const SeedRecord& seed, const Corpus& corpus,
                                const SimulationConfig& config, std::size_t exploration) {
  config.validate();
  Clock clock = config.clock ? config.clock : system_clock_ms();

  SimulationResult result;
  Trace& trace = result.trace;
  trace.trace_id = make_trace_id(seed, exploration);
  trace.seed_id = seed.seed_id;
  trace.seed_query = seed.query;
  trace.analyst_id = config.analyst->id();
  trace.template_hash = config.templates.hash();

  Rng rng(config.rng_seed ^ fnv1a64(trace.trace_id), rng_stream::kSimulation);

  auto add_step = [&](TraceStep step) -> TraceStep& {
    step.trace_id = trace.trace_id;
    step.step_index = trace.steps.size();
    step.timestamp_ms = clock();
    trace.steps.push_back(std::move(step));
    return trace.steps.back();
  };

  std::size_t reretrievals = 0;
  bool terminated = false;
  try {
    for (std::size_t cycle = 0; cycle < config.max_cycles && !terminated; ++cycle) {
      TurnContext turn{trace, corpus, config, cycle, reretrievals, rng.next()};
      auto proposal = analyst_propose(*config.analyst, turn);
      {
        TraceStep s;
        s.cycle_index = cycle;
        s.role = AgentRole::kAnalyst;
        s.model_id = config.analyst->id();
        s.thought = proposal.thought;
        s.action = proposal.action;
        s.prompt = std::move(proposal.prompt);
        s.raw_response = std::move(proposal.raw_response);
        add_step(std::move(s));
      }

      bool consult = true;
      if (config.adaptive_consultation) {
        for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
          if (!it->executed()) continue;
          consult = !(it->grounding_confidence &&
                      !triggers_reretrieval(*it->grounding_confidence, config.validation));
          break;
        }
      }

      std::vector<Candidate> candidates{{config.analyst->id(), proposal.action}};
      if (consult) {
        std::vector<std::uint64_t> seeds;
        for (std::size_t i = 0; i < config.critics.size(); ++i) seeds.push_back(rng.next());
        std::vector<std::future<ProposalResult>> pending;
        for (std::size_t i = 0; i < config.critics.size(); ++i) {
          pending.push_back(std::async(
              config.critics.size() > 1 ? std::launch::async : std::launch::deferred, [&, i] {
                TurnContext critic_turn{trace, corpus, config, cycle, reretrievals, seeds[i]};
                return critic_review(*config.critics[i], proposal.action, config.analyst->id(),
                                     critic_turn);
              }));
        }
        // Collect every future before recording so no task outlives its captures.
        std::vector<ProposalResult> reviews;
        std::exception_ptr failure;
        for (auto& f : pending) {
          try {
            reviews.push_back(f.get());
          } catch (...) {
            if (!failure) failure = std::current_exception();
          }
        }
        if (failure) std::rethrow_exception(failure);
        for (std::size_t i = 0; i < reviews.size(); ++i) {
          auto& review = reviews[i];
          TraceStep s;
          s.cycle_index = cycle;
          s.role = AgentRole::kCritic;
          s.model_id = config.critics[i]->id();
          s.thought = review.approved ? "approve" : review.thought;
          s.action = review.action;
          s.prompt = std::move(review.prompt);
          s.raw_response = std::move(review.raw_response);
          add_step(std::move(s));
          candidates.push_back({config.critics[i]->id(), review.action});
        }
      }

      const JudgeResult verdict = judge_step(candidates, config.validation);
      TraceStep judged;
      judged.cycle_index = cycle;
      judged.role = AgentRole::kJudge;
      judged.model_id = "judge";
      judged.action = verdict.chosen;
      judged.divergence_score = verdict.divergence_score;
      judged.status = verdict.flagged ? StepStatus::kFlagged : StepStatus::kAccepted;
      {
        std::ostringstream thought;
        thought << candidates.size() << " proposals, " << verdict.candidates.size()
                << " distinct";
        if (!consult) thought << "; critics skipped after a well-grounded cycle";
        judged.thought = thought.str();
      }
      if (verdict.flagged) {
        auto item = make_review_item(trace.trace_id, trace.steps.size(), trace.seed_query,
                                     context_excerpt(trace), verdict.candidates,
                                     verdict.divergence_score, config.validation);
        judged.review_item_id = item.item_id;
        result.review_items.push_back(std::move(item));
      }
      execute(judged, corpus, config);
      TraceStep& step = add_step(std::move(judged));

      const ActionType type = step.action->type;
      if (type == ActionType::kAbstain) {
        trace.outcome = Outcome::kAbstained;
        terminated = true;
      } else if (type == ActionType::kSynthesize) {
        trace.outcome = Outcome::kAnswered;
        terminated = true;
        if (triggers_reretrieval(*step.grounding_confidence, config.validation)) {
          if (step.status != StepStatus::kFlagged) step.status = StepStatus::kAutoReretrieved;
          if (reretrievals < config.validation.max_reretrievals && cycle + 1 < config.max_cycles) {
            const auto report = verify_grounding(*step.action, corpus);
            const TraceStep* prior = last_search(trace);
            const std::string base = prior ? prior->action->query : trace.seed_query;
            const double confidence = *step.grounding_confidence;
            TraceStep s;
            s.cycle_index = cycle;
            s.role = AgentRole::kSystem;
            s.model_id = "system";
            std::ostringstream thought;
            thought << "grounding confidence " << confidence << " below "
                    << config.validation.grounding_threshold << "; re-retrieving";
            s.thought = thought.str();
            s.action = AgentAction::search(
                reretrieval_query(base, *step.action, report, corpus.stopwords()));
            execute(s, corpus, config);
            add_step(std::move(s));
            ++reretrievals;
            terminated = false;
          }
        }
      }
    }
    if (!terminated) {
      TraceStep s;
      s.cycle_index = config.max_cycles - 1;
      s.role = AgentRole::kSystem;
      s.model_id = "system";
      s.thought = "cycle limit reached without a final answer";
      s.action = AgentAction::abstain("cycle limit of " + std::to_string(config.max_cycles) +
                                      " reached without sufficient evidence");
      execute(s, corpus, config);
      add_step(std::move(s));
      trace.outcome = Outcome::kAbstained;
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBackendError && e.code() != ErrorCode::kUnparseableAction) throw;
    TraceStep s;
    s.cycle_index = std::min(trace.steps.empty() ? 0 : trace.steps.back().cycle_index,
                             config.max_cycles - 1);
    s.role = AgentRole::kSystem;
    s.model_id = "system";
    s.thought = std::string(to_string(e.code())) + ": " + e.what();
    s.status = StepStatus::kDiscarded;
    result.error = s.thought;
    add_step(std::move(s));
    trace.outcome = Outcome::kDiscarded;
    result.review_items.clear();
  }
  result.trajectory = project_trajectory(trace, seed);
  return result;
}

}  // namespace agentsim
