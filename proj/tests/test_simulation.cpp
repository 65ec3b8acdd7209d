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

#include "doctest.h"

#include <atomic>
#include <thread>

#include "httplib.h"
#include <nlohmann/json.hpp>

#include "agentsim/error.hpp"
#include "agentsim/simulation.hpp"
#include "support/test_util.hpp"

using namespace agentsim;
using testutil::rule;
using testutil::scripted;

namespace {

SimulationConfig base_config(std::shared_ptr<ModelBackend> analyst,
                             std::vector<std::shared_ptr<ModelBackend>> critics = {}) {
  SimulationConfig config;
  config.analyst = std::move(analyst);
  config.critics = critics.empty()
                       ? std::vector<std::shared_ptr<ModelBackend>>{scripted("critic", {rule(std::nullopt, {testutil::kApprove})})}
                       : std::move(critics);
  config.clock = fixed_step_clock(1000, 10);
  return config;
}

SeedRecord seed(const std::string& query) {
  SeedRecord s;
  s.seed_id = "seed-1";
  s.query = query;
  return s;
}

ScriptRule at_cycle(std::size_t cycle, std::string response) {
  auto r = rule(BackendRole::kAnalyst, {std::move(response)});
  r.cycle = cycle;
  return r;
}

}  // namespace

TEST_CASE("judge computes divergence and plurality") {
  const ValidationConfig v;
  const auto a = AgentAction::search("a");
  const auto b = AgentAction::search("b");
  auto r = judge_step({{"m0", a}, {"m1", a}, {"m2", b}}, v);
  CHECK(r.divergence_score == doctest::Approx(1.0 / 3.0));
  CHECK_FALSE(r.flagged);
  CHECK(r.chosen == a);
  r = judge_step({{"m0", a}, {"m1", b}, {"m2", AgentAction::search("c")}}, v);
  CHECK(r.divergence_score == doctest::Approx(2.0 / 3.0));
  CHECK(r.flagged);
  CHECK(r.chosen == a);  // tie goes to the analyst
  CHECK(r.candidates.size() == 3);
  r = judge_step({{"m0", b}, {"m1", a}}, v);
  CHECK(r.divergence_score == 0.5);
  CHECK(r.chosen == b);
}

TEST_CASE("a grounded run answers and records every turn") {
  const Corpus corpus = testutil::tiny_corpus();
  auto analyst = scripted("analyst", {at_cycle(0, testutil::search_reply("{{seed_query}}")),
                                      rule(BackendRole::kAnalyst, {testutil::synth_reply("{{excerpt1}}", "{{doc1}}")})});
  const auto config = base_config(analyst);
  const auto r = run_trajectory(seed("river delta"), corpus, config);
  CHECK(r.error.empty());
  CHECK(r.trace.outcome == Outcome::kAnswered);
  CHECK(r.trace.trace_id == "seed-1-x0");
  CHECK(r.trace.template_hash == config.templates.hash());
  for (std::size_t i = 0; i < r.trace.steps.size(); ++i) {
    CHECK(r.trace.steps[i].step_index == i);
    if (r.trace.steps[i].role == AgentRole::kAnalyst || r.trace.steps[i].role == AgentRole::kCritic) {
      CHECK_FALSE(r.trace.steps[i].prompt.empty());
      CHECK_FALSE(r.trace.steps[i].raw_response.empty());
    }
    if (r.trace.steps[i].role == AgentRole::kJudge) CHECK(r.trace.steps[i].divergence_score.has_value());
  }
  REQUIRE(r.trajectory.final);
  CHECK(r.trajectory.final->cited_doc_ids.front() == retrieve(corpus, "river delta", 10).hits.front().doc_id);
  CHECK(r.trajectory.tool_calls.size() == 2);
  CHECK(r.review_items.empty());
}

TEST_CASE("critic disagreement flags the step and yields a review item") {
  const Corpus corpus = testutil::tiny_corpus();
  auto analyst = scripted("analyst", {at_cycle(0, testutil::search_reply("river")),
                                      rule(BackendRole::kAnalyst, {testutil::synth_reply("{{excerpt1}}", "{{doc1}}")})});
  auto c1 = scripted("c1", {rule(BackendRole::kCritic, {testutil::search_reply("delta"), testutil::kApprove})});
  auto c2 = scripted("c2", {rule(BackendRole::kCritic, {testutil::search_reply("wetlands"), testutil::kApprove})});
  const auto r = run_trajectory(seed("river delta"), corpus, base_config(analyst, {c1, c2}));
  REQUIRE(r.review_items.size() == 1);
  const auto& item = r.review_items[0];
  CHECK(item.divergence_score == doctest::Approx(2.0 / 3.0));
  CHECK(item.candidates.size() == 3);
  CHECK(r.trace.steps[item.step_index].status == StepStatus::kFlagged);
  CHECK(r.trace.steps[item.step_index].review_item_id == item.item_id);
  CHECK(r.trace.has_pending_review());
}

TEST_CASE("runs are reproducible and differ by trace id") {
  const Corpus corpus = testutil::tiny_corpus();
  auto analyst = scripted("analyst", {at_cycle(0, testutil::search_reply("{{seed_query}}")),
                                      rule(BackendRole::kAnalyst, {testutil::synth_reply("{{excerpt1}}", "{{doc1}}")})});
  const auto config = base_config(analyst);
  const auto a = run_trajectory(seed("spring rain"), corpus, config);
  const auto b = run_trajectory(seed("spring rain"), corpus, config);
  CHECK(trace_to_json(a.trace).dump() == trace_to_json(b.trace).dump());
  const auto c = run_trajectory(seed("spring rain"), corpus, config, 1);
  CHECK(c.trace.trace_id == "seed-1-x1");
}

TEST_CASE("cycle limit forces an abstention") {
  const Corpus corpus = testutil::tiny_corpus();
  auto config = base_config(scripted("analyst", {rule(BackendRole::kAnalyst, {testutil::search_reply("rain")})}));
  config.max_cycles = 3;
  const auto r = run_trajectory(seed("rain"), corpus, config);
  CHECK(r.trace.outcome == Outcome::kAbstained);
  CHECK(r.trace.analyst_proposals() == 3);
  CHECK(r.trace.steps.back().role == AgentRole::kSystem);
  CHECK(r.trace.steps.back().cycle_index == 2);
}

TEST_CASE("low grounding triggers re-retrieval with uncovered terms") {
  const Corpus corpus = testutil::tiny_corpus();
  auto weak = rule(BackendRole::kAnalyst, {testutil::synth_reply("zebra airport quokka", "d1")});
  weak.reretrievals = 0;
  auto config = base_config(scripted("analyst", {at_cycle(0, testutil::search_reply("river")), weak,
                                                 rule(BackendRole::kAnalyst, {testutil::synth_reply("river", "d1")})}));
  const auto r = run_trajectory(seed("river"), corpus, config);
  CHECK(r.trace.outcome == Outcome::kAnswered);
  bool saw_status = false;
  bool saw_query = false;
  for (const auto& s : r.trace.steps) {
    saw_status |= s.status == StepStatus::kAutoReretrieved;
    if (s.role == AgentRole::kSystem && s.action && s.action->type == ActionType::kSearch) {
      saw_query = true;
      CHECK(s.action->query == "river zebra airport quokka");
    }
  }
  CHECK(saw_status);
  CHECK(saw_query);
}

TEST_CASE("re-retrieval stops at the configured maximum") {
  const Corpus corpus = testutil::tiny_corpus();
  auto config = base_config(scripted("analyst", {at_cycle(0, testutil::search_reply("river")),
                                                 rule(BackendRole::kAnalyst, {testutil::synth_reply("zebra", "d1")})}));
  config.validation.max_reretrievals = 1;
  const auto r = run_trajectory(seed("river"), corpus, config);
  std::size_t system_searches = 0;
  for (const auto& s : r.trace.steps) system_searches += s.role == AgentRole::kSystem && s.action && s.action->type == ActionType::kSearch;
  CHECK(system_searches == 1);
  CHECK(r.trace.outcome == Outcome::kAnswered);
}

TEST_CASE("backend failures discard the trajectory") {
  const Corpus corpus = testutil::tiny_corpus();
  auto config = base_config(scripted("analyst", {rule(BackendRole::kAnalyst, {"gibberish"})}));
  const auto r = run_trajectory(seed("river"), corpus, config);
  CHECK(r.trace.outcome == Outcome::kDiscarded);
  CHECK_FALSE(r.error.empty());
  CHECK(r.trace.steps.back().status == StepStatus::kDiscarded);

  auto unknown = base_config(scripted("analyst", {rule(BackendRole::kAnalyst, {testutil::synth_reply("x", "d999")})}));
  CHECK(run_trajectory(seed("river"), corpus, unknown).trace.outcome == Outcome::kDiscarded);

  auto silent = base_config(scripted("analyst", {}));
  CHECK(run_trajectory(seed("river"), corpus, silent).trace.outcome == Outcome::kDiscarded);
}

TEST_CASE("analyst_propose retries once then fails") {
  const Corpus corpus = testutil::tiny_corpus();
  auto flaky = scripted("analyst", {[] {
                                      auto r = rule(BackendRole::kAnalyst, {"nonsense"});
                                      return r;
                                    }()});
  const auto config = base_config(flaky);
  Trace trace;
  trace.seed_query = "river";
  TurnContext turn{trace, corpus, config, 0, 0, 1};
  try {
    analyst_propose(*flaky, turn);
    FAIL("expected UnparseableAction");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kUnparseableAction);
  }
}

TEST_CASE("adaptive consultation skips critics after a grounded summary") {
  const Corpus corpus = testutil::tiny_corpus();
  auto analyst = scripted("analyst", {at_cycle(0, testutil::search_reply("river")),
                                      at_cycle(1, "Thought: s\nAction: {\"type\":\"summarize\",\"doc_ids\":[\"d1\"],\"summary\":\"river delta floods\"}"),
                                      rule(BackendRole::kAnalyst, {testutil::synth_reply("river delta", "d1")})});
  auto critic = scripted("critic", {rule(BackendRole::kCritic, {testutil::kApprove})});
  auto config = base_config(analyst, {critic});
  config.adaptive_consultation = true;
  const auto r = run_trajectory(seed("river"), corpus, config);
  std::size_t critic_steps = 0;
  for (const auto& s : r.trace.steps) critic_steps += s.role == AgentRole::kCritic;
  CHECK(critic_steps == 2);  // cycles 0 and 1 only
}

TEST_CASE("history rendering elides the oldest observations first") {
  Trace t;
  for (int i = 0; i < 3; ++i) {
    TraceStep s;
    s.role = AgentRole::kJudge;
    s.step_index = static_cast<std::size_t>(i);
    s.action = AgentAction::search("q" + std::to_string(i));
    s.observation.text = "word word word word word word word word word word";
    t.steps.push_back(s);
  }
  CHECK(render_history(Trace{}, 100) == "(no actions yet)");
  const auto full = render_history(t, 100000);
  CHECK(full.find("[observation elided]") == std::string::npos);
  const auto tight = render_history(t, word_count(full) - 5);
  const auto first = tight.find("[observation elided]");
  REQUIRE(first != std::string::npos);
  CHECK(tight.find("[observation elided]", first + 1) == std::string::npos);
  CHECK(first < tight.find("q1"));
}

TEST_CASE("script templates substitute context") {
  ScriptContext ctx;
  ctx.seed_query = "say \"hi\"";
  ctx.cycle = 2;
  ctx.last_retrieved = {"d1", "d2"};
  CHECK(render_script_response("{{seed_query}}|{{cycle}}|{{doc2}}", ctx) == R"(say \"hi\"|2|d2)");
  ScriptRule r;
  r.responses = {"x"};
  r.query_contains = "HI";
  CHECK(r.matches(ctx));
  r.min_cycle = 3;
  CHECK_FALSE(r.matches(ctx));
}

TEST_CASE("config validation") {
  SimulationConfig config;
  CHECK_THROWS_AS(config.validate(), Error);  // no analyst
  config.analyst = scripted("a", {});
  config.critics = {scripted("c", {})};
  config.validate();
  config.max_cycles = 0;
  CHECK_THROWS_AS(config.validate(), Error);
}

TEST_CASE("fixed-step clock copies restart from the start") {
  auto clock = fixed_step_clock(5, 2);
  CHECK(clock() == 5);
  CHECK(clock() == 7);
  auto copy = fixed_step_clock(5, 2);
  CHECK(copy() == 5);
}

TEST_CASE("remote chat backend posts messages and reads the first choice") {
  httplib::Server server;
  std::atomic<int> calls{0};
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    if (++calls == 1) {
      res.status = 503;
      return;
    }
    const auto body = nlohmann::json::parse(req.body);
    CHECK(body.at("model") == "m");
    CHECK(body.at("messages").size() == 1);
    CHECK(body.at("seed") == 9);
    nlohmann::json reply = {{"choices", {{{"message", {{"role", "assistant"}, {"content", "Verdict: approve"}}}}}}};
    res.set_content(reply.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  BackendConfig bc;
  bc.id = "remote";
  bc.kind = "remote_chat";
  bc.remote.id = "remote";
  bc.remote.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  bc.remote.model_name = "m";
  bc.remote.retry.backoff_initial_ms = 1;
  auto backend = make_backend(bc);
  ModelRequest req;
  req.messages = {{"user", "hello"}};
  req.seed = 9;
  const auto text = backend->complete(req);
  server.stop();
  t.join();
  CHECK(text == "Verdict: approve");
  CHECK(calls.load() == 2);
  CHECK(backend->id() == "remote");
}
