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

#include "agentsim/dataset_io.hpp"
#include "agentsim/error.hpp"
#include "agentsim/simulation.hpp"
#include "support/test_util.hpp"

using namespace agentsim;
using testutil::rule;

namespace {

struct Runs {
  std::vector<Trace> traces;
  std::vector<Trajectory> trajectories;
};

Runs simulate(const Corpus& corpus, const std::vector<std::string>& queries) {
  auto first = rule(BackendRole::kAnalyst, {testutil::search_reply("{{seed_query}}")});
  first.cycle = 0;
  auto refuse = rule(BackendRole::kAnalyst, {testutil::abstain_reply("nothing relevant")});
  refuse.query_contains = "birds";
  SimulationConfig config;
  config.analyst = testutil::scripted("analyst", {first, refuse, rule(BackendRole::kAnalyst, {testutil::synth_reply("{{excerpt1}}", "{{doc1}}")})});
  config.critics = {testutil::scripted("critic", {rule(std::nullopt, {testutil::kApprove})})};
  config.clock = fixed_step_clock(0, 1);
  Runs out;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    SeedRecord seed;
    seed.seed_id = "s" + std::to_string(i);
    seed.query = queries[i];
    const auto r = run_trajectory(seed, corpus, config);
    out.traces.push_back(r.trace);
    out.trajectories.push_back(r.trajectory);
  }
  return out;
}

}  // namespace

TEST_CASE("trace lines carry one step each plus header fields") {
  const Corpus corpus = testutil::tiny_corpus();
  const auto runs = simulate(corpus, {"river delta"});
  const auto lines = trace_lines(runs.traces[0]);
  CHECK(lines.size() == runs.traces[0].steps.size());
  const auto j = nlohmann::json::parse(lines[0]);
  CHECK(j.at("schema_version") == kDatasetSchemaVersion);
  CHECK(j.at("trace_id") == runs.traces[0].trace_id);
  CHECK(j.at("seed_query") == "river delta");
}

TEST_CASE("file round trips") {
  const Corpus corpus = testutil::tiny_corpus();
  const auto runs = simulate(corpus, {"river delta", "wetlands birds", "atlanta"});
  const auto dir = testutil::fresh_dir("dataset-files");
  write_traces(runs.traces, dir / "traces.jsonl.gz");
  CHECK(read_traces(dir / "traces.jsonl.gz") == runs.traces);
  write_trajectories(runs.trajectories, dir / "trajectories.jsonl");
  CHECK(read_trajectories(dir / "trajectories.jsonl") == runs.trajectories);
  const auto pairs = extract_supervised_pairs(runs.traces, corpus);
  REQUIRE(pairs.size() == 3);
  CHECK(pairs[1].abstained);
  CHECK(pairs[0].documents.front().first == runs.trajectories[0].final->cited_doc_ids.front());
  CHECK_FALSE(pairs[0].reasoning_chain.empty());
  write_supervised(pairs, dir / "supervised.jsonl");
  CHECK(read_supervised(dir / "supervised.jsonl") == pairs);
}

TEST_CASE("pending reviews block export") {
  const Corpus corpus = testutil::tiny_corpus();
  auto runs = simulate(corpus, {"river delta"});
  runs.traces[0].steps[1].status = StepStatus::kFlagged;
  const auto dir = testutil::fresh_dir("dataset-pending");
  try {
    write_traces(runs.traces, dir / "t.jsonl");
    FAIL("expected PendingReviewItems");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kPendingReviewItems);
  }
}

TEST_CASE("sharded dataset skips discarded traces") {
  const Corpus corpus = testutil::tiny_corpus();
  auto runs = simulate(corpus, {"river delta", "atlanta", "spring rain"});
  runs.traces[1].outcome = Outcome::kDiscarded;
  runs.trajectories[1].outcome = Outcome::kDiscarded;
  const auto dir = testutil::fresh_dir("dataset-shards");
  const auto counts = write_dataset(dir, runs.traces, runs.trajectories, corpus, 4);
  CHECK(counts.trajectories == 2);
  CHECK(counts.supervised == 2);
  CHECK(shard_files(dir / "traces").size() == (counts.trace_lines + 3) / 4);
  CHECK(shard_files(dir / "traces").front().filename() == "part-00000.jsonl.gz");
  const auto back = read_dataset(dir);
  CHECK(back.traces.size() == 2);
  CHECK(back.traces[0] == runs.traces[0]);
  CHECK(back.traces[1] == runs.traces[2]);
  CHECK(unresolved_doc_ids(back, corpus).empty());

  const Corpus other = build_index({{"zz", "unrelated", {}}});
  CHECK_FALSE(unresolved_doc_ids(back, other).empty());

  // Rewriting replaces rather than appends.
  write_dataset(dir, runs.traces, runs.trajectories, corpus, 4);
  CHECK(read_dataset(dir).traces.size() == 2);
}

TEST_CASE("sharded writer rolls over at the shard size") {
  const auto dir = testutil::fresh_dir("dataset-writer");
  ShardedWriter w(dir, 2);
  for (int i = 0; i < 5; ++i) w.write_line("{\"i\":" + std::to_string(i) + "}");
  w.close();
  CHECK(w.lines() == 5);
  CHECK(w.files().size() == 3);
}
