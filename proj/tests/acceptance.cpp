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

// Acceptance suite: one PASS/FAIL line per criterion, with wall time checked
// against each criterion's budget. Exit status is non-zero when any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "agentsim/config.hpp"
#include "agentsim/dataset_io.hpp"
#include "agentsim/embedding.hpp"
#include "agentsim/jsonl.hpp"
#include "agentsim/kmeans.hpp"
#include "agentsim/metrics.hpp"
#include "agentsim/pipeline.hpp"
#include "agentsim/review_queue.hpp"
#include "agentsim/seeding.hpp"
#include "agentsim/simulation.hpp"
#include "agentsim/stats.hpp"
#include "agentsim/validation.hpp"
#include "oracles.hpp"
#include "support/test_util.hpp"
#include "synth/synthetic.hpp"

namespace fs = std::filesystem;
using namespace agentsim;

namespace {

// Collects failed checks; the criterion passes when none failed.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ = failed_ || !ok;
  }
  void note(const std::string& detail) { notes_.push_back(detail); }
  bool failed() const { return failed_; }
  std::string summary() const {
    std::string s;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
    for (const auto& n : notes_) s += (s.empty() ? "" : "; ") + n;
    return s;
  }

 private:
  bool failed_ = false;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- divergence -------------------------------------------------------------

void divergence_exactness(Checks& c) {
  const ValidationConfig config;  // theta 0.4
  std::size_t partitions = 0;
  for (const int n : {2, 3, 5}) {
    for (const auto& labels : oracle::set_partitions(n)) {
      std::vector<Candidate> proposals;
      std::map<int, int> block_sizes;
      for (int i = 0; i < n; ++i) {
        proposals.push_back({"model-" + std::to_string(i),
                             AgentAction::search("choice " + std::to_string(labels[i]))});
        ++block_sizes[labels[i]];
      }
      int plurality = 0;
      for (const auto& [_, size] : block_sizes) plurality = std::max(plurality, size);
      const double expected = 1.0 - static_cast<double>(plurality) / static_cast<double>(n);
      const auto judged = judge_step(proposals, config);
      c.expect(std::abs(judged.divergence_score - expected) <= 1e-12,
               "DS mismatch for n=" + std::to_string(n));
      c.expect(judged.flagged == (expected > 0.4), "flag mismatch for n=" + std::to_string(n));
      c.expect(judged.candidates.size() == block_sizes.size(), "candidate count mismatch");
      ++partitions;
    }
  }
  // 3 of 5 agreeing sits exactly on the threshold and must not be flagged.
  std::vector<Candidate> edge;
  for (int i = 0; i < 5; ++i) {
    edge.push_back({"m" + std::to_string(i), AgentAction::search(i < 3 ? "same" : "other " + std::to_string(i))});
  }
  c.expect(!judge_step(edge, config).flagged, "DS == 0.4 must not flag");
  c.note(std::to_string(partitions) + " partitions");
}

// --- grounding --------------------------------------------------------------

void grounding_exactness(Checks& c) {
  const auto stop = testutil::stopword_copy();
  const std::vector<std::string> vocab = {
      "river", "delta", "Flood", "spring", "rain",  "wetland", "bird",  "water", "atlanta", "flight",
      "42",    "x7",    "mud",   "reed",   "heron", "salt",    "tide",  "basin", "levee",   "silt"};
  const std::vector<std::string> fillers = {"the", "and", "of", "is", "a", "which", ",", ".", "!"};
  std::uint64_t state = 12345;
  const auto next = [&](std::uint64_t n) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return (state >> 33) % n;
  };
  const auto phrase = [&](std::size_t words) {
    std::string s;
    for (std::size_t w = 0; w < words; ++w) {
      s += next(3) == 0 ? fillers[next(fillers.size())] : vocab[next(vocab.size())];
      s += next(4) == 0 ? "," : " ";
    }
    return s;
  };

  for (int i = 0; i < 50; ++i) {
    std::string answer = i % 10 == 0 ? "the and of which" : phrase(1 + next(10));
    std::vector<std::string> evidence;
    for (std::size_t e = 0; e <= next(3); ++e) evidence.push_back(phrase(next(15)));
    const auto expected = oracle::token_coverage(answer, evidence, stop);
    const auto got = verify_grounding(AgentAction::synthesize(answer, {"doc"}), evidence,
                                      default_stopwords());
    const std::string tag = "pair " + std::to_string(i);
    c.expect(got.token_coverage == expected.coverage, tag + " coverage");
    c.expect(std::set<std::string>(got.covered_tokens.begin(), got.covered_tokens.end()) ==
                 expected.covered,
             tag + " covered set");
    c.expect(std::set<std::string>(got.uncovered_tokens.begin(), got.uncovered_tokens.end()) ==
                 expected.uncovered,
             tag + " uncovered set");
    c.expect(got.vacuous == (expected.covered.empty() && expected.uncovered.empty()), tag + " vacuous");
  }

  // Scripted run whose answers quote the top document; one topic refuses.
  const Corpus corpus = testutil::tiny_corpus();
  ScriptRule refuse = testutil::rule(BackendRole::kAnalyst, {testutil::abstain_reply("not enough evidence")});
  refuse.query_contains = "birds";
  refuse.cycle = 1;
  ScriptRule first = testutil::rule(BackendRole::kAnalyst, {testutil::search_reply("{{seed_query}}")});
  first.cycle = 0;
  ScriptRule answer = testutil::rule(BackendRole::kAnalyst, {testutil::synth_reply("{{excerpt1}}", "{{doc1}}")});
  answer.min_cycle = 1;

  SimulationConfig config;
  config.analyst = testutil::scripted("analyst", {refuse, first, answer});
  config.critics = {testutil::scripted("critic", {testutil::rule(std::nullopt, {testutil::kApprove})})};
  config.clock = fixed_step_clock(0, 1);

  std::vector<Trajectory> trajectories;
  std::size_t expected_refusals = 0;
  const std::vector<std::string> queries = {"river delta flooding", "atlanta flights", "wetlands birds",
                                            "spring rain", "airport atlanta", "migrating birds water"};
  for (std::size_t i = 0; i < queries.size(); ++i) {
    SeedRecord seed;
    seed.seed_id = "s" + std::to_string(i);
    seed.query = queries[i];
    const auto result = run_trajectory(seed, corpus, config);
    c.expect(result.error.empty(), "simulation error: " + result.error);
    trajectories.push_back(result.trajectory);
    if (queries[i].find("birds") != std::string::npos) ++expected_refusals;
    if (result.trajectory.final && !result.trajectory.final->abstained) {
      std::vector<std::string> texts;
      for (const auto& id : result.trajectory.final->cited_doc_ids) {
        texts.push_back(corpus.document(*corpus.find(id)).text);
      }
      c.expect(oracle::token_coverage(result.trajectory.final->answer, texts, stop).coverage >= 0.3,
               "answer below threshold by oracle");
    }
  }
  const auto rate = grounding_rate(trajectories, corpus);
  c.expect(rate.rate() == 1.0, "grounding rate " + fmt(rate.rate()));
  c.expect(rate.refusals == expected_refusals, "refusal count");
  c.expect(rate.substantive == queries.size() - expected_refusals, "refusals in denominator");
  c.note("50 pairs; rate " + fmt(rate.rate(), 3) + " over " + std::to_string(rate.substantive) +
         " answers, " + std::to_string(rate.refusals) + " refusals excluded");
}

// --- seeding ----------------------------------------------------------------

struct SyntheticPool {
  synth::SyntheticData data;
  Corpus corpus;
  std::vector<EmbeddingVector> embeddings;
};

SyntheticPool make_pool(const synth::SyntheticSpec& spec) {
  auto data = synth::generate(spec);
  std::set<std::string> seen;
  std::vector<std::string> unique;
  for (const auto& q : data.queries) {
    if (seen.insert(q).second) unique.push_back(q);
  }
  data.queries = unique;
  Corpus corpus = build_index(data.documents);
  HashingEmbedder embedder(256);
  auto embeddings = embedder.embed(data.queries);
  return {std::move(data), std::move(corpus), std::move(embeddings)};
}

double brute_force_coverage(std::span<const EmbeddingVector> seeds, const std::vector<EmbeddingVector>& centroids) {
  std::set<std::size_t> covered;
  for (const auto& s : seeds) {
    std::size_t best = 0;
    double best_d = 1e300;
    for (std::size_t k = 0; k < centroids.size(); ++k) {
      double d = 0.0;
      for (std::size_t i = 0; i < s.dim(); ++i) d += (s[i] - centroids[k][i]) * (s[i] - centroids[k][i]);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    covered.insert(best);
  }
  return static_cast<double>(covered.size()) / static_cast<double>(centroids.size());
}

void seeding_coverage(Checks& c) {
  synth::SyntheticSpec spec;  // 2000 docs, 20 topics, 300 queries
  const auto pool = make_pool(spec);
  c.expect(pool.corpus.size() == 2000, "corpus size");

  std::vector<double> aware_cov;
  std::vector<double> random_cov;
  std::size_t redundancy_wins = 0;
  for (std::uint64_t run = 0; run < 5; ++run) {
    const std::uint64_t seed = 1000 + run;
    const auto assignment = cluster_queries(pool.embeddings, 20, seed);
    std::map<SeedingStrategy, SeedingMetricsReport> reports;
    for (const auto strategy : {SeedingStrategy::kCorpusAware, SeedingStrategy::kRandom}) {
      SeedingConfig config;
      config.num_clusters = 20;
      config.budget = 50;
      config.strategy = strategy;
      config.rng_seed = seed;
      const auto set = select_seeds(pool.data.queries, pool.embeddings, assignment, pool.corpus, config);
      c.expect(set.seeds.size() == 50, "budget not met");
      std::vector<std::string> queries;
      std::vector<EmbeddingVector> embs;
      for (const auto q : set.query_indices) {
        queries.push_back(pool.data.queries[q]);
        embs.push_back(pool.embeddings[q]);
      }
      const auto report = seeding_metrics(queries, embs, assignment, pool.corpus);
      c.expect(report.cluster_coverage == brute_force_coverage(embs, assignment.centroids),
               "coverage disagrees with nearest-centroid check");
      reports[strategy] = report;
    }
    aware_cov.push_back(reports[SeedingStrategy::kCorpusAware].cluster_coverage);
    random_cov.push_back(reports[SeedingStrategy::kRandom].cluster_coverage);
    if (reports[SeedingStrategy::kCorpusAware].document_redundancy <=
        reports[SeedingStrategy::kRandom].document_redundancy) {
      ++redundancy_wins;
    }
  }
  for (double v : aware_cov) c.expect(v == 1.0, "corpus_aware coverage " + fmt(v, 3));
  double random_mean = 0.0;
  for (double v : random_cov) random_mean += v / 5.0;
  c.expect(random_mean < 1.0, "random mean coverage " + fmt(random_mean, 3));
  c.expect(redundancy_wins >= 4, "redundancy wins " + std::to_string(redundancy_wins) + "/5");
  c.note("corpus_aware coverage 1.000 x5; random mean " + fmt(random_mean, 3) +
         "; lower redundancy in " + std::to_string(redundancy_wins) + "/5 runs");
}

// --- seed selection vs transcription ------------------------------------------

void seed_selection_oracle(Checks& c) {
  const auto stop = testutil::stopword_copy();
  struct Params {
    double tau;
    double lambda;
    std::size_t budget;
  };
  const std::vector<Params> grid = {{0.4, 0.7, 10}, {0.0, 1.0, 30}, {0.9, 0.3, 12}, {0.5, 0.0, 20}, {0.4, 0.7, 40}};
  std::size_t instances = 0;
  for (std::uint64_t s = 1; s <= 8; ++s) {
    synth::SyntheticSpec spec;
    spec.topics = 4;
    spec.subtopics = 2;
    spec.documents = 120;
    spec.queries = 30;
    spec.doc_words = 30;
    spec.topic_vocabulary = 15;
    spec.subtopic_vocabulary = 5;
    spec.filler_vocabulary = 40;
    spec.seed = s;
    const auto pool = make_pool(spec);
    std::vector<std::pair<std::string, std::string>> docs;
    for (const auto& d : pool.data.documents) docs.emplace_back(d.doc_id, d.text);
    std::vector<std::vector<std::string>> footprints;
    for (const auto& q : pool.data.queries) {
      std::vector<std::string> ids;
      for (const auto& hit : oracle::bm25_rank(docs, stop, q, 10)) ids.push_back(hit.doc_id);
      footprints.push_back(ids);
    }
    std::vector<std::vector<double>> raw;
    for (const auto& e : pool.embeddings) raw.emplace_back(e.values().begin(), e.values().end());

    const std::size_t k = 1 + (s % 4);
    const auto assignment = cluster_queries(pool.embeddings, k, s);
    for (const auto& p : grid) {
      SeedingConfig config;
      config.num_clusters = k;
      config.tau = p.tau;
      config.lambda = p.lambda;
      config.budget = p.budget;
      config.rng_seed = s;
      const auto set = select_seeds(pool.data.queries, pool.embeddings, assignment, pool.corpus, config);
      const auto expected = oracle::corpus_aware_selection(pool.data.queries, raw, assignment.labels,
                                                           assignment.k(), footprints, p.tau, p.lambda, p.budget);
      const std::string tag = "instance " + std::to_string(instances);
      c.expect(set.seeds.size() == expected.size(), tag + " size");
      for (std::size_t i = 0; i < std::min(set.seeds.size(), expected.size()); ++i) {
        c.expect(set.seeds[i].query == pool.data.queries[expected[i].query_index], tag + " pick " + std::to_string(i));
        c.expect(set.seeds[i].novelty == expected[i].novelty, tag + " novelty " + std::to_string(i));
        c.expect(set.seeds[i].cluster_id == assignment.labels[expected[i].query_index], tag + " cluster");
        c.expect(set.seeds[i].retrieved_doc_ids == footprints[expected[i].query_index], tag + " footprint");
      }
      ++instances;
    }
  }
  c.note(std::to_string(instances) + " instances");
}

// --- simulation -----------------------------------------------------------------

fs::path write_synthetic_run(const fs::path& dir, const synth::SyntheticSpec& spec, std::size_t budget,
                             std::size_t clusters) {
  const auto data = synth::generate(spec);
  synth::write_corpus(dir / "corpus.jsonl", data.documents);
  synth::write_queries(dir / "queries.jsonl", data.queries);
  const fs::path config = dir / "config.yaml";
  std::ofstream(config) << synth::scripted_config_yaml(dir / "corpus.jsonl", dir / "queries.jsonl", dir / "out",
                                                       budget, clusters);
  return config;
}

std::map<std::string, std::string> tree_bytes(const fs::path& root) {
  std::map<std::string, std::string> out;
  if (!fs::exists(root)) return out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

SimulationResult grounding_probe(const std::string& first_answer) {
  const Corpus corpus = testutil::tiny_corpus();
  ScriptRule search = testutil::rule(BackendRole::kAnalyst, {testutil::search_reply("river delta")});
  search.cycle = 0;
  ScriptRule weak = testutil::rule(BackendRole::kAnalyst, {testutil::synth_reply(first_answer, "d1")});
  weak.reretrievals = 0;
  ScriptRule grounded = testutil::rule(BackendRole::kAnalyst, {testutil::synth_reply("river delta", "d1")});
  SimulationConfig config;
  config.analyst = testutil::scripted("analyst", {search, weak, grounded});
  config.critics = {testutil::scripted("critic", {testutil::rule(std::nullopt, {testutil::kApprove})})};
  config.clock = fixed_step_clock(0, 1);
  SeedRecord seed;
  seed.seed_id = "probe";
  seed.query = "river delta";
  return run_trajectory(seed, corpus, config);
}

bool has_status(const Trace& t, StepStatus status) {
  for (const auto& s : t.steps) {
    if (s.status == status) return true;
  }
  return false;
}

void simulation_determinism(Checks& c) {
  synth::SyntheticSpec spec;
  spec.documents = 400;
  spec.queries = 80;
  std::vector<std::map<std::string, std::string>> trees;
  for (int rep = 0; rep < 2; ++rep) {
    const auto dir = testutil::fresh_dir("acceptance-determinism-" + std::to_string(rep));
    const auto cfg_path = write_synthetic_run(dir, spec, 16, 8);
    auto load = load_config(cfg_path);
    c.expect(load.ok(), "config invalid");
    std::ostringstream out, err;
    c.expect(cmd_seed_select(load.config, out, err) == kExitOk, "seed-select failed: " + err.str());
    c.expect(cmd_simulate(load.config, std::nullopt, out, err) == kExitOk, "simulate failed: " + err.str());
    auto tree = tree_bytes(dir / "out" / "raw");
    tree["seeds.jsonl"] = slurp(dir / "out" / "seeds.jsonl");
    tree["review/items.jsonl"] = slurp(dir / "out" / "review" / "items.jsonl");
    trees.push_back(tree);

    for (const auto& stored : read_raw_traces(dir / "out" / "raw")) {
      std::size_t max_cycle = 0;
      for (const auto& s : stored.trace.steps) max_cycle = std::max(max_cycle, s.cycle_index);
      c.expect(stored.trace.analyst_proposals() <= 7, "more than 7 analyst cycles");
      c.expect(max_cycle <= 6, "cycle index beyond 6");
    }
  }
  c.expect(trees[0].size() > 2 && trees[0] == trees[1], "outputs differ between identical runs");

  // An analyst that never stops searching is cut off after 7 cycles.
  {
    const Corpus corpus = testutil::tiny_corpus();
    SimulationConfig config;
    config.analyst = testutil::scripted("analyst", {testutil::rule(BackendRole::kAnalyst, {testutil::search_reply("rain {{cycle}}")})});
    config.critics = {testutil::scripted("critic", {testutil::rule(std::nullopt, {testutil::kApprove})})};
    config.clock = fixed_step_clock(0, 1);
    SeedRecord seed;
    seed.seed_id = "endless";
    seed.query = "spring rain";
    const auto r = run_trajectory(seed, corpus, config);
    c.expect(r.trace.analyst_proposals() == 7, "endless analyst proposals " + std::to_string(r.trace.analyst_proposals()));
    c.expect(r.trace.outcome == Outcome::kAbstained, "endless run not cut off");
  }

  // 1 of 4 answer tokens in evidence re-retrieves; 3 of 10 does not.
  const std::string quarter = "river zebra quokka yak";
  const std::string thirty = "river delta floods zebra quokka yak gnu okapi tapir ibex";
  const auto stop = testutil::stopword_copy();
  const std::string d1 = testutil::tiny_documents()[0].text;
  c.expect(oracle::token_coverage(quarter, {d1}, stop).coverage == 0.25, "0.25 fixture");
  c.expect(oracle::token_coverage(thirty, {d1}, stop).coverage == 0.30, "0.30 fixture");

  const auto low = grounding_probe(quarter);
  const auto ok = grounding_probe(thirty);
  c.expect(has_status(low.trace, StepStatus::kAutoReretrieved), "0.25 did not re-retrieve");
  c.expect(!has_status(ok.trace, StepStatus::kAutoReretrieved), "0.30 re-retrieved");
  std::optional<double> low_conf;
  std::optional<double> ok_conf;
  for (const auto& s : low.trace.steps) {
    if (!low_conf && s.grounding_confidence && s.action && s.action->type == ActionType::kSynthesize) low_conf = s.grounding_confidence;
  }
  for (const auto& s : ok.trace.steps) {
    if (!ok_conf && s.grounding_confidence && s.action && s.action->type == ActionType::kSynthesize) ok_conf = s.grounding_confidence;
  }
  c.expect(low_conf && *low_conf == 0.25, "0.25 confidence recorded");
  c.expect(ok_conf && *ok_conf == 0.30, "0.30 confidence recorded");
  c.expect(ok.trace.outcome == Outcome::kAnswered, "0.30 run not answered");
  c.note(std::to_string(trees[0].size()) + " files identical across runs");
}

// --- statistics -------------------------------------------------------------------

void statistics_correctness(Checks& c) {
  std::uint64_t state = 2024;
  const auto next = [&](std::uint64_t n) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return (state >> 33) % n;
  };
  std::vector<double> mw_p;
  for (int i = 0; i < 20; ++i) {
    std::vector<double> a(3 + next(10)), b(3 + next(10));
    const double shift = static_cast<double>(i % 5);
    for (auto& x : a) x = static_cast<double>(next(10)) + shift;
    for (auto& x : b) x = static_cast<double>(next(10)) / 2.0;
    const auto got = stats::mann_whitney(a, b);
    const auto want = oracle::mann_whitney(a, b);
    const std::string tag = "sample " + std::to_string(i);
    c.expect(got.u1 == want.u1, tag + " U");
    c.expect(got.u1 + got.u2 == static_cast<double>(a.size() * b.size()), tag + " U1+U2");
    c.expect(std::abs(got.p - want.p) <= 1e-9, tag + " p");
    c.expect(std::abs(stats::cohens_d(a, b) - oracle::cohens_d(a, b)) <= 1e-9, tag + " d");
    mw_p.push_back(got.p);

    std::vector<std::vector<double>> table(2 + next(3), std::vector<double>(2 + next(3)));
    for (auto& row : table) {
      for (auto& v : row) v = static_cast<double>(1 + next(30));
    }
    const auto chi = stats::chi_squared(table);
    const auto chi_want = oracle::chi_squared(table);
    c.expect(std::abs(chi.statistic - chi_want.statistic) <= 1e-9, tag + " chi2");
    c.expect(chi.dof == chi_want.dof, tag + " dof");
    c.expect(std::abs(chi.p - chi_want.p) <= 1e-9, tag + " chi2 p");
    c.expect(std::abs(chi.cramers_v - chi_want.cramers_v) <= 1e-9, tag + " V");

    std::vector<double> ps(2 + next(8));
    for (auto& p : ps) p = static_cast<double>(next(1000)) / 4000.0;
    c.expect(stats::holm_bonferroni(ps, 0.05) == oracle::holm(ps, 0.05), tag + " holm");
  }
  c.expect(stats::holm_bonferroni(mw_p, 0.05) == oracle::holm(mw_p, 0.05), "holm over U tests");
  c.note("20 samples");
}

// --- formats --------------------------------------------------------------------------

void format_round_trip(Checks& c) {
  const Corpus corpus = testutil::tiny_corpus();
  ScriptRule broken = testutil::rule(BackendRole::kAnalyst, {"no action here"});
  broken.query_contains = "broken";
  ScriptRule first = testutil::rule(BackendRole::kAnalyst, {testutil::search_reply("{{seed_query}}")});
  first.cycle = 0;
  ScriptRule refuse = testutil::rule(BackendRole::kAnalyst, {testutil::abstain_reply("unclear")});
  refuse.query_contains = "birds";
  ScriptRule answer = testutil::rule(BackendRole::kAnalyst, {testutil::synth_reply("{{excerpt1}}", "{{doc1}}")});

  SimulationConfig config;
  config.analyst = testutil::scripted("analyst", {broken, first, refuse, answer});
  config.critics = {testutil::scripted("critic", {testutil::rule(std::nullopt, {testutil::kApprove})})};
  config.clock = fixed_step_clock(100, 5);

  std::vector<Trace> traces;
  std::vector<Trajectory> trajectories;
  std::set<std::string> discarded;
  const std::vector<std::string> queries = {"river delta", "broken query", "wetlands birds", "atlanta airport",
                                            "spring rain river", "delta flights"};
  for (std::size_t i = 0; i < queries.size(); ++i) {
    SeedRecord seed;
    seed.seed_id = "seed-" + std::to_string(i);
    seed.query = queries[i];
    seed.retrieved_doc_ids = {"d1"};
    const auto r = run_trajectory(seed, corpus, config);
    if (r.trace.outcome == Outcome::kDiscarded) discarded.insert(r.trace.trace_id);
    traces.push_back(r.trace);
    trajectories.push_back(r.trajectory);
  }
  c.expect(discarded.size() == 1, "expected one discarded trace");

  const auto dir = testutil::fresh_dir("acceptance-formats");
  const auto counts = write_dataset(dir, traces, trajectories, corpus, 7);
  const auto back = read_dataset(dir);

  std::vector<Trace> kept_traces;
  std::vector<Trajectory> kept_trajectories;
  for (const auto& t : traces) {
    if (!discarded.count(t.trace_id)) kept_traces.push_back(t);
  }
  for (const auto& t : trajectories) {
    if (!discarded.count(t.trace_id)) kept_trajectories.push_back(t);
  }
  const auto pairs = extract_supervised_pairs(kept_traces, corpus);
  c.expect(back.traces == kept_traces, "traces differ after round trip");
  c.expect(back.trajectories == kept_trajectories, "trajectories differ after round trip");
  c.expect(back.supervised == pairs, "supervised pairs differ after round trip");
  c.expect(counts.trajectories == kept_trajectories.size(), "trajectory count");
  c.expect(shard_files(dir / "traces").size() > 1, "trace shards not split");

  for (const auto& t : back.traces) c.expect(!discarded.count(t.trace_id), "discarded trace exported");
  for (const auto& t : back.trajectories) c.expect(!discarded.count(t.trace_id), "discarded trajectory exported");
  for (const auto& p : back.supervised) c.expect(!discarded.count(p.source_trace_id), "discarded pair exported");
  for (const auto& sub : {"traces", "trajectories", "supervised"}) {
    for (const auto& f : shard_files(dir / sub)) {
      for (const auto& id : discarded) {
        c.expect(io::read_file(f).find(id) == std::string::npos, "discarded id in " + f.filename().string());
      }
    }
  }
  c.expect(unresolved_doc_ids(back, corpus).empty(), "unresolved doc ids");
  c.note(std::to_string(counts.trace_lines) + " trace lines, " + std::to_string(counts.trajectories) +
         " trajectories, " + std::to_string(counts.supervised) + " pairs");
}

// --- end to end ---------------------------------------------------------------------

void end_to_end(Checks& c) {
  const auto dir = testutil::fresh_dir("acceptance-e2e");
  const auto cfg_path = write_synthetic_run(dir, synth::SyntheticSpec{}, 12, 20);
  std::ostringstream out, err;
  c.expect(cmd_validate(cfg_path, false, out, err) == kExitOk, "validate failed: " + err.str());
  auto load = load_config(cfg_path);
  c.expect(cmd_seed_select(load.config, out, err) == kExitOk, "seed-select failed: " + err.str());
  c.expect(cmd_simulate(load.config, std::nullopt, out, err) == kExitOk, "simulate failed: " + err.str());

  const OutputLayout layout{dir / "out"};
  const auto seeds = read_seeds(layout.seeds());
  const auto manifest = read_manifest(layout.manifest());
  std::map<std::string, std::string> status;
  for (const auto& e : manifest) status[e.seed_id] = e.status;
  for (const auto& s : seeds) c.expect(status[s.seed_id] == "completed", "seed missing from manifest: " + s.seed_id);

  ReviewQueue queue(layout.review());
  const auto flagged = queue.items().size();
  std::size_t reretrieved = 0;
  for (const auto& stored : read_raw_traces(layout.raw())) {
    for (const auto& s : stored.trace.steps) reretrieved += s.status == StepStatus::kAutoReretrieved;
  }
  c.expect(flagged >= 1, "no flagged review items");
  c.expect(reretrieved >= 1, "no auto_reretrieved steps");

  std::map<std::string, fs::file_time_type> stamps;
  for (const auto& e : fs::directory_iterator(layout.raw())) stamps[e.path().string()] = fs::last_write_time(e.path());
  const auto manifest_before = slurp(layout.manifest());
  std::ostringstream out2;
  c.expect(cmd_simulate(load.config, std::nullopt, out2, err) == kExitOk, "resume failed");
  c.expect(slurp(layout.manifest()) == manifest_before, "resume re-executed seeds");
  for (const auto& e : fs::directory_iterator(layout.raw())) {
    c.expect(stamps.count(e.path().string()) && stamps[e.path().string()] == fs::last_write_time(e.path()),
             "raw trace rewritten on resume");
  }
  c.note(std::to_string(seeds.size()) + " seeds, " + std::to_string(flagged) + " flagged, " +
         std::to_string(reretrieved) + " auto_reretrieved, 0 re-executed on resume");
}

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<void(Checks&)> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"divergence_score_exactness", 1.0, divergence_exactness},
      {"grounding_metric_exactness", 5.0, grounding_exactness},
      {"seeding_cluster_coverage", 120.0, seeding_coverage},
      {"seed_selection_matches_transcription", 10.0, seed_selection_oracle},
      {"simulation_determinism_and_bounds", 30.0, simulation_determinism},
      {"statistics_correctness", 5.0, statistics_correctness},
      {"dataset_format_round_trip", 10.0, format_round_trip},
      {"end_to_end_pipeline", 60.0, end_to_end},
  };
  int failures = 0;
  for (const auto& criterion : criteria) {
    Checks checks;
    const auto start = std::chrono::steady_clock::now();
    try {
      criterion.run(checks);
    } catch (const std::exception& e) {
      checks.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    checks.expect(seconds < criterion.budget_seconds, "over time budget of " + fmt(criterion.budget_seconds, 0) + " s");
    const bool pass = !checks.failed();
    failures += pass ? 0 : 1;
    std::printf("%s %-40s %8.3f s  %s\n", pass ? "PASS" : "FAIL", criterion.name.c_str(), seconds,
                checks.summary().c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
