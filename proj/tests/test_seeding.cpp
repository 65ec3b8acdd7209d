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

#include <cmath>

#include "agentsim/error.hpp"
#include "agentsim/seeding.hpp"
#include "support/test_util.hpp"
#include "synth/synthetic.hpp"

using namespace agentsim;

namespace {

struct Pool {
  std::vector<std::string> queries;
  Corpus corpus;
};

Pool small_pool() {
  synth::SyntheticSpec spec;
  spec.documents = 300;
  spec.queries = 60;
  spec.topics = 6;
  auto data = synth::generate(spec);
  return {data.queries, build_index(data.documents)};
}

}  // namespace

TEST_CASE("novelty ratio") {
  const std::vector<std::string> ten = {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
  CHECK(novelty_ratio(ten, {"a", "b", "c", "d"}) == doctest::Approx(0.6));
  CHECK(novelty_ratio(ten, {}) == 1.0);
  CHECK(novelty_ratio(ten, {ten.begin(), ten.end()}) == 0.0);
  CHECK(novelty_ratio({}, {"a"}) == 0.0);
  const Corpus corpus = testutil::tiny_corpus();
  CHECK(compute_novelty("atlanta", corpus, {"d2"}, 10) == doctest::Approx(0.5));
  CHECK_THROWS_AS(compute_novelty("the", corpus, {}, 10), Error);
}

TEST_CASE("mmr_next") {
  const auto e1 = EmbeddingVector::normalized({1.0, 0.0});
  const auto e2 = EmbeddingVector::normalized({0.0, 1.0});
  std::vector<MmrCandidate> c = {{"b", &e1, 0.5}, {"a", &e2, 0.9}};
  CHECK(mmr_next(c, {}, 0.7) == 1);  // highest novelty with nothing selected

  std::vector<MmrCandidate> tie = {{"b", &e1, 0.5}, {"a", &e2, 0.5}};
  const std::vector<EmbeddingVector> selected = {e1};
  CHECK(mmr_next(tie, selected, 0.7) == 1);  // e1 duplicates a seed
  CHECK(mmr_next(tie, {}, 0.7) == 1);        // exact tie: smallest query

  std::vector<MmrCandidate> pure = {{"x", &e1, 0.9}, {"y", &e2, 0.1}};
  CHECK(mmr_next(pure, selected, 1.0) == 0);
  CHECK_THROWS_AS(mmr_next({}, {}, 0.5), Error);
}

TEST_CASE("dpp greedy prefers diverse items and never loses objective") {
  const std::vector<EmbeddingVector> items = {EmbeddingVector::normalized({1.0, 0.0}),
                                              EmbeddingVector::normalized({1.0, 0.0}),
                                              EmbeddingVector::normalized({0.0, 1.0})};
  const std::vector<std::string> keys = {"a", "b", "c"};
  const auto sel = dpp_greedy(items, 3, keys);
  REQUIRE(sel.order.size() == 3);
  CHECK(sel.order[0] == 0);
  CHECK(sel.order[1] == 2);
  for (double g : sel.gains) CHECK(g >= 0.0);
  CHECK(sel.gains[2] < 1e-3);
}

TEST_CASE("every strategy honours the budget and is reproducible") {
  const auto pool = small_pool();
  HashingEmbedder embedder(128);
  for (const auto strategy : {SeedingStrategy::kCorpusAware, SeedingStrategy::kRandom,
                              SeedingStrategy::kStratified, SeedingStrategy::kDpp}) {
    SeedingConfig config;
    config.num_clusters = 6;
    config.budget = 15;
    config.strategy = strategy;
    config.rng_seed = 3;
    const auto a = select_seeds(pool.queries, pool.corpus, config, embedder);
    const auto b = select_seeds(pool.queries, pool.corpus, config, embedder);
    CHECK(a.seeds == b.seeds);
    CHECK(a.seeds.size() == 15);
    std::set<std::string> footprint_union;
    for (const auto& s : a.seeds) {
      CHECK(s.strategy == to_string(strategy));
      CHECK(s.retrieved_doc_ids.size() <= config.seed_retrieval_depth);
      CHECK((s.novelty >= 0.0 && s.novelty <= 1.0));
      footprint_union.insert(s.retrieved_doc_ids.begin(), s.retrieved_doc_ids.end());
    }
    CHECK(footprint_union == a.seen_docs);
  }
}

TEST_CASE("corpus-aware selection covers every non-empty cluster") {
  const auto pool = small_pool();
  HashingEmbedder embedder(128);
  SeedingConfig config;
  config.num_clusters = 6;
  config.budget = 8;
  const auto set = select_seeds(pool.queries, pool.corpus, config, embedder);
  for (std::size_t c = 0; c < set.assignment.k(); ++c) {
    if (set.assignment.cluster_sizes()[c] > 0) CHECK(set.assignment.coverage[c] >= 1);
  }
}

TEST_CASE("budget edge cases") {
  const auto pool = small_pool();
  HashingEmbedder embedder(64);
  SeedingConfig config;
  config.num_clusters = 3;
  config.budget = 0;
  CHECK(select_seeds(pool.queries, pool.corpus, config, embedder).seeds.empty());
  config.budget = 1000;
  const auto all = select_seeds(pool.queries, pool.corpus, config, embedder);
  CHECK(all.seeds.size() == pool.queries.size());
  CHECK_FALSE(all.warnings.empty());
  CHECK_THROWS_AS(select_seeds(std::vector<std::string>{}, pool.corpus, config, embedder), Error);
  config.tau = 1.5;
  CHECK_THROWS_AS(config.validate(), Error);
}

TEST_CASE("seeds round trip through JSONL") {
  const auto dir = testutil::fresh_dir("seeding-io");
  SeedRecord s{"seed-00000", "river delta", 2, 0.75, {"d1", "d3"}, "corpus_aware", 0};
  const std::vector<SeedRecord> seeds = {s};
  write_seeds(dir / "seeds.jsonl", seeds);
  CHECK(read_seeds(dir / "seeds.jsonl") == seeds);
  CHECK(parse_strategy("dpp") == SeedingStrategy::kDpp);
  CHECK_THROWS_AS(parse_strategy("greedy"), Error);
}
