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

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentsim/corpus.hpp"
#include "agentsim/embedding.hpp"
#include "agentsim/kmeans.hpp"
#include "agentsim/seeding.hpp"
#include "agentsim/text.hpp"
#include "agentsim/trace.hpp"

namespace agentsim {

struct SeedingMetricsReport {
  double cluster_coverage = 0.0;
  double document_redundancy = 0.0;
  double semantic_diversity = 0.0;
  double corpus_coverage_at_100 = 0.0;
  std::size_t runs = 1;
};

inline constexpr std::size_t kMetricsRetrievalDepth = 100;

// Pairwise metrics throw SingleSeed for fewer than two seeds.
SeedingMetricsReport seeding_metrics(std::span<const std::string> seed_queries,
                                     std::span<const EmbeddingVector> seed_embeddings,
                                     const ClusterAssignment& assignment, const Corpus& corpus,
                                     const Bm25Params& params = {},
                                     std::size_t depth = kMetricsRetrievalDepth);

// Embeds the seed queries with the provider.
SeedingMetricsReport seeding_metrics(const SeedSet& seed_set, const ClusterAssignment& assignment,
                                     const Corpus& corpus, const EmbeddingProvider& provider,
                                     const Bm25Params& params = {});

// Mean of per-run reports; runs = number of reports.
SeedingMetricsReport average(std::span<const SeedingMetricsReport> reports);

enum class Reformulation { kConceptual, kProcedural, kSyntactic };
std::string_view to_string(Reformulation kind);

const StopwordSet& default_meta_terms();

Reformulation classify_reformulation(std::string_view old_query, std::string_view new_query,
                                     const StopwordSet& stopwords,
                                     const StopwordSet& meta_terms = default_meta_terms());

struct QueryLengthDelta {
  double mean_old = 0.0;
  double mean_new = 0.0;
  double percent_change = 0.0;  // fraction: (new - old) / old
};

QueryLengthDelta query_length_delta(std::span<const std::pair<std::string, std::string>> pairs);

struct BehaviorReport {
  std::size_t exploration_breadth = 0;
  double retrieval_redundancy = 0.0;
  std::size_t retrieval_events = 0;
  std::size_t query_count = 0;  // reformulations observed
  double mean_query_length_initial = 0.0;
  double mean_query_length_reformulated = 0.0;
  std::map<std::string, double> reformulation_distribution;
  std::map<std::string, std::size_t> reformulation_counts;
};

// Reformulation pairs of one trajectory: each search query that differs from
// the previous one (starting from the seed query).
std::vector<std::pair<std::string, std::string>> reformulation_pairs(const Trajectory& trajectory);

BehaviorReport behavior_metrics(std::span<const Trajectory> trajectories,
                                const StopwordSet& stopwords = default_stopwords(),
                                const StopwordSet& meta_terms = default_meta_terms());

nlohmann::ordered_json to_json(const SeedingMetricsReport& report);
nlohmann::ordered_json to_json(const BehaviorReport& report);

}  // namespace agentsim
