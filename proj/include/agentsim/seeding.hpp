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
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentsim/corpus.hpp"
#include "agentsim/embedding.hpp"
#include "agentsim/kmeans.hpp"

namespace agentsim {

enum class SeedingStrategy { kCorpusAware, kRandom, kStratified, kDpp };

std::string_view to_string(SeedingStrategy strategy);
// Accepts corpus_aware, random, stratified, dpp. Throws InvalidArgument.
SeedingStrategy parse_strategy(std::string_view name);

struct SeedingConfig {
  std::size_t num_clusters = 50;  // K
  double tau = 0.4;               // novelty threshold
  double lambda = 0.7;            // MMR trade-off
  std::size_t budget = 0;         // B
  SeedingStrategy strategy = SeedingStrategy::kCorpusAware;
  std::size_t seed_retrieval_depth = 10;
  std::uint64_t rng_seed = 0;
  Bm25Params bm25;

  // Throws InvalidArgument naming the first out-of-range field.
  void validate() const;
};

struct SeedRecord {
  std::string seed_id;
  std::string query;
  std::uint32_t cluster_id = 0;
  double novelty = 0.0;
  std::vector<std::string> retrieved_doc_ids;
  std::string strategy;
  std::size_t rank = 0;

  bool operator==(const SeedRecord&) const = default;
};

struct SeedSet {
  std::vector<SeedRecord> seeds;
  std::vector<std::size_t> query_indices;     // positions in the input pool
  std::vector<EmbeddingVector> embeddings;    // of every query in the pool
  ClusterAssignment assignment;               // coverage filled in
  std::set<std::string> seen_docs;            // union of selected footprints
  std::vector<double> dpp_gains;              // dpp strategy only
  std::vector<std::string> warnings;
};

// |retrieved \ seen| / |retrieved|; 0 for an empty retrieval.
double novelty_ratio(std::span<const std::string> retrieved, const std::set<std::string>& seen);

// Novelty of a query's top-depth retrieval against the docs already seen.
// Propagates EmptyQuery.
double compute_novelty(std::string_view query, const Corpus& corpus,
                       const std::set<std::string>& seen_docs, std::size_t depth,
                       const Bm25Params& params = {});

struct MmrCandidate {
  std::string_view query;
  const EmbeddingVector* embedding = nullptr;
  double novelty = 0.0;
};

// Index of the candidate maximising
//   lambda * novelty - (1 - lambda) * max_s cos(e, e_s)
// where the max term is 0 when nothing is selected yet. Exact score ties go
// to the lexicographically smallest query. Throws NoCandidates.
std::size_t mmr_next(std::span<const MmrCandidate> candidates,
                     std::span<const EmbeddingVector> selected, double lambda);

struct DppSelection {
  std::vector<std::size_t> order;  // picked indices in selection order
  std::vector<double> gains;       // conditional variance of each pick, >= 0
};

// Greedy MAP for the kernel L = cos(e_i, e_j) + 1e-6 I. Each step adds the item
// with the largest log-determinant increment; ties go to the smallest key.
DppSelection dpp_greedy(std::span<const EmbeddingVector> items, std::size_t budget,
                        std::span<const std::string> tie_keys);

// Full pipeline: embed, cluster, then run the configured strategy.
// Throws EmptyQueryPool; InvalidArgument for duplicate queries.
SeedSet select_seeds(std::span<const std::string> queries, const Corpus& corpus,
                     const SeedingConfig& config, const EmbeddingProvider& provider);

// Strategy step only, over precomputed embeddings and clusters.
SeedSet select_seeds(std::span<const std::string> queries, std::vector<EmbeddingVector> embeddings,
                     ClusterAssignment assignment, const Corpus& corpus,
                     const SeedingConfig& config);

nlohmann::ordered_json seed_to_json(const SeedRecord& seed);
SeedRecord seed_from_json(const nlohmann::json& j);

void write_seeds(const std::filesystem::path& path, std::span<const SeedRecord> seeds);
std::vector<SeedRecord> read_seeds(const std::filesystem::path& path);

}  // namespace agentsim
