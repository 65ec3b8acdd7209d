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

#include "agentsim/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>

#include "agentsim/error.hpp"
#include "agentsim/jsonl.hpp"
#include "agentsim/kernels.hpp"
#include "agentsim/rng.hpp"

namespace agentsim {

namespace {

constexpr double kDppJitter = 1e-6;
constexpr double kDppFloor = 1e-12;

std::string make_seed_id(std::size_t rank) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "seed-%05zu", rank);
  return buffer;
}

// Retrieval footprint of every query in the pool, computed once.
struct Footprints {
  std::vector<std::vector<std::string>> doc_ids;
  std::size_t unretrievable = 0;
};

Footprints retrieve_pool(std::span<const std::string> queries, const Corpus& corpus,
                         const SeedingConfig& config) {
  Footprints out;
  auto results = kernels::retrieve_batch(corpus, queries, config.seed_retrieval_depth, config.bm25);
  out.doc_ids.reserve(results.size());
  for (auto& result : results) {
    if (result) {
      out.doc_ids.push_back(result->doc_ids());
    } else {
      out.doc_ids.emplace_back();
      ++out.unretrievable;
    }
  }
  return out;
}

class Selector {
 public:
  Selector(std::span<const std::string> queries, const Footprints& footprints, SeedSet& set,
           const SeedingConfig& config)
      : queries_(queries), footprints_(footprints), set_(set), config_(config) {}

  double novelty_of(std::size_t q) const {
    return novelty_ratio(footprints_.doc_ids[q], set_.seen_docs);
  }

  void take(std::size_t q, double novelty) {
    SeedRecord record;
    record.rank = set_.seeds.size();
    record.seed_id = make_seed_id(record.rank);
    record.query = queries_[q];
    record.cluster_id = set_.assignment.labels[q];
    record.novelty = novelty;
    record.retrieved_doc_ids = footprints_.doc_ids[q];
    record.strategy = std::string(to_string(config_.strategy));
    set_.seen_docs.insert(record.retrieved_doc_ids.begin(), record.retrieved_doc_ids.end());
    ++set_.assignment.coverage[record.cluster_id];
    set_.seeds.push_back(std::move(record));
    set_.query_indices.push_back(q);
  }

  // Novelty against everything selected before q.
  void take(std::size_t q) { take(q, novelty_of(q)); }

 private:
  std::span<const std::string> queries_;
  const Footprints& footprints_;
  SeedSet& set_;
  const SeedingConfig& config_;
};

std::vector<std::vector<std::size_t>> members_by_cluster(const ClusterAssignment& assignment) {
  std::vector<std::vector<std::size_t>> members(assignment.k());
  for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
    members[assignment.labels[i]].push_back(i);
  }
  return members;
}

void run_corpus_aware(std::span<const std::string> queries, const Footprints& footprints,
                      SeedSet& set, const SeedingConfig& config, std::size_t target) {
  Selector selector(queries, footprints, set, config);
  auto remaining = members_by_cluster(set.assignment);
  const std::size_t k = set.assignment.k();
  std::vector<bool> active(k, true);
  std::vector<EmbeddingVector> selected_embeddings;

  while (set.seeds.size() < target) {
    // Least-covered active cluster, lowest index on ties.
    std::optional<std::size_t> cluster;
    for (std::size_t c = 0; c < k; ++c) {
      if (active[c] && (!cluster || set.assignment.coverage[c] < set.assignment.coverage[*cluster])) {
        cluster = c;
      }
    }
    if (!cluster) {
      set.warnings.push_back("all clusters exhausted after " + std::to_string(set.seeds.size()) +
                             " seeds");
      break;
    }
    auto& pool = remaining[*cluster];
    if (pool.empty()) {
      active[*cluster] = false;
      continue;
    }

    std::vector<double> novelty(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) novelty[i] = selector.novelty_of(pool[i]);

    std::vector<std::size_t> passing;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (novelty[i] > config.tau) passing.push_back(i);
    }
    if (passing.empty()) {
      std::size_t best = 0;
      for (std::size_t i = 1; i < pool.size(); ++i) {
        if (novelty[i] > novelty[best] ||
            (novelty[i] == novelty[best] && queries[pool[i]] < queries[pool[best]])) {
          best = i;
        }
      }
      passing.push_back(best);
    }

    std::vector<MmrCandidate> candidates;
    candidates.reserve(passing.size());
    for (const auto i : passing) {
      candidates.push_back({queries[pool[i]], &set.embeddings[pool[i]], novelty[i]});
    }
    const std::size_t chosen = passing[mmr_next(candidates, selected_embeddings, config.lambda)];
    const std::size_t q = pool[chosen];
    selector.take(q, novelty[chosen]);
    selected_embeddings.push_back(set.embeddings[q]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
}

void run_random(std::span<const std::string> queries, const Footprints& footprints, SeedSet& set,
                const SeedingConfig& config, std::size_t target) {
  Selector selector(queries, footprints, set, config);
  Rng rng(config.rng_seed, rng_stream::kRandomSeeds);
  std::vector<std::size_t> order(queries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (std::size_t i = 0; i < target; ++i) {
    const std::size_t j = i + rng.below(order.size() - i);
    std::swap(order[i], order[j]);
    selector.take(order[i]);
  }
}

void run_stratified(std::span<const std::string> queries, const Footprints& footprints,
                    SeedSet& set, const SeedingConfig& config, std::size_t target) {
  Selector selector(queries, footprints, set, config);
  Rng rng(config.rng_seed, rng_stream::kStratifiedSeeds);
  auto remaining = members_by_cluster(set.assignment);
  std::size_t cluster = 0;
  while (set.seeds.size() < target) {
    if (remaining[cluster].empty()) {
      cluster = (cluster + 1) % remaining.size();
      continue;
    }
    auto& pool = remaining[cluster];
    const std::size_t pick = rng.below(pool.size());
    selector.take(pool[pick]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    cluster = (cluster + 1) % remaining.size();
  }
}

void run_dpp(std::span<const std::string> queries, const Footprints& footprints, SeedSet& set,
             const SeedingConfig& config, std::size_t target) {
  Selector selector(queries, footprints, set, config);
  auto selection = dpp_greedy(set.embeddings, target, queries);
  for (const auto q : selection.order) selector.take(q);
  set.dpp_gains = std::move(selection.gains);
}

}  // namespace

std::string_view to_string(SeedingStrategy strategy) {
  switch (strategy) {
    case SeedingStrategy::kCorpusAware: return "corpus_aware";
    case SeedingStrategy::kRandom: return "random";
    case SeedingStrategy::kStratified: return "stratified";
    case SeedingStrategy::kDpp: return "dpp";
  }
  return "unknown";
}

SeedingStrategy parse_strategy(std::string_view name) {
  if (name == "corpus_aware") return SeedingStrategy::kCorpusAware;
  if (name == "random") return SeedingStrategy::kRandom;
  if (name == "stratified") return SeedingStrategy::kStratified;
  if (name == "dpp") return SeedingStrategy::kDpp;
  throw Error(ErrorCode::kInvalidArgument, "unknown seeding strategy '" + std::string(name) +
                                               "' (expected corpus_aware|random|stratified|dpp)");
}

void SeedingConfig::validate() const {
  if (!(tau >= 0.0 && tau <= 1.0)) throw Error(ErrorCode::kInvalidArgument, "seeding.tau must be in [0,1]");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "seeding.lambda must be in [0,1]");
  }
  if (num_clusters < 1) throw Error(ErrorCode::kInvalidArgument, "seeding.K must be >= 1");
  if (seed_retrieval_depth < 1) {
    throw Error(ErrorCode::kInvalidArgument, "seeding.seed_retrieval_depth must be >= 1");
  }
}

double novelty_ratio(std::span<const std::string> retrieved, const std::set<std::string>& seen) {
  if (retrieved.empty()) return 0.0;
  std::size_t fresh = 0;
  for (const auto& id : retrieved) fresh += seen.contains(id) ? 0 : 1;
  return static_cast<double>(fresh) / static_cast<double>(retrieved.size());
}

double compute_novelty(std::string_view query, const Corpus& corpus,
                       const std::set<std::string>& seen_docs, std::size_t depth,
                       const Bm25Params& params) {
  const auto ids = retrieve(corpus, query, depth, params).doc_ids();
  return novelty_ratio(ids, seen_docs);
}

std::size_t mmr_next(std::span<const MmrCandidate> candidates,
                     std::span<const EmbeddingVector> selected, double lambda) {
  if (candidates.empty()) throw Error(ErrorCode::kNoCandidates, "MMR needs at least one candidate");
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    double redundancy = 0.0;
    if (!selected.empty()) {
      redundancy = -std::numeric_limits<double>::infinity();
      for (const auto& s : selected) {
        redundancy = std::max(redundancy, cosine_similarity(*candidates[i].embedding, s));
      }
    }
    const double score = lambda * candidates[i].novelty - (1.0 - lambda) * redundancy;
    if (score > best_score ||
        (score == best_score && candidates[i].query < candidates[best].query)) {
      best = i;
      best_score = score;
    }
  }
  return best;
}

DppSelection dpp_greedy(std::span<const EmbeddingVector> items, std::size_t budget,
                        std::span<const std::string> tie_keys) {
  const std::size_t n = items.size();
  budget = std::min(budget, n);
  DppSelection out;
  std::vector<double> d2(n, 1.0 + kDppJitter);
  std::vector<std::vector<double>> basis(n);  // incremental Cholesky rows
  std::vector<bool> picked(n, false);

  for (std::size_t step = 0; step < budget; ++step) {
    std::size_t best = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (picked[i]) continue;
      if (best == n || d2[i] > d2[best] || (d2[i] == d2[best] && tie_keys[i] < tie_keys[best])) {
        best = i;
      }
    }
    const double gain = std::max(d2[best], 0.0);
    picked[best] = true;
    out.order.push_back(best);
    out.gains.push_back(gain);
    if (gain <= kDppFloor) {
      // Numerical floor: remaining items add nothing, keep greedy order by key.
      for (std::size_t i = 0; i < n; ++i) {
        if (!picked[i]) d2[i] = 0.0;
      }
      continue;
    }
    const double root = std::sqrt(gain);
    for (std::size_t i = 0; i < n; ++i) {
      if (picked[i]) continue;
      double dot = 0.0;
      for (std::size_t t = 0; t < basis[best].size(); ++t) dot += basis[best][t] * basis[i][t];
      const double e = (cosine_similarity(items[best], items[i]) - dot) / root;
      basis[i].push_back(e);
      d2[i] = std::max(d2[i] - e * e, 0.0);
    }
  }
  return out;
}

SeedSet select_seeds(std::span<const std::string> queries, std::vector<EmbeddingVector> embeddings,
                     ClusterAssignment assignment, const Corpus& corpus,
                     const SeedingConfig& config) {
  config.validate();
  if (queries.empty()) throw Error(ErrorCode::kEmptyQueryPool, "no candidate queries");
  if (embeddings.size() != queries.size() || assignment.labels.size() != queries.size()) {
    throw Error(ErrorCode::kInvalidArgument, "embeddings/labels do not match the query pool");
  }
  SeedSet set;
  set.embeddings = std::move(embeddings);
  set.assignment = std::move(assignment);
  set.assignment.coverage.assign(set.assignment.k(), 0);

  const std::size_t target = std::min(config.budget, queries.size());
  if (config.budget > queries.size()) {
    set.warnings.push_back("budget " + std::to_string(config.budget) + " exceeds pool of " +
                           std::to_string(queries.size()) + "; selecting every query");
  }
  if (target == 0) return set;

  const Footprints footprints = retrieve_pool(queries, corpus, config);
  if (footprints.unretrievable > 0) {
    set.warnings.push_back(std::to_string(footprints.unretrievable) +
                           " queries have no content tokens and get novelty 0");
  }
  switch (config.strategy) {
    case SeedingStrategy::kCorpusAware:
      run_corpus_aware(queries, footprints, set, config, target);
      break;
    case SeedingStrategy::kRandom:
      run_random(queries, footprints, set, config, target);
      break;
    case SeedingStrategy::kStratified:
      run_stratified(queries, footprints, set, config, target);
      break;
    case SeedingStrategy::kDpp:
      run_dpp(queries, footprints, set, config, target);
      break;
  }
  return set;
}

SeedSet select_seeds(std::span<const std::string> queries, const Corpus& corpus,
                     const SeedingConfig& config, const EmbeddingProvider& provider) {
  config.validate();
  if (queries.empty()) throw Error(ErrorCode::kEmptyQueryPool, "no candidate queries");
  std::set<std::string_view> unique;
  for (const auto& q : queries) {
    if (!unique.insert(q).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate candidate query: '" + q + "'");
    }
  }
  auto embeddings = provider.embed(queries);
  auto assignment = cluster_queries(embeddings, config.num_clusters, config.rng_seed);
  return select_seeds(queries, std::move(embeddings), std::move(assignment), corpus, config);
}

nlohmann::ordered_json seed_to_json(const SeedRecord& seed) {
  nlohmann::ordered_json j;
  j["seed_id"] = seed.seed_id;
  j["query"] = seed.query;
  j["cluster_id"] = seed.cluster_id;
  j["novelty"] = seed.novelty;
  j["retrieved_doc_ids"] = seed.retrieved_doc_ids;
  j["strategy"] = seed.strategy;
  j["rank"] = seed.rank;
  return j;
}

SeedRecord seed_from_json(const nlohmann::json& j) {
  try {
    SeedRecord seed;
    seed.seed_id = j.at("seed_id").get<std::string>();
    seed.query = j.at("query").get<std::string>();
    seed.cluster_id = j.at("cluster_id").get<std::uint32_t>();
    seed.novelty = j.at("novelty").get<double>();
    seed.retrieved_doc_ids = j.at("retrieved_doc_ids").get<std::vector<std::string>>();
    seed.strategy = j.at("strategy").get<std::string>();
    seed.rank = j.at("rank").get<std::size_t>();
    return seed;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptData, std::string("malformed seed record: ") + e.what());
  }
}

void write_seeds(const std::filesystem::path& path, std::span<const SeedRecord> seeds) {
  io::LineWriter writer(path);
  for (const auto& seed : seeds) writer.write_line(seed_to_json(seed).dump());
  writer.close();
}

std::vector<SeedRecord> read_seeds(const std::filesystem::path& path) {
  std::vector<SeedRecord> seeds;
  io::for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kCorruptData,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    seeds.push_back(seed_from_json(j));
  });
  return seeds;
}

}  // namespace agentsim
