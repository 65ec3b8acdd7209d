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
#include <span>
#include <string>
#include <vector>

#include "agentsim/corpus.hpp"
#include "agentsim/embedding.hpp"

// Data-parallel inner loops. Each kernel has an OpenMP implementation in
// agentsim::kernels and a plain serial reference in agentsim::kernels::serial;
// the two produce bit-identical results (per-row partial sums are always
// combined in index order).
namespace agentsim::kernels {

struct Nearest {
  std::uint32_t index = 0;
  double distance2 = 0.0;  // squared Euclidean distance

  bool operator==(const Nearest&) const = default;
};

// Nearest centroid for every point; ties go to the lower centroid index.
std::vector<Nearest> nearest_centroids(std::span<const EmbeddingVector> points,
                                       std::span<const EmbeddingVector> centroids);

// Retrieval for many queries at once. Queries without content tokens yield
// std::nullopt; every other error propagates.
std::vector<std::optional<RetrievalResult>> retrieve_batch(const Corpus& corpus,
                                                           std::span<const std::string> queries,
                                                           std::size_t depth,
                                                           const Bm25Params& params = {});

// Mean Jaccard index over all unordered pairs. Each set must be sorted and
// duplicate free. Two empty sets have Jaccard 0. Requires >= 2 sets.
double mean_pairwise_jaccard(std::span<const std::vector<std::string>> sets);

// Mean of min(1, 1 - cos) over all unordered pairs, so the result stays in
// [0, 1] even when signed embeddings are anti-correlated. Requires >= 2 vectors.
double mean_pairwise_cosine_distance(std::span<const EmbeddingVector> vectors);

double squared_distance(const EmbeddingVector& a, const EmbeddingVector& b);
double bounded_cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b);
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

namespace serial {

std::vector<Nearest> nearest_centroids(std::span<const EmbeddingVector> points,
                                       std::span<const EmbeddingVector> centroids);
std::vector<std::optional<RetrievalResult>> retrieve_batch(const Corpus& corpus,
                                                           std::span<const std::string> queries,
                                                           std::size_t depth,
                                                           const Bm25Params& params = {});
double mean_pairwise_jaccard(std::span<const std::vector<std::string>> sets);
double mean_pairwise_cosine_distance(std::span<const EmbeddingVector> vectors);

}  // namespace serial

}  // namespace agentsim::kernels
