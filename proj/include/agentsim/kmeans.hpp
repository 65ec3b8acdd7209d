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
#include <span>
#include <vector>

#include "agentsim/embedding.hpp"

namespace agentsim {

struct ClusterAssignment {
  std::vector<std::uint32_t> labels;       // one per input point, < k()
  std::vector<EmbeddingVector> centroids;  // unit-norm mean directions
  std::vector<std::size_t> coverage;       // selected seeds per cluster
  std::size_t iterations = 0;

  std::size_t k() const { return centroids.size(); }
  std::vector<std::size_t> cluster_sizes() const;
};

struct KMeansOptions {
  std::size_t max_iterations = 100;
  double tolerance = 1e-4;  // stop once no centroid moves further than this
};

// Lloyd's algorithm with k-means++ seeding over unit vectors; centroids are
// re-normalised after every update. Effective k is min(k, points.size()).
// A cluster left empty is repaired by moving in the point farthest from its
// own centroid. Labels always refer to the nearest final centroid.
ClusterAssignment cluster_queries(std::span<const EmbeddingVector> points, std::size_t k,
                                  std::uint64_t rng_seed, const KMeansOptions& options = {});

}  // namespace agentsim
