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

#include "agentsim/kmeans.hpp"

#include <algorithm>
#include <cmath>

#include "agentsim/error.hpp"
#include "agentsim/kernels.hpp"
#include "agentsim/rng.hpp"

namespace agentsim {

namespace {

std::vector<EmbeddingVector> seed_centroids(std::span<const EmbeddingVector> points,
                                            std::size_t k, Rng& rng) {
  const std::size_t n = points.size();
  std::vector<EmbeddingVector> centroids;
  std::vector<bool> chosen(n, false);
  std::vector<double> d2(n, 0.0);

  std::size_t first = rng.below(n);
  centroids.push_back(points[first]);
  chosen[first] = true;
  for (std::size_t i = 0; i < n; ++i) d2[i] = kernels::squared_distance(points[i], points[first]);

  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += chosen[i] ? 0.0 : d2[i];
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform01() * total;
      double running = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (chosen[i] || d2[i] <= 0.0) continue;
        running += d2[i];
        pick = i;
        if (running > target) break;
      }
    } else {
      // Every remaining point duplicates a centroid: pick uniformly among them.
      std::vector<std::size_t> rest;
      for (std::size_t i = 0; i < n; ++i) {
        if (!chosen[i]) rest.push_back(i);
      }
      pick = rest[rng.below(rest.size())];
    }
    chosen[pick] = true;
    centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], kernels::squared_distance(points[i], points[pick]));
    }
  }
  return centroids;
}

// Moves the farthest point (relative to its own centroid) into each empty
// cluster and pins that cluster's centroid onto it.
void repair_empty(std::span<const EmbeddingVector> points, std::vector<kernels::Nearest>& nearest,
                  std::vector<EmbeddingVector>& centroids) {
  const std::size_t k = centroids.size();
  std::vector<std::size_t> sizes(k, 0);
  for (const auto& n : nearest) ++sizes[n.index];
  for (std::size_t c = 0; c < k; ++c) {
    if (sizes[c] != 0) continue;
    std::size_t victim = points.size();
    double worst = -1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (sizes[nearest[i].index] > 1 && nearest[i].distance2 > worst) {
        worst = nearest[i].distance2;
        victim = i;
      }
    }
    if (victim == points.size()) break;
    --sizes[nearest[victim].index];
    ++sizes[c];
    nearest[victim] = {static_cast<std::uint32_t>(c), 0.0};
    centroids[c] = points[victim];
  }
}

}  // namespace

std::vector<std::size_t> ClusterAssignment::cluster_sizes() const {
  std::vector<std::size_t> sizes(k(), 0);
  for (const auto label : labels) ++sizes[label];
  return sizes;
}

ClusterAssignment cluster_queries(std::span<const EmbeddingVector> points, std::size_t k,
                                  std::uint64_t rng_seed, const KMeansOptions& options) {
  if (points.empty()) throw Error(ErrorCode::kInvalidArgument, "cannot cluster zero points");
  if (k == 0) throw Error(ErrorCode::kInvalidArgument, "cluster count must be >= 1");
  const std::size_t dim = points.front().dim();
  for (const auto& p : points) {
    if (p.dim() != dim) throw Error(ErrorCode::kDimensionMismatch, "points differ in dimension");
  }
  k = std::min(k, points.size());

  Rng rng(rng_seed, rng_stream::kKMeans);
  ClusterAssignment result;
  result.centroids = seed_centroids(points, k, rng);

  std::vector<kernels::Nearest> nearest;
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    nearest = kernels::nearest_centroids(points, result.centroids);
    repair_empty(points, nearest, result.centroids);

    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto& sum = sums[nearest[i].index];
      for (std::size_t d = 0; d < dim; ++d) sum[d] += points[i][d];
    }
    double max_shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      double norm2 = 0.0;
      for (const double v : sums[c]) norm2 += v * v;
      if (norm2 <= 1e-24) continue;  // antipodal members cancel out; keep old centroid
      auto updated = EmbeddingVector::normalized(std::move(sums[c]));
      max_shift = std::max(max_shift, std::sqrt(kernels::squared_distance(updated, result.centroids[c])));
      result.centroids[c] = std::move(updated);
    }
    result.iterations = iter + 1;
    if (max_shift < options.tolerance) break;
  }

  nearest = kernels::nearest_centroids(points, result.centroids);
  repair_empty(points, nearest, result.centroids);
  result.labels.reserve(points.size());
  for (const auto& n : nearest) result.labels.push_back(n.index);
  result.coverage.assign(k, 0);
  return result;
}

}  // namespace agentsim
