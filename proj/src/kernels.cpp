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

#include "agentsim/kernels.hpp"

#include <algorithm>
#include <exception>

#include "agentsim/error.hpp"

namespace agentsim::kernels {

namespace {

Nearest nearest_for(const EmbeddingVector& point, std::span<const EmbeddingVector> centroids) {
  Nearest best{0, squared_distance(point, centroids[0])};
  for (std::size_t c = 1; c < centroids.size(); ++c) {
    const double d = squared_distance(point, centroids[c]);
    if (d < best.distance2) best = {static_cast<std::uint32_t>(c), d};
  }
  return best;
}

std::optional<RetrievalResult> retrieve_or_empty(const Corpus& corpus, const std::string& query,
                                                 std::size_t depth, const Bm25Params& params) {
  try {
    return retrieve(corpus, query, depth, params);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEmptyQuery) return std::nullopt;
    throw;
  }
}

void require_pairs(std::size_t n) {
  if (n < 2) throw Error(ErrorCode::kSingleSeed, "pairwise mean needs at least two items");
}

double sum_rows(const std::vector<double>& rows) {
  double total = 0.0;
  for (const double r : rows) total += r;
  return total;
}

}  // namespace

double squared_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::kDimensionMismatch, "embedding dims differ");
  double d = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

double bounded_cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  return std::min(1.0, cosine_distance(a, b));
}

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  const std::size_t unite = a.size() + b.size() - common;
  return unite == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(unite);
}

std::vector<Nearest> nearest_centroids(std::span<const EmbeddingVector> points,
                                       std::span<const EmbeddingVector> centroids) {
  if (centroids.empty()) throw Error(ErrorCode::kInvalidArgument, "no centroids");
  std::vector<Nearest> out(points.size());
  const auto n = static_cast<std::int64_t>(points.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = nearest_for(points[static_cast<std::size_t>(i)], centroids);
  }
  return out;
}

std::vector<std::optional<RetrievalResult>> retrieve_batch(const Corpus& corpus,
                                                           std::span<const std::string> queries,
                                                           std::size_t depth,
                                                           const Bm25Params& params) {
  std::vector<std::optional<RetrievalResult>> out(queries.size());
  std::vector<std::exception_ptr> errors(queries.size());
  const auto n = static_cast<std::int64_t>(queries.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      out[k] = retrieve_or_empty(corpus, queries[k], depth, params);
    } catch (...) {
      errors[k] = std::current_exception();
    }
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return out;
}

double mean_pairwise_jaccard(std::span<const std::vector<std::string>> sets) {
  require_pairs(sets.size());
  const std::size_t n = sets.size();
  std::vector<double> rows(n, 0.0);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const auto r = static_cast<std::size_t>(i);
    double row = 0.0;
    for (std::size_t j = r + 1; j < n; ++j) row += jaccard(sets[r], sets[j]);
    rows[r] = row;
  }
  return sum_rows(rows) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

double mean_pairwise_cosine_distance(std::span<const EmbeddingVector> vectors) {
  require_pairs(vectors.size());
  const std::size_t n = vectors.size();
  std::vector<double> rows(n, 0.0);
#pragma omp parallel for schedule(dynamic, 8)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
    const auto r = static_cast<std::size_t>(i);
    double row = 0.0;
    for (std::size_t j = r + 1; j < n; ++j) row += bounded_cosine_distance(vectors[r], vectors[j]);
    rows[r] = row;
  }
  return sum_rows(rows) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

namespace serial {

std::vector<Nearest> nearest_centroids(std::span<const EmbeddingVector> points,
                                       std::span<const EmbeddingVector> centroids) {
  if (centroids.empty()) throw Error(ErrorCode::kInvalidArgument, "no centroids");
  std::vector<Nearest> out;
  out.reserve(points.size());
  for (const auto& point : points) out.push_back(nearest_for(point, centroids));
  return out;
}

std::vector<std::optional<RetrievalResult>> retrieve_batch(const Corpus& corpus,
                                                           std::span<const std::string> queries,
                                                           std::size_t depth,
                                                           const Bm25Params& params) {
  std::vector<std::optional<RetrievalResult>> out;
  out.reserve(queries.size());
  for (const auto& query : queries) out.push_back(retrieve_or_empty(corpus, query, depth, params));
  return out;
}

double mean_pairwise_jaccard(std::span<const std::vector<std::string>> sets) {
  require_pairs(sets.size());
  const std::size_t n = sets.size();
  std::vector<double> rows(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) rows[i] += jaccard(sets[i], sets[j]);
  }
  return sum_rows(rows) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

double mean_pairwise_cosine_distance(std::span<const EmbeddingVector> vectors) {
  require_pairs(vectors.size());
  const std::size_t n = vectors.size();
  std::vector<double> rows(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) rows[i] += bounded_cosine_distance(vectors[i], vectors[j]);
  }
  return sum_rows(rows) / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

}  // namespace serial

}  // namespace agentsim::kernels
