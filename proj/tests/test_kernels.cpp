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

#include "agentsim/embedding.hpp"
#include "agentsim/kernels.hpp"
#include "agentsim/kmeans.hpp"
#include "agentsim/rng.hpp"
#include "support/test_util.hpp"
#include "synth/synthetic.hpp"

using namespace agentsim;

namespace {

std::vector<EmbeddingVector> random_vectors(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<EmbeddingVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.uniform01() - 0.5;
    out.push_back(EmbeddingVector::normalized(v));
  }
  return out;
}

}  // namespace

TEST_CASE("parallel kernels equal their serial references bit for bit") {
  const auto points = random_vectors(300, 16, 1);
  const auto centroids = random_vectors(7, 16, 2);
  CHECK(kernels::nearest_centroids(points, centroids) == kernels::serial::nearest_centroids(points, centroids));
  CHECK(kernels::mean_pairwise_cosine_distance(points) ==
        kernels::serial::mean_pairwise_cosine_distance(points));

  std::vector<std::vector<std::string>> sets;
  for (int i = 0; i < 40; ++i) {
    std::vector<std::string> s;
    for (int j = i % 5; j < 20; j += 1 + i % 3) s.push_back("d" + std::to_string(100 + j));
    sets.push_back(s);
  }
  CHECK(kernels::mean_pairwise_jaccard(sets) == kernels::serial::mean_pairwise_jaccard(sets));

  synth::SyntheticSpec spec;
  spec.documents = 200;
  spec.queries = 40;
  const auto data = synth::generate(spec);
  const Corpus corpus = build_index(data.documents);
  auto queries = data.queries;
  queries.push_back("the of and");
  const auto par = kernels::retrieve_batch(corpus, queries, 10);
  const auto ser = kernels::serial::retrieve_batch(corpus, queries, 10);
  CHECK(par == ser);
  CHECK_FALSE(par.back().has_value());
}

TEST_CASE("jaccard on small sets") {
  CHECK(kernels::jaccard({"a", "b"}, {"b", "c"}) == doctest::Approx(1.0 / 3.0));
  CHECK(kernels::jaccard({}, {}) == 0.0);
  const std::vector<std::vector<std::string>> same = {{"a"}, {"a"}, {"a"}};
  CHECK(kernels::mean_pairwise_jaccard(same) == 1.0);
}

TEST_CASE("pairwise cosine distance is bounded by one per pair") {
  const auto a = EmbeddingVector::normalized({1.0, 0.0});
  const auto b = EmbeddingVector::normalized({-1.0, 0.0});
  const std::vector<EmbeddingVector> pair = {a, b};
  CHECK(cosine_distance(a, b) == doctest::Approx(2.0));
  CHECK(kernels::mean_pairwise_cosine_distance(pair) == 1.0);
  const std::vector<EmbeddingVector> same = {a, a};
  CHECK(kernels::mean_pairwise_cosine_distance(same) == 0.0);
}

TEST_CASE("nearest centroid ties go to the lower index") {
  const auto p = EmbeddingVector::normalized({1.0, 1.0});
  const std::vector<EmbeddingVector> points = {p};
  const std::vector<EmbeddingVector> centroids = {EmbeddingVector::normalized({1.0, 0.0}),
                                                  EmbeddingVector::normalized({0.0, 1.0})};
  CHECK(kernels::nearest_centroids(points, centroids)[0].index == 0);
}

TEST_CASE("k-means separates well-separated pairs") {
  const std::vector<EmbeddingVector> pts = {
      EmbeddingVector::normalized({1.0, 0.01, 0.0}), EmbeddingVector::normalized({1.0, -0.01, 0.0}),
      EmbeddingVector::normalized({0.0, 0.01, 1.0}), EmbeddingVector::normalized({0.0, -0.01, 1.0})};
  const auto a = cluster_queries(pts, 2, 3);
  CHECK(a.k() == 2);
  CHECK(a.labels[0] == a.labels[1]);
  CHECK(a.labels[2] == a.labels[3]);
  CHECK(a.labels[0] != a.labels[2]);
}

TEST_CASE("k-means degenerate k") {
  const auto pts = random_vectors(5, 4, 9);
  const auto one = cluster_queries(pts, 1, 1);
  CHECK(one.k() == 1);
  for (auto l : one.labels) CHECK(l == 0);
  const auto all = cluster_queries(pts, 10, 1);
  CHECK(all.k() == 5);
  auto sizes = all.cluster_sizes();
  for (auto s : sizes) CHECK(s == 1);
  CHECK(cluster_queries(pts, 3, 42).labels == cluster_queries(pts, 3, 42).labels);
}

TEST_CASE("rng draws are reproducible and in range") {
  Rng a(5, 1), b(5, 1), c(5, 2);
  CHECK(a.next() == b.next());
  CHECK(a.next() != c.next());
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform01();
    CHECK((u >= 0.0 && u < 1.0));
    CHECK(a.below(7) < 7);
  }
}
