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

// Serial reference kernels against their OpenMP counterparts on the
// synthetic planted-topic workload.

#include <benchmark/benchmark.h>

#include "agentsim/embedding.hpp"
#include "agentsim/kernels.hpp"
#include "agentsim/kmeans.hpp"
#include "synth/synthetic.hpp"

namespace {

struct Workload {
  agentsim::Corpus corpus;
  std::vector<std::string> queries;
  std::vector<agentsim::EmbeddingVector> embeddings;
  std::vector<agentsim::EmbeddingVector> centroids;
  std::vector<std::vector<std::string>> footprints;

  static const Workload& get() {
    static const Workload w = [] {
      const auto data = agentsim::synth::generate();
      Workload out{agentsim::build_index(data.documents, agentsim::default_stopwords()),
                   data.queries, {}, {}, {}};
      agentsim::HashingEmbedder embedder;
      out.embeddings = embedder.embed(out.queries);
      out.centroids = agentsim::cluster_queries(out.embeddings, 20, 1).centroids;
      for (const auto& r : agentsim::kernels::retrieve_batch(out.corpus, out.queries, 100)) {
        out.footprints.push_back(r ? r->doc_ids() : std::vector<std::string>{});
      }
      return out;
    }();
    return w;
  }
};

void BM_RetrieveSerial(benchmark::State& state) {
  const auto& w = Workload::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(agentsim::kernels::serial::retrieve_batch(w.corpus, w.queries, 100));
  }
}
void BM_RetrieveParallel(benchmark::State& state) {
  const auto& w = Workload::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(agentsim::kernels::retrieve_batch(w.corpus, w.queries, 100));
  }
}

void BM_NearestSerial(benchmark::State& state) {
  const auto& w = Workload::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(agentsim::kernels::serial::nearest_centroids(w.embeddings, w.centroids));
  }
}
void BM_NearestParallel(benchmark::State& state) {
  const auto& w = Workload::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(agentsim::kernels::nearest_centroids(w.embeddings, w.centroids));
  }
}

void BM_JaccardSerial(benchmark::State& state) {
  const auto& w = Workload::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(agentsim::kernels::serial::mean_pairwise_jaccard(w.footprints));
  }
}
void BM_JaccardParallel(benchmark::State& state) {
  const auto& w = Workload::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(agentsim::kernels::mean_pairwise_jaccard(w.footprints));
  }
}

void BM_CosineSerial(benchmark::State& state) {
  const auto& w = Workload::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(agentsim::kernels::serial::mean_pairwise_cosine_distance(w.embeddings));
  }
}
void BM_CosineParallel(benchmark::State& state) {
  const auto& w = Workload::get();
  for (auto _ : state) {
    benchmark::DoNotOptimize(agentsim::kernels::mean_pairwise_cosine_distance(w.embeddings));
  }
}

BENCHMARK(BM_RetrieveSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RetrieveParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NearestSerial)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_NearestParallel)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_JaccardSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_JaccardParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CosineSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CosineParallel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
