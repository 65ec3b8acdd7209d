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

#include "agentsim/metrics.hpp"

#include <set>

#include "agentsim/error.hpp"
#include "agentsim/kernels.hpp"

namespace agentsim {

SeedingMetricsReport seeding_metrics(std::span<const std::string> seed_queries,
                                     std::span<const EmbeddingVector> seed_embeddings,
                                     const ClusterAssignment& assignment, const Corpus& corpus,
                                     const Bm25Params& params, std::size_t depth) {
  if (seed_queries.size() != seed_embeddings.size()) {
    throw Error(ErrorCode::kInvalidArgument, "one embedding per seed query required");
  }
  if (seed_queries.size() < 2) throw Error(ErrorCode::kSingleSeed, "pairwise metrics need >= 2 seeds");
  if (assignment.k() == 0) throw Error(ErrorCode::kInvalidArgument, "assignment has no clusters");

  SeedingMetricsReport report;
  std::set<std::size_t> covered;
  for (const auto& n : kernels::nearest_centroids(seed_embeddings, assignment.centroids)) {
    covered.insert(n.index);
  }
  report.cluster_coverage =
      static_cast<double>(covered.size()) / static_cast<double>(assignment.k());

  const auto results = kernels::retrieve_batch(corpus, seed_queries, depth, params);
  std::vector<std::vector<std::string>> footprints;
  std::set<std::string> reached;
  for (const auto& r : results) {
    footprints.push_back(r ? r->doc_ids() : std::vector<std::string>{});
    reached.insert(footprints.back().begin(), footprints.back().end());
  }
  report.document_redundancy = kernels::mean_pairwise_jaccard(footprints);
  report.semantic_diversity = kernels::mean_pairwise_cosine_distance(seed_embeddings);
  report.corpus_coverage_at_100 =
      static_cast<double>(reached.size()) / static_cast<double>(corpus.size());
  return report;
}

SeedingMetricsReport seeding_metrics(const SeedSet& seed_set, const ClusterAssignment& assignment,
                                     const Corpus& corpus, const EmbeddingProvider& provider,
                                     const Bm25Params& params) {
  std::vector<std::string> queries;
  for (const auto& s : seed_set.seeds) queries.push_back(s.query);
  if (queries.size() < 2) throw Error(ErrorCode::kSingleSeed, "pairwise metrics need >= 2 seeds");
  const auto embeddings = provider.embed(queries);
  return seeding_metrics(queries, embeddings, assignment, corpus, params);
}

SeedingMetricsReport average(std::span<const SeedingMetricsReport> reports) {
  if (reports.empty()) throw Error(ErrorCode::kInvalidArgument, "no reports to average");
  SeedingMetricsReport out;
  for (const auto& r : reports) {
    out.cluster_coverage += r.cluster_coverage;
    out.document_redundancy += r.document_redundancy;
    out.semantic_diversity += r.semantic_diversity;
    out.corpus_coverage_at_100 += r.corpus_coverage_at_100;
  }
  const double n = static_cast<double>(reports.size());
  out.cluster_coverage /= n;
  out.document_redundancy /= n;
  out.semantic_diversity /= n;
  out.corpus_coverage_at_100 /= n;
  out.runs = reports.size();
  return out;
}

std::string_view to_string(Reformulation kind) {
  switch (kind) {
    case Reformulation::kConceptual: return "conceptual";
    case Reformulation::kProcedural: return "procedural";
    case Reformulation::kSyntactic: return "syntactic";
  }
  return "conceptual";
}

const StopwordSet& default_meta_terms() {
  static const StopwordSet terms{"search", "find",   "look",  "results", "source",
                                 "sources", "verify", "check", "browse",  "query"};
  return terms;
}

Reformulation classify_reformulation(std::string_view old_query, std::string_view new_query,
                                     const StopwordSet& stopwords, const StopwordSet& meta_terms) {
  const TokenList fresh = tokenize(new_query, stopwords);
  for (const auto& token : fresh.content_tokens) {
    if (meta_terms.contains(token)) return Reformulation::kProcedural;
  }
  const bool keyword_form = fresh.tokens.size() == fresh.content_tokens.size();
  if (keyword_form && word_count(new_query) < word_count(old_query)) return Reformulation::kSyntactic;
  return Reformulation::kConceptual;
}

QueryLengthDelta query_length_delta(std::span<const std::pair<std::string, std::string>> pairs) {
  if (pairs.empty()) throw Error(ErrorCode::kInvalidArgument, "no query pairs");
  QueryLengthDelta out;
  for (const auto& [old_q, new_q] : pairs) {
    out.mean_old += static_cast<double>(word_count(old_q));
    out.mean_new += static_cast<double>(word_count(new_q));
  }
  out.mean_old /= static_cast<double>(pairs.size());
  out.mean_new /= static_cast<double>(pairs.size());
  out.percent_change = out.mean_old > 0.0 ? (out.mean_new - out.mean_old) / out.mean_old : 0.0;
  return out;
}

std::vector<std::pair<std::string, std::string>> reformulation_pairs(const Trajectory& trajectory) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::string previous = trajectory.seed.query;
  for (const auto& call : trajectory.tool_calls) {
    if (call.tool != "search") continue;
    if (normalize_payload(call.input) != normalize_payload(previous)) {
      pairs.emplace_back(previous, call.input);
    }
    previous = call.input;
  }
  return pairs;
}

BehaviorReport behavior_metrics(std::span<const Trajectory> trajectories,
                                const StopwordSet& stopwords, const StopwordSet& meta_terms) {
  if (trajectories.empty()) throw Error(ErrorCode::kInvalidArgument, "no trajectories");
  BehaviorReport report;
  std::set<std::string> unique;
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& t : trajectories) {
    for (const auto& call : t.tool_calls) {
      if (call.tool != "search") continue;
      report.retrieval_events += call.doc_ids.size();
      unique.insert(call.doc_ids.begin(), call.doc_ids.end());
    }
    auto mine = reformulation_pairs(t);
    pairs.insert(pairs.end(), mine.begin(), mine.end());
  }
  report.exploration_breadth = unique.size();
  report.retrieval_redundancy =
      report.retrieval_events == 0
          ? 0.0
          : 1.0 - static_cast<double>(unique.size()) / static_cast<double>(report.retrieval_events);

  for (auto kind : {Reformulation::kConceptual, Reformulation::kProcedural, Reformulation::kSyntactic}) {
    report.reformulation_counts[std::string(to_string(kind))] = 0;
    report.reformulation_distribution[std::string(to_string(kind))] = 0.0;
  }
  report.query_count = pairs.size();
  if (!pairs.empty()) {
    for (const auto& [old_q, new_q] : pairs) {
      ++report.reformulation_counts[std::string(
          to_string(classify_reformulation(old_q, new_q, stopwords, meta_terms)))];
    }
    for (const auto& [label, count] : report.reformulation_counts) {
      report.reformulation_distribution[label] =
          static_cast<double>(count) / static_cast<double>(pairs.size());
    }
    const auto delta = query_length_delta(pairs);
    report.mean_query_length_initial = delta.mean_old;
    report.mean_query_length_reformulated = delta.mean_new;
  }
  return report;
}

nlohmann::ordered_json to_json(const SeedingMetricsReport& report) {
  nlohmann::ordered_json j;
  j["cluster_coverage"] = report.cluster_coverage;
  j["document_redundancy"] = report.document_redundancy;
  j["semantic_diversity"] = report.semantic_diversity;
  j["corpus_coverage_at_100"] = report.corpus_coverage_at_100;
  j["runs"] = report.runs;
  return j;
}

nlohmann::ordered_json to_json(const BehaviorReport& report) {
  nlohmann::ordered_json j;
  j["exploration_breadth"] = report.exploration_breadth;
  j["retrieval_redundancy"] = report.retrieval_redundancy;
  j["retrieval_events"] = report.retrieval_events;
  j["query_count"] = report.query_count;
  j["mean_query_length_initial"] = report.mean_query_length_initial;
  j["mean_query_length_reformulated"] = report.mean_query_length_reformulated;
  j["reformulation_distribution"] = report.reformulation_distribution;
  j["reformulation_counts"] = report.reformulation_counts;
  return j;
}

}  // namespace agentsim
