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

#include "synthetic.hpp"

#include <cstdio>
#include <set>

#include <nlohmann/json.hpp>

#include "agentsim/jsonl.hpp"
#include "agentsim/rng.hpp"
#include "agentsim/text.hpp"

namespace agentsim::synth {

namespace {

constexpr std::string_view kConsonants = "bcdfghjklmnprstvz";
constexpr std::string_view kVowels = "aeiou";

class WordMaker {
 public:
  explicit WordMaker(Rng& rng) : rng_(rng) {}

  std::string fresh() {
    for (;;) {
      std::string w;
      const std::size_t syllables = 2 + rng_.below(2);
      for (std::size_t i = 0; i < syllables; ++i) {
        w.push_back(kConsonants[rng_.below(kConsonants.size())]);
        w.push_back(kVowels[rng_.below(kVowels.size())]);
      }
      w.push_back(kConsonants[rng_.below(kConsonants.size())]);
      if (!default_stopwords().contains(w) && used_.insert(w).second) return w;
    }
  }

  std::vector<std::string> many(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back(fresh());
    return out;
  }

 private:
  Rng& rng_;
  std::set<std::string> used_;
};

const std::string& pick(Rng& rng, const std::vector<std::string>& words) {
  return words[rng.below(words.size())];
}

}  // namespace

SyntheticData generate(const SyntheticSpec& spec) {
  Rng rng(spec.seed, 99);
  WordMaker maker(rng);
  std::vector<std::vector<std::string>> topic_words;
  std::vector<std::vector<std::vector<std::string>>> subtopic_words;
  for (std::size_t t = 0; t < spec.topics; ++t) {
    topic_words.push_back(maker.many(spec.topic_vocabulary));
    subtopic_words.emplace_back();
    for (std::size_t s = 0; s < spec.subtopics; ++s) {
      subtopic_words.back().push_back(maker.many(spec.subtopic_vocabulary));
    }
  }
  const auto filler = maker.many(spec.filler_vocabulary);
  static const std::vector<std::string> kGlue = {"the", "of", "and", "in", "is", "a", "to", "for"};

  SyntheticData data;
  for (std::size_t d = 0; d < spec.documents; ++d) {
    const std::size_t t = d % spec.topics;
    const std::size_t s = (d / spec.topics) % spec.subtopics;
    std::string text;
    for (std::size_t w = 0; w < spec.doc_words; ++w) {
      const double u = rng.uniform01();
      const std::string& word = u < 0.5    ? pick(rng, topic_words[t])
                                : u < 0.7  ? pick(rng, subtopic_words[t][s])
                                : u < 0.85 ? pick(rng, filler)
                                           : pick(rng, kGlue);
      if (!text.empty()) text.push_back(' ');
      text += word;
    }
    text.push_back('.');
    char id[16];
    std::snprintf(id, sizeof id, "d%05zu", d);
    data.documents.push_back({id, std::move(text), {{"topic", std::to_string(t)}}});
    data.document_topic.push_back(t);
  }

  static const std::vector<std::string> kPrefixes = {"", "what is the ", "how does the ",
                                                     "explain the ", "role of "};
  std::set<std::string> seen;
  for (std::size_t q = 0; data.queries.size() < spec.queries; ++q) {
    const std::size_t t = q % spec.topics;
    const std::size_t s = rng.below(spec.subtopics);
    std::string query = kPrefixes[rng.below(kPrefixes.size())];
    const std::size_t topic_terms = 2 + rng.below(3);
    for (std::size_t i = 0; i < topic_terms; ++i) query += pick(rng, topic_words[t]) + " ";
    query += pick(rng, subtopic_words[t][s]);
    if (!seen.insert(query).second) continue;
    data.queries.push_back(std::move(query));
    data.query_topic.push_back(t);
  }
  return data;
}

void write_corpus(const std::filesystem::path& path, const std::vector<Document>& documents) {
  io::LineWriter w(path);
  for (const auto& d : documents) {
    nlohmann::ordered_json j;
    j["id"] = d.doc_id;
    j["text"] = d.text;
    if (!d.meta.empty()) j["meta"] = d.meta;
    w.write_line(j.dump());
  }
  w.close();
}

void write_queries(const std::filesystem::path& path, const std::vector<std::string>& queries) {
  io::LineWriter w(path);
  for (const auto& q : queries) w.write_line(nlohmann::json({{"query", q}}).dump());
  w.close();
}

std::string scripted_config_yaml(const std::filesystem::path& corpus,
                                 const std::filesystem::path& queries,
                                 const std::filesystem::path& output_dir, std::size_t budget,
                                 std::size_t clusters) {
  std::string y;
  y += "corpus: " + nlohmann::json(corpus.string()).dump() + "\n";
  y += "queries: " + nlohmann::json(queries.string()).dump() + "\n";
  y += "output_dir: " + nlohmann::json(output_dir.string()).dump() + "\n";
  y += "parallelism: 2\nrng_seed: 11\n";
  y += "seeding:\n  num_clusters: " + std::to_string(clusters) + "\n  budget: " +
       std::to_string(budget) + "\n  strategy: corpus_aware\n";
  y += R"(simulation:
  max_cycles: 7
  retrieval_depth: 10
  analyst: analyst
  critics: [critic_a, critic_b]
  fixed_clock: {start_ms: 1700000000000, step_ms: 10}
validation:
  theta: 0.4
  grounding_threshold: 0.3
  double_annotation_rate: 0.1
backends:
  - id: analyst
    kind: scripted
    rules:
      # bucket 1: an off-evidence answer first, a grounded one after re-retrieval
      - {role: analyst, bucket: {mod: 4, eq: 1}, cycle: 1, reretrievals: 0,
         response: "Thought: I can answer from memory.\nAction: {\"type\":\"synthesize\",\"answer\":\"quixotic marmalade xylophone verdigris\",\"doc_ids\":[\"{{doc1}}\"]}"}
      # bucket 3: refuse after one search
      - {role: analyst, bucket: {mod: 4, eq: 3}, cycle: 1,
         response: "Thought: The results do not settle the question.\nAction: {\"type\":\"abstain\",\"reason\":\"retrieved documents do not answer the question\"}"}
      - {role: analyst, cycle: 0,
         response: "Thought: Start by searching for the question.\nAction: {\"type\":\"search\",\"query\":\"{{seed_query}}\"}"}
      - {role: analyst, min_cycle: 1,
         response: "Thought: The top document answers it.\nAction: {\"type\":\"synthesize\",\"answer\":\"{{excerpt1}}\",\"doc_ids\":[\"{{doc1}}\"]}"}
  - id: critic_a
    kind: scripted
    rules:
      - {role: critic, bucket: {mod: 4, eq: 2}, cycle: 0,
         response: "Thought: Narrow the query.\nAction: {\"type\":\"search\",\"query\":\"{{seed_query}} definition\"}"}
      - {role: critic, response: "Verdict: approve"}
  - id: critic_b
    kind: scripted
    rules:
      - {role: critic, bucket: {mod: 4, eq: 2}, cycle: 0,
         response: "Thought: Broaden the query.\nAction: {\"type\":\"search\",\"query\":\"{{seed_query}} overview history\"}"}
      - {role: critic, response: "Verdict: approve"}
)";
  return y;
}

}  // namespace agentsim::synth
