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

#include <filesystem>
#include <string>
#include <vector>

#include "agentsim/corpus.hpp"

namespace agentsim::synth {

// Planted-topic corpus: every document and query is drawn from one topic's
// vocabulary (plus one of its subtopics and shared filler words).
struct SyntheticSpec {
  std::size_t topics = 20;
  std::size_t subtopics = 4;
  std::size_t documents = 2000;
  std::size_t queries = 300;
  std::size_t doc_words = 60;
  std::size_t topic_vocabulary = 30;
  std::size_t subtopic_vocabulary = 10;
  std::size_t filler_vocabulary = 200;
  std::uint64_t seed = 7;
};

struct SyntheticData {
  std::vector<Document> documents;
  std::vector<std::size_t> document_topic;
  std::vector<std::string> queries;
  std::vector<std::size_t> query_topic;
};

SyntheticData generate(const SyntheticSpec& spec = {});

void write_corpus(const std::filesystem::path& path, const std::vector<Document>& documents);
void write_queries(const std::filesystem::path& path, const std::vector<std::string>& queries);

// Run configuration with scripted backends whose behaviour covers grounded
// answers, refusals, low-grounding re-retrieval and critic disagreement.
std::string scripted_config_yaml(const std::filesystem::path& corpus,
                                 const std::filesystem::path& queries,
                                 const std::filesystem::path& output_dir, std::size_t budget = 12,
                                 std::size_t clusters = 20);

}  // namespace agentsim::synth
