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
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "agentsim/text.hpp"

namespace agentsim {

struct Document {
  std::string doc_id;
  std::string text;
  std::map<std::string, std::string> meta;

  bool operator==(const Document&) const = default;
};

struct Bm25Params {
  double k1 = 1.2;
  double b = 0.75;
};

struct Hit {
  std::string doc_id;
  double score = 0.0;

  bool operator==(const Hit&) const = default;
};

// Hits are sorted by score descending, ties by doc_id ascending.
struct RetrievalResult {
  std::string query;
  std::vector<Hit> hits;
  std::size_t depth = 0;

  std::vector<std::string> doc_ids() const;
  bool operator==(const RetrievalResult&) const = default;
};

struct Posting {
  std::uint32_t doc = 0;  // position in Corpus::documents()
  std::uint32_t term_frequency = 0;
};

// Immutable document collection with an inverted index over content tokens.
// Safe for any number of concurrent readers once built.
class Corpus {
 public:
  Corpus(Corpus&&) noexcept = default;
  Corpus& operator=(Corpus&&) noexcept = default;
  Corpus(const Corpus&) = delete;
  Corpus& operator=(const Corpus&) = delete;

  std::size_t size() const { return documents_.size(); }
  std::span<const Document> documents() const { return documents_; }
  const Document& document(std::size_t index) const { return documents_.at(index); }
  std::optional<std::size_t> find(std::string_view doc_id) const;
  bool contains(std::string_view doc_id) const { return find(doc_id).has_value(); }

  std::uint32_t doc_length(std::size_t index) const { return doc_lengths_.at(index); }
  std::span<const std::uint32_t> doc_lengths() const { return doc_lengths_; }
  double avg_doc_length() const { return avg_doc_length_; }

  // Empty span for terms not in the vocabulary.
  std::span<const Posting> postings(std::string_view term) const;
  std::size_t vocabulary_size() const { return index_.size(); }
  const StopwordSet& stopwords() const { return stopwords_; }

 private:
  friend Corpus build_index(std::vector<Document> documents, const StopwordSet& stopwords);
  Corpus() = default;

  std::vector<Document> documents_;
  std::map<std::string, std::uint32_t, std::less<>> id_to_index_;
  std::unordered_map<std::string, std::vector<Posting>> index_;
  std::vector<std::uint32_t> doc_lengths_;
  double avg_doc_length_ = 0.0;
  StopwordSet stopwords_;
};

// Throws DuplicateDocId, EmptyCorpus, or InvalidArgument (empty id or text).
Corpus build_index(std::vector<Document> documents,
                   const StopwordSet& stopwords = default_stopwords());

// BM25 top-depth retrieval. Documents sharing no content token with the
// query are never returned. Throws EmptyQuery when the query has no content
// tokens and InvalidArgument when depth is 0.
RetrievalResult retrieve(const Corpus& corpus, std::string_view query, std::size_t depth,
                         const Bm25Params& params = {});

// JSONL with fields id, text and optional meta (flat object); gzip when the
// path ends in .gz.
std::vector<Document> load_documents(const std::filesystem::path& path);

}  // namespace agentsim
