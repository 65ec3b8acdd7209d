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

#include "agentsim/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "agentsim/error.hpp"
#include "agentsim/jsonl.hpp"

namespace agentsim {

std::vector<std::string> RetrievalResult::doc_ids() const {
  std::vector<std::string> ids;
  ids.reserve(hits.size());
  for (const auto& hit : hits) ids.push_back(hit.doc_id);
  return ids;
}

std::optional<std::size_t> Corpus::find(std::string_view doc_id) const {
  const auto it = id_to_index_.find(doc_id);
  if (it == id_to_index_.end()) return std::nullopt;
  return it->second;
}

std::span<const Posting> Corpus::postings(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return {};
  return it->second;
}

Corpus build_index(std::vector<Document> documents, const StopwordSet& stopwords) {
  if (documents.empty()) throw Error(ErrorCode::kEmptyCorpus, "corpus has no documents");
  Corpus corpus;
  corpus.stopwords_ = stopwords;
  corpus.doc_lengths_.reserve(documents.size());
  std::uint64_t total_length = 0;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    const Document& doc = documents[i];
    if (doc.doc_id.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "document " + std::to_string(i) + " has an empty id");
    }
    if (doc.text.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "document " + doc.doc_id + " has empty text");
    }
    const auto [_, inserted] =
        corpus.id_to_index_.emplace(doc.doc_id, static_cast<std::uint32_t>(i));
    if (!inserted) throw Error(ErrorCode::kDuplicateDocId, "duplicate doc_id " + doc.doc_id);

    const auto terms = content_tokens(doc.text, stopwords);
    std::map<std::string_view, std::uint32_t> frequencies;
    for (const auto& term : terms) ++frequencies[term];
    for (const auto& [term, tf] : frequencies) {
      corpus.index_[std::string(term)].push_back({static_cast<std::uint32_t>(i), tf});
    }
    corpus.doc_lengths_.push_back(static_cast<std::uint32_t>(terms.size()));
    total_length += terms.size();
  }
  corpus.avg_doc_length_ =
      static_cast<double>(total_length) / static_cast<double>(documents.size());
  corpus.documents_ = std::move(documents);
  return corpus;
}

RetrievalResult retrieve(const Corpus& corpus, std::string_view query, std::size_t depth,
                         const Bm25Params& params) {
  if (depth == 0) throw Error(ErrorCode::kInvalidArgument, "retrieval depth must be >= 1");
  const auto tokens = content_tokens(query, corpus.stopwords());
  if (tokens.empty()) {
    throw Error(ErrorCode::kEmptyQuery, "query has no content tokens: '" + std::string(query) + "'");
  }
  // Each distinct query term contributes once, in first-occurrence order.
  std::vector<std::string_view> terms;
  for (const auto& token : tokens) {
    if (std::find(terms.begin(), terms.end(), token) == terms.end()) terms.push_back(token);
  }

  const double n_docs = static_cast<double>(corpus.size());
  const double avgdl = corpus.avg_doc_length() > 0.0 ? corpus.avg_doc_length() : 1.0;
  std::vector<double> scores(corpus.size(), 0.0);
  std::vector<std::uint32_t> touched;
  for (const auto term : terms) {
    const auto postings = corpus.postings(term);
    if (postings.empty()) continue;
    const double df = static_cast<double>(postings.size());
    const double idf = std::log(1.0 + (n_docs - df + 0.5) / (df + 0.5));
    for (const Posting& p : postings) {
      const double tf = p.term_frequency;
      const double norm =
          params.k1 * (1.0 - params.b + params.b * corpus.doc_length(p.doc) / avgdl);
      if (scores[p.doc] == 0.0) touched.push_back(p.doc);
      scores[p.doc] += idf * tf * (params.k1 + 1.0) / (tf + norm);
    }
  }

  const auto better = [&](std::uint32_t a, std::uint32_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return corpus.document(a).doc_id < corpus.document(b).doc_id;
  };
  const std::size_t keep = std::min(depth, touched.size());
  std::partial_sort(touched.begin(), touched.begin() + static_cast<std::ptrdiff_t>(keep),
                    touched.end(), better);

  RetrievalResult result;
  result.query = std::string(query);
  result.depth = depth;
  result.hits.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) {
    result.hits.push_back({corpus.document(touched[i]).doc_id, scores[touched[i]]});
  }
  return result;
}

std::vector<Document> load_documents(const std::filesystem::path& path) {
  std::vector<Document> documents;
  io::for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    const auto where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kCorruptData, where + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("id") || !j.contains("text") || !j["text"].is_string()) {
      throw Error(ErrorCode::kCorruptData, where + ": expected object with 'id' and 'text'");
    }
    Document doc;
    doc.doc_id = j["id"].is_string() ? j["id"].get<std::string>() : j["id"].dump();
    doc.text = j["text"].get<std::string>();
    if (auto meta = j.find("meta"); meta != j.end() && meta->is_object()) {
      for (const auto& [key, value] : meta->items()) {
        doc.meta[key] = value.is_string() ? value.get<std::string>() : value.dump();
      }
    }
    documents.push_back(std::move(doc));
  });
  return documents;
}

}  // namespace agentsim
