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

#include "agentsim/embedding.hpp"

#include <cmath>
#include <future>

#include "agentsim/error.hpp"
#include "agentsim/http_util.hpp"

namespace agentsim {

namespace {

constexpr double kBigramWeight = 0.5;

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

void add_feature(std::vector<double>& buckets, std::string_view feature, double weight) {
  const std::uint64_t h = mix64(fnv1a64(feature));
  const double sign = (h >> 63) != 0 ? -1.0 : 1.0;
  buckets[h % buckets.size()] += sign * weight;
}

}  // namespace

EmbeddingVector EmbeddingVector::normalized(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "embedding has no components");
  double norm2 = 0.0;
  for (const double v : values) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "embedding has non-finite entry");
    norm2 += v * v;
  }
  if (norm2 <= 0.0) throw Error(ErrorCode::kInvalidArgument, "embedding is the zero vector");
  const double inv = 1.0 / std::sqrt(norm2);
  for (double& v : values) v *= inv;
  return EmbeddingVector(std::move(values));
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "cannot compare embeddings of dim " +
                                                   std::to_string(a.dim()) + " and " +
                                                   std::to_string(b.dim()));
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) dot += a[i] * b[i];
  return std::clamp(dot, -1.0, 1.0);
}

HashingEmbedder::HashingEmbedder(std::size_t dim, StopwordSet stopwords)
    : dim_(dim), stopwords_(std::move(stopwords)) {
  if (dim_ < 2) throw Error(ErrorCode::kInvalidArgument, "embedding dim must be >= 2");
}

EmbeddingVector HashingEmbedder::embed_one(const std::string& text) const {
  if (text.empty()) throw Error(ErrorCode::kEmptyText, "cannot embed an empty text");
  TokenList tokens = tokenize(text, stopwords_);
  // Texts made only of stopwords still deserve a direction of their own.
  const auto& features = tokens.content_tokens.empty() ? tokens.tokens : tokens.content_tokens;
  if (features.empty()) throw Error(ErrorCode::kEmptyText, "text has no tokens: '" + text + "'");

  std::vector<double> buckets(dim_, 0.0);
  std::string key;
  for (std::size_t i = 0; i < features.size(); ++i) {
    key.assign("u\x1f").append(features[i]);
    add_feature(buckets, key, 1.0);
    if (i + 1 < features.size()) {
      key.assign("b\x1f").append(features[i]).append(" ").append(features[i + 1]);
      add_feature(buckets, key, kBigramWeight);
    }
  }
  bool all_zero = true;
  for (const double v : buckets) all_zero = all_zero && v == 0.0;
  if (all_zero) buckets[mix64(fnv1a64(text)) % dim_] = 1.0;  // exact sign cancellation
  return EmbeddingVector::normalized(std::move(buckets));
}

std::vector<EmbeddingVector> HashingEmbedder::embed(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) out.push_back(embed_one(text));
  return out;
}

RemoteEmbedder::RemoteEmbedder(EmbeddingProviderConfig config) : config_(std::move(config)) {
  if (config_.endpoint_url.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "remote embedder needs an endpoint_url");
  }
  http::parse_url(config_.endpoint_url);
  if (config_.batch_size == 0) config_.batch_size = 1;
  if (config_.max_in_flight == 0) config_.max_in_flight = 1;
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(std::span<const std::string> texts) const {
  nlohmann::json body = {{"model", config_.model_name}, {"input", texts}};
  std::map<std::string, std::string> headers;
  if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;
  const http::RetryPolicy policy{config_.max_attempts, config_.backoff_initial_ms,
                                 config_.timeout_seconds};
  const auto response = http::post_json(config_.endpoint_url, body, headers, policy,
                                        ErrorCode::kProviderUnavailable);
  const auto data = response.find("data");
  if (data == response.end() || !data->is_array() || data->size() != texts.size()) {
    throw Error(ErrorCode::kProviderUnavailable,
                "embeddings response does not carry one 'data' entry per input");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& entry : *data) {
    if (!entry.contains("embedding") || !entry["embedding"].is_array()) {
      throw Error(ErrorCode::kProviderUnavailable, "embeddings response entry lacks 'embedding'");
    }
    auto values = entry["embedding"].get<std::vector<double>>();
    if (values.size() != config_.dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "provider returned dim " + std::to_string(values.size()) + ", configured " +
                      std::to_string(config_.dim));
    }
    out.push_back(EmbeddingVector::normalized(std::move(values)));
  }
  return out;
}

std::vector<EmbeddingVector> RemoteEmbedder::embed(std::span<const std::string> texts) const {
  for (const auto& text : texts) {
    if (text.empty()) throw Error(ErrorCode::kEmptyText, "cannot embed an empty text");
  }
  std::vector<std::span<const std::string>> batches;
  for (std::size_t start = 0; start < texts.size(); start += config_.batch_size) {
    batches.push_back(texts.subspan(start, std::min(config_.batch_size, texts.size() - start)));
  }
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  // At most max_in_flight requests outstanding; results are joined in order.
  for (std::size_t wave = 0; wave < batches.size(); wave += config_.max_in_flight) {
    std::vector<std::future<std::vector<EmbeddingVector>>> pending;
    const std::size_t end = std::min(batches.size(), wave + config_.max_in_flight);
    for (std::size_t i = wave; i < end; ++i) {
      pending.push_back(std::async(std::launch::async,
                                   [this, batch = batches[i]] { return embed_batch(batch); }));
    }
    for (auto& future : pending) {
      for (auto& v : future.get()) out.push_back(std::move(v));
    }
  }
  return out;
}

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config,
                                                 const StopwordSet& stopwords) {
  if (config.kind == EmbeddingProviderConfig::Kind::kRemote) {
    return std::make_unique<RemoteEmbedder>(config);
  }
  return std::make_unique<HashingEmbedder>(config.dim, stopwords);
}

}  // namespace agentsim
