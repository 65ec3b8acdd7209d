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

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "agentsim/text.hpp"

namespace agentsim {

// Unit-norm dense vector.
class EmbeddingVector {
 public:
  EmbeddingVector() = default;

  // Scales values to unit L2 norm. Throws InvalidArgument for empty,
  // non-finite or all-zero input.
  static EmbeddingVector normalized(std::vector<double> values);

  std::size_t dim() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }

  bool operator==(const EmbeddingVector&) const = default;

 private:
  explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {}
  std::vector<double> values_;
};

// Dot product of two unit vectors. Throws DimensionMismatch.
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);
inline double cosine_distance(const EmbeddingVector& a, const EmbeddingVector& b) {
  return 1.0 - cosine_similarity(a, b);
}

struct EmbeddingProviderConfig {
  enum class Kind { kHashing, kRemote };
  Kind kind = Kind::kHashing;
  std::size_t dim = 256;
  std::string endpoint_url;  // remote only
  std::string model_name;    // remote only
  std::string api_key;       // remote only; sent as a bearer token when set
  std::size_t max_in_flight = 4;
  std::size_t batch_size = 64;
  double timeout_seconds = 30.0;
  int max_attempts = 3;
  int backoff_initial_ms = 500;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  // One vector per text, in input order. Throws EmptyText for an empty text
  // and ProviderUnavailable when a remote backend cannot be reached.
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::string name() const = 0;
};

// Offline provider: signed feature hashing of content-token unigrams and
// bigrams into dim buckets, then L2 normalisation. Pure and platform stable.
class HashingEmbedder final : public EmbeddingProvider {
 public:
  explicit HashingEmbedder(std::size_t dim = 256, StopwordSet stopwords = default_stopwords());

  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;
  EmbeddingVector embed_one(const std::string& text) const;
  std::size_t dim() const override { return dim_; }
  std::string name() const override { return "hashing-" + std::to_string(dim_); }

 private:
  std::size_t dim_;
  StopwordSet stopwords_;
};

// POSTs {"model", "input"} batches to an embeddings endpoint and expects
// {"data": [{"embedding": [...]}, ...]} back in input order.
class RemoteEmbedder final : public EmbeddingProvider {
 public:
  explicit RemoteEmbedder(EmbeddingProviderConfig config);

  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) const override;
  std::size_t dim() const override { return config_.dim; }
  std::string name() const override { return config_.model_name; }

 private:
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const;
  EmbeddingProviderConfig config_;
};

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config,
                                                 const StopwordSet& stopwords = default_stopwords());

}  // namespace agentsim
