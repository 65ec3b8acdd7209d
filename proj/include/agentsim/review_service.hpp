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
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "agentsim/corpus.hpp"
#include "agentsim/review_queue.hpp"

namespace agentsim {

inline constexpr int kDefaultReviewPort = 8377;

struct ReviewServiceOptions {
  std::string host = "127.0.0.1";
  int port = kDefaultReviewPort;  // 0 picks a free port
  std::optional<std::filesystem::path> static_dir;  // built UI served at /
  std::string cors_origin = "*";
};

// Transport-independent API. Each handler returns (HTTP status, JSON body).
class ReviewApi {
 public:
  ReviewApi(ReviewQueue& queue, const Corpus* corpus = nullptr);

  struct Response {
    int status = 200;
    nlohmann::ordered_json body;
  };

  Response list_items(const std::string& status_filter, std::optional<std::size_t> limit);
  Response get_item(const std::string& item_id);
  Response post_decision(const std::string& item_id, const std::string& reviewer_id,
                         const std::string& body);
  Response stats();

 private:
  ReviewQueue& queue_;
  const Corpus* corpus_;
};

std::string review_api_docs();

class ReviewService {
 public:
  ReviewService(ReviewQueue& queue, const Corpus* corpus, ReviewServiceOptions options);
  ~ReviewService();

  // Throws IOError naming the port when it cannot be bound.
  void bind();
  int port() const { return port_; }
  // Blocks until stop().
  void listen();
  // For callers running listen() on another thread.
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  ReviewServiceOptions options_;
  int port_ = 0;
};

}  // namespace agentsim
