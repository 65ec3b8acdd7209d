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
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "agentsim/validation.hpp"

namespace agentsim {

struct QueueStats {
  std::size_t pending = 0;
  std::size_t decided = 0;
  std::size_t promote = 0;
  std::size_t revise = 0;
  std::size_t discard = 0;
  std::size_t needs_adjudication = 0;
  std::optional<double> agreement_rate;
};

// Persistent review queue backed by two append-only files:
//   <dir>/items.jsonl      one line per enqueued item
//   <dir>/decisions.jsonl  one line per accepted decision
// State is rebuilt by replaying decisions over items, so the files are the
// single source of truth. All mutations go through one mutex (single writer).
class ReviewQueue {
 public:
  using Clock = std::function<std::int64_t()>;

  explicit ReviewQueue(std::filesystem::path dir, Clock clock = {});

  // Persists a pending item. Re-enqueueing an existing id returns the stored
  // item unchanged. Throws PersistenceError.
  ReviewItem enqueue(const ReviewItem& item);

  // Validates through apply_review_decision, appends to the decision log and
  // returns the new item state. Throws NotFound, AlreadyDecided, StaleItem,
  // InvalidDecision or PersistenceError.
  ReviewItem decide(const std::string& item_id, ReviewDecision decision);

  std::optional<ReviewItem> get(const std::string& item_id) const;
  std::vector<ReviewItem> items() const;  // enqueue order
  QueueStats stats() const;

  // Re-reads both files (e.g. after another process appended).
  void reload();

  const std::filesystem::path& dir() const { return dir_; }
  std::filesystem::path items_path() const { return dir_ / "items.jsonl"; }
  std::filesystem::path decisions_path() const { return dir_ / "decisions.jsonl"; }

 private:
  void load_locked();

  std::filesystem::path dir_;
  Clock clock_;
  mutable std::mutex mutex_;
  std::map<std::string, ReviewItem> items_;
  std::vector<std::string> order_;
};

QueueStats compute_stats(std::span<const ReviewItem> items);

}  // namespace agentsim
