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

#include "agentsim/review_queue.hpp"

#include <chrono>

#include "agentsim/error.hpp"
#include "agentsim/jsonl.hpp"

namespace agentsim {

namespace fs = std::filesystem;

namespace {

constexpr int kSchemaVersion = 1;

std::int64_t system_now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

void append_line(const fs::path& path, const std::string& line) {
  try {
    io::LineWriter writer(path, /*append=*/true);
    writer.write_line(line);
    writer.close();
  } catch (const Error& e) {
    throw Error(ErrorCode::kPersistenceError, e.what());
  }
}

}  // namespace

QueueStats compute_stats(std::span<const ReviewItem> items) {
  QueueStats stats;
  for (const auto& item : items) {
    if (item.status == ReviewStatus::kPending) {
      ++stats.pending;
      stats.needs_adjudication += item.needs_adjudication ? 1 : 0;
      continue;
    }
    ++stats.decided;
    switch (item.resolution()->verdict) {
      case Verdict::kPromote: ++stats.promote; break;
      case Verdict::kRevise: ++stats.revise; break;
      case Verdict::kDiscard: ++stats.discard; break;
    }
  }
  try {
    stats.agreement_rate = agreement_rate(items);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoDoubleAnnotatedItems) throw;
  }
  return stats;
}

ReviewQueue::ReviewQueue(fs::path dir, Clock clock)
    : dir_(std::move(dir)), clock_(clock ? std::move(clock) : Clock(system_now_ms)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::kPersistenceError, "cannot create " + dir_.string() + ": " + ec.message());
  std::lock_guard lock(mutex_);
  load_locked();
}

void ReviewQueue::load_locked() {
  items_.clear();
  order_.clear();
  if (fs::exists(items_path())) {
    io::for_each_line(items_path(), [&](std::string_view line, std::size_t line_no) {
      ReviewItem item;
      try {
        item = review_item_from_json(nlohmann::json::parse(line));
      } catch (const std::exception& e) {
        throw Error(ErrorCode::kCorruptData,
                    items_path().string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
      if (items_.contains(item.item_id)) return;
      order_.push_back(item.item_id);
      items_.emplace(item.item_id, std::move(item));
    });
  }
  if (fs::exists(decisions_path())) {
    io::for_each_line(decisions_path(), [&](std::string_view line, std::size_t line_no) {
      const auto where = decisions_path().string() + ":" + std::to_string(line_no);
      try {
        const auto j = nlohmann::json::parse(line);
        const auto id = j.at("item_id").get<std::string>();
        auto it = items_.find(id);
        if (it == items_.end()) throw Error(ErrorCode::kCorruptData, "decision for unknown item " + id);
        it->second = apply_review_decision(std::move(it->second), decision_from_json(j));
      } catch (const Error& e) {
        throw Error(ErrorCode::kCorruptData, where + ": " + e.what());
      } catch (const std::exception& e) {
        throw Error(ErrorCode::kCorruptData, where + ": " + e.what());
      }
    });
  }
}

void ReviewQueue::reload() {
  std::lock_guard lock(mutex_);
  load_locked();
}

ReviewItem ReviewQueue::enqueue(const ReviewItem& item) {
  std::lock_guard lock(mutex_);
  if (auto it = items_.find(item.item_id); it != items_.end()) return it->second;
  ReviewItem fresh = item;
  fresh.status = ReviewStatus::kPending;
  fresh.decisions.clear();
  fresh.assigned_reviewers.clear();
  fresh.needs_adjudication = false;
  fresh.version = 0;
  auto j = review_item_to_json(fresh);
  nlohmann::ordered_json line;
  line["schema_version"] = kSchemaVersion;
  for (auto& [key, value] : j.items()) line[key] = value;
  append_line(items_path(), line.dump());
  order_.push_back(fresh.item_id);
  items_.emplace(fresh.item_id, fresh);
  return fresh;
}

ReviewItem ReviewQueue::decide(const std::string& item_id, ReviewDecision decision) {
  std::lock_guard lock(mutex_);
  auto it = items_.find(item_id);
  if (it == items_.end()) throw Error(ErrorCode::kNotFound, "no review item " + item_id);
  if (decision.decided_at == 0) decision.decided_at = clock_();
  ReviewItem updated = apply_review_decision(it->second, decision);

  nlohmann::ordered_json line;
  line["schema_version"] = kSchemaVersion;
  line["item_id"] = item_id;
  const auto body = decision_to_json(updated.decisions.back());
  for (const auto& [key, value] : body.items()) line[key] = value;
  append_line(decisions_path(), line.dump());
  it->second = updated;
  return updated;
}

std::optional<ReviewItem> ReviewQueue::get(const std::string& item_id) const {
  std::lock_guard lock(mutex_);
  auto it = items_.find(item_id);
  if (it == items_.end()) return std::nullopt;
  return it->second;
}

std::vector<ReviewItem> ReviewQueue::items() const {
  std::lock_guard lock(mutex_);
  std::vector<ReviewItem> out;
  out.reserve(order_.size());
  for (const auto& id : order_) out.push_back(items_.at(id));
  return out;
}

QueueStats ReviewQueue::stats() const {
  const auto all = items();
  return compute_stats(all);
}

}  // namespace agentsim
