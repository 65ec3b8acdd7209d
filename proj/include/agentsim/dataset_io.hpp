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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "agentsim/corpus.hpp"
#include "agentsim/jsonl.hpp"
#include "agentsim/trace.hpp"

namespace agentsim {

inline constexpr int kDatasetSchemaVersion = 1;
inline constexpr std::size_t kShardSize = 10000;

struct SupervisedPair {
  std::string source_trace_id;
  std::string question;
  std::vector<std::pair<std::string, std::string>> documents;  // (doc_id, text)
  std::string answer;  // answer text, or the refusal reason when abstained
  bool abstained = false;
  std::vector<std::string> reasoning_chain;

  bool operator==(const SupervisedPair&) const = default;
};

nlohmann::ordered_json supervised_to_json(const SupervisedPair& pair);
SupervisedPair supervised_from_json(const nlohmann::json& j);

// Line codecs. Every line carries schema_version; trace lines carry one step
// plus the owning trace's header fields.
std::vector<std::string> trace_lines(const Trace& trace);
std::string trajectory_line(const Trajectory& trajectory);
std::string supervised_line(const SupervisedPair& pair);

// Discarded traces are skipped. Throws PendingReviewItems when any included
// trace still has a flagged step, IOError on write failure. Returns lines written.
std::size_t write_traces(std::span<const Trace> traces, const std::filesystem::path& path);
std::size_t write_trajectories(std::span<const Trajectory> trajectories,
                               const std::filesystem::path& path);
std::size_t write_supervised(std::span<const SupervisedPair> pairs, const std::filesystem::path& path);

std::vector<Trace> read_traces(const std::filesystem::path& path);
std::vector<Trajectory> read_trajectories(const std::filesystem::path& path);
std::vector<SupervisedPair> read_supervised(const std::filesystem::path& path);

// One pair per answered or abstained trace. Throws PendingReviewItems and
// UnknownDocId.
std::vector<SupervisedPair> extract_supervised_pairs(std::span<const Trace> traces,
                                                     const Corpus& corpus);

// Writes <dir>/part-00000.jsonl.gz, part-00001..., rotating every shard_size lines.
class ShardedWriter {
 public:
  explicit ShardedWriter(std::filesystem::path dir, std::size_t shard_size = kShardSize);
  void write_line(std::string_view line);
  void close();
  std::size_t lines() const { return lines_; }
  const std::vector<std::filesystem::path>& files() const { return files_; }

 private:
  std::filesystem::path dir_;
  std::size_t shard_size_;
  std::size_t lines_ = 0;
  std::unique_ptr<io::LineWriter> current_;
  std::vector<std::filesystem::path> files_;
};

// Shard files of a directory in name order.
std::vector<std::filesystem::path> shard_files(const std::filesystem::path& dir);

struct DatasetCounts {
  std::size_t trace_lines = 0;
  std::size_t trajectories = 0;
  std::size_t supervised = 0;
};

// Replaces <out>/traces, <out>/trajectories and <out>/supervised with the
// finalized, non-discarded subset of the inputs.
DatasetCounts write_dataset(const std::filesystem::path& out_dir, std::span<const Trace> traces,
                            std::span<const Trajectory> trajectories, const Corpus& corpus,
                            std::size_t shard_size = kShardSize);

struct Dataset {
  std::vector<Trace> traces;
  std::vector<Trajectory> trajectories;
  std::vector<SupervisedPair> supervised;
};

Dataset read_dataset(const std::filesystem::path& out_dir);

// Doc ids referenced anywhere in a dataset that the corpus does not contain.
std::vector<std::string> unresolved_doc_ids(const Dataset& dataset, const Corpus& corpus);

}  // namespace agentsim
