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
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "agentsim/config.hpp"
#include "agentsim/corpus.hpp"
#include "agentsim/dataset_io.hpp"
#include "agentsim/seeding.hpp"
#include "agentsim/trace.hpp"

namespace agentsim {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

// Candidate queries: JSONL objects with a "query" (or "text") field, or plain
// text with one query per line. Duplicates are dropped, first occurrence kept.
std::vector<std::string> load_queries(const std::filesystem::path& path,
                                      std::vector<std::string>* warnings = nullptr);

StopwordSet load_run_stopwords(const RunConfig& config);
Corpus load_run_corpus(const RunConfig& config);

struct OutputLayout {
  std::filesystem::path root;

  std::filesystem::path seeds() const { return root / "seeds.jsonl"; }
  std::filesystem::path manifest() const { return root / "manifest.jsonl"; }
  std::filesystem::path review() const { return root / "review"; }
  std::filesystem::path raw() const { return root / "raw"; }
  std::filesystem::path metrics() const { return root / "metrics.json"; }
  std::filesystem::path metrics_tests() const { return root / "metrics_tests.csv"; }
};

struct ManifestEntry {
  std::string seed_id;
  std::string status;  // completed | failed
  std::vector<std::string> trace_ids;
  std::vector<std::string> outcomes;
  std::size_t flagged_items = 0;
  std::string error;
};

// Latest entry per seed id, in first-seen order.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

// Raw traces stored by simulate, one JSON file per trace with its seed.
struct StoredTrace {
  SeedRecord seed;
  Trace trace;
};
std::vector<StoredTrace> read_raw_traces(const std::filesystem::path& raw_dir);

struct ExportSummary {
  DatasetCounts counts;
  std::size_t traces = 0;
  std::size_t pending = 0;    // held back awaiting review
  std::size_t discarded = 0;  // excluded
};

// Applies decided review items to the stored traces and rewrites the dataset
// tree with every finalized, non-discarded trace.
ExportSummary export_dataset(const OutputLayout& layout, const Corpus& corpus);

int cmd_validate(const std::filesystem::path& config_path, bool probe, std::ostream& out,
                 std::ostream& err);
int cmd_seed_select(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, const std::optional<std::filesystem::path>& seeds_path,
                 std::ostream& out, std::ostream& err);
int cmd_export(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_metrics(const RunConfig& config, std::ostream& out, std::ostream& err);
// Blocks serving requests until the process is interrupted.
int cmd_review_serve(const RunConfig& config, std::ostream& out, std::ostream& err);

// Machine-readable error line printed by failing commands.
std::string error_json(const std::string& command, const std::exception& e);

}  // namespace agentsim
