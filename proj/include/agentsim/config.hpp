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
#include <optional>
#include <string>
#include <vector>

#include "agentsim/backend.hpp"
#include "agentsim/embedding.hpp"
#include "agentsim/seeding.hpp"
#include "agentsim/simulation.hpp"
#include "agentsim/validation.hpp"

namespace agentsim {

struct Diagnostic {
  enum class Severity { kError, kWarning };
  Severity severity = Severity::kError;
  std::string field;  // dotted path, e.g. seeding.tau
  std::string message;

  std::string to_string() const;
};

struct SimulationSettings {
  std::size_t max_cycles = 7;
  std::size_t retrieval_depth = 10;
  bool adaptive_consultation = false;
  std::size_t explorations_per_seed = 1;
  double temperature = 0.0;
  std::size_t context_token_budget = 4000;
  std::string analyst;               // backend id
  std::vector<std::string> critics;  // backend ids
  std::optional<std::int64_t> fixed_clock_start_ms;  // reproducible timestamps
  std::int64_t fixed_clock_step_ms = 1;
};

struct RunConfig {
  std::filesystem::path config_path;
  std::filesystem::path corpus_path;
  std::filesystem::path queries_path;
  std::optional<std::filesystem::path> stopwords_path;
  std::filesystem::path output_dir = "out";
  std::size_t parallelism = 4;
  std::uint64_t rng_seed = 0;
  Bm25Params bm25;
  EmbeddingProviderConfig embedding;
  SeedingConfig seeding;
  SimulationSettings simulation;
  ValidationConfig validation;
  std::vector<BackendConfig> backends;
  int review_port = 8377;
  std::optional<std::filesystem::path> review_static_dir;
};

struct ConfigLoad {
  RunConfig config;
  std::vector<Diagnostic> diagnostics;

  bool ok() const;  // no error-severity diagnostics
};

// Parses YAML text. ${NAME} in string values is replaced from the
// environment; API keys come from AGENTSIM_API_KEY_<BACKEND_ID>. Relative
// paths resolve against base_dir. Every problem is reported, not just the first.
ConfigLoad parse_config(const std::string& yaml_text, const std::filesystem::path& base_dir);
ConfigLoad load_config(const std::filesystem::path& path);

// Semantic checks beyond parsing: file existence, backend references, and
// (probe) reachability of remote endpoints.
std::vector<Diagnostic> check_config(const RunConfig& config, bool probe = false);

std::string api_key_env_name(const std::string& backend_id);

// Resolved backends for simulation; throws ConfigError on unknown ids.
SimulationConfig make_simulation_config(const RunConfig& config);

}  // namespace agentsim
