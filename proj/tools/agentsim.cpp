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

// Command-line entry point: validate, seed-select, simulate, export,
// metrics and review-serve over one YAML run configuration.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "agentsim/config.hpp"
#include "agentsim/pipeline.hpp"
#include "agentsim/seeding.hpp"

namespace {

using agentsim::kExitConfig;

struct Overrides {
  std::string config;
  std::string out;
  std::string strategy;
  std::optional<std::uint64_t> rng_seed;
  std::optional<std::size_t> parallelism;
  std::optional<int> port;
  std::string seeds;
  bool probe = false;
};

// Loads and checks the configuration, applying command-line overrides.
// Prints diagnostics and returns nullopt when any error remains.
std::optional<agentsim::RunConfig> load(const Overrides& o) {
  auto loaded = agentsim::load_config(o.config);
  auto& cfg = loaded.config;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.strategy.empty()) {
    try {
      cfg.seeding.strategy = agentsim::parse_strategy(o.strategy);
    } catch (const std::exception& e) {
      loaded.diagnostics.push_back({agentsim::Diagnostic::Severity::kError, "--strategy", e.what()});
    }
  }
  if (o.rng_seed) {
    cfg.rng_seed = *o.rng_seed;
    cfg.seeding.rng_seed = *o.rng_seed;
  }
  if (o.parallelism) cfg.parallelism = *o.parallelism;
  if (o.port) cfg.review_port = *o.port;
  auto diagnostics = loaded.diagnostics;
  if (loaded.ok()) {
    auto more = agentsim::check_config(cfg, o.probe);
    diagnostics.insert(diagnostics.end(), more.begin(), more.end());
  }
  bool failed = false;
  for (const auto& d : diagnostics) {
    std::cerr << d.to_string() << "\n";
    failed |= d.severity == agentsim::Diagnostic::Severity::kError;
  }
  if (failed) return std::nullopt;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"agentsim: seed selection, agent trace simulation and review tooling"};
  app.require_subcommand(1);
  Overrides o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "YAML run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory (overrides output_dir)");
  };

  auto* validate = app.add_subcommand("validate", "check a configuration and report every problem");
  validate->add_option("--config", o.config, "YAML run configuration")->required();
  validate->add_flag("--probe", o.probe, "also check that remote endpoints are reachable");

  auto* seed = app.add_subcommand("seed-select", "select simulation seeds into <out>/seeds.jsonl");
  add_common(seed);
  seed->add_option("--strategy", o.strategy, "corpus_aware | random | stratified | dpp");
  seed->add_option("--rng-seed", o.rng_seed, "random seed for every stochastic step");

  auto* simulate = app.add_subcommand("simulate", "run trajectories for every seed (resumable)");
  add_common(simulate);
  simulate->add_option("--seeds", o.seeds, "seeds file (default <out>/seeds.jsonl)");
  simulate->add_option("--parallelism", o.parallelism, "concurrent trajectories")->check(CLI::PositiveNumber);
  simulate->add_option("--rng-seed", o.rng_seed, "random seed for every stochastic step");

  auto* exporter = app.add_subcommand("export", "re-apply review decisions and rewrite the dataset");
  add_common(exporter);

  auto* metrics = app.add_subcommand("metrics", "compute metrics over an output tree");
  add_common(metrics);

  auto* serve = app.add_subcommand("review-serve", "serve the review API and UI");
  add_common(serve);
  serve->add_option("--port", o.port, "listen port (default 8377)")->check(CLI::Range(1, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (validate->parsed()) return agentsim::cmd_validate(o.config, o.probe, std::cout, std::cerr);

  const auto cfg = load(o);
  if (!cfg) return kExitConfig;
  if (seed->parsed()) return agentsim::cmd_seed_select(*cfg, std::cout, std::cerr);
  if (simulate->parsed()) {
    std::optional<std::filesystem::path> seeds;
    if (!o.seeds.empty()) seeds = o.seeds;
    return agentsim::cmd_simulate(*cfg, seeds, std::cout, std::cerr);
  }
  if (exporter->parsed()) return agentsim::cmd_export(*cfg, std::cout, std::cerr);
  if (metrics->parsed()) return agentsim::cmd_metrics(*cfg, std::cout, std::cerr);
  if (serve->parsed()) return agentsim::cmd_review_serve(*cfg, std::cout, std::cerr);
  return kExitConfig;
}
