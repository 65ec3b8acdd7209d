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

// Writes a planted-topic corpus, candidate queries and a scripted run
// configuration for trying the pipeline offline.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "agentsim/jsonl.hpp"
#include "synth/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"agentsim-synth: generate a synthetic corpus and scripted configuration"};
  std::string out = "synthetic";
  agentsim::synth::SyntheticSpec spec;
  std::size_t budget = 12;
  app.add_option("--out", out, "directory to write into");
  app.add_option("--documents", spec.documents, "number of documents");
  app.add_option("--queries", spec.queries, "number of candidate queries");
  app.add_option("--topics", spec.topics, "number of planted topics");
  app.add_option("--seed", spec.seed, "generator seed");
  app.add_option("--budget", budget, "seed budget written into the configuration");
  CLI11_PARSE(app, argc, argv);

  const std::filesystem::path dir = std::filesystem::absolute(out);
  std::filesystem::create_directories(dir);
  const auto data = agentsim::synth::generate(spec);
  agentsim::synth::write_corpus(dir / "corpus.jsonl", data.documents);
  agentsim::synth::write_queries(dir / "queries.jsonl", data.queries);
  agentsim::io::write_file_atomic(
      dir / "config.yaml",
      agentsim::synth::scripted_config_yaml(dir / "corpus.jsonl", dir / "queries.jsonl", dir / "out",
                                            budget, spec.topics));
  std::cout << "wrote " << data.documents.size() << " documents and " << data.queries.size()
            << " queries to " << dir.string() << "\n";
  return 0;
}
