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

#include "agentsim/config.hpp"

#include <cstdlib>
#include <map>
#include <regex>
#include <set>

#include <yaml-cpp/yaml.h>

#include "agentsim/error.hpp"
#include "agentsim/http_util.hpp"
#include "agentsim/jsonl.hpp"

namespace agentsim {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

class Reader {
 public:
  Reader(std::vector<Diagnostic>& out, fs::path base) : out_(out), base_(std::move(base)) {}

  void error(const std::string& field, const std::string& message) {
    out_.push_back({Diagnostic::Severity::kError, field, message});
  }
  void warning(const std::string& field, const std::string& message) {
    out_.push_back({Diagnostic::Severity::kWarning, field, message});
  }

  // Warns about keys outside the allowed set.
  void keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) {
    if (!node.IsMap()) return;
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.contains(key)) warning(join(path, key), "unknown key ignored");
    }
  }

  bool map(const YAML::Node& node, const std::string& path) {
    if (!node || node.IsNull()) return false;
    if (!node.IsMap()) {
      error(path, "expected a mapping");
      return false;
    }
    return true;
  }

  std::optional<std::string> string(const YAML::Node& parent, const std::string& key,
                                    const std::string& path) {
    const auto node = parent[key];
    if (!node || node.IsNull()) return std::nullopt;
    if (!node.IsScalar()) {
      error(join(path, key), "expected a string");
      return std::nullopt;
    }
    return interpolate(node.Scalar(), join(path, key));
  }

  void text(const YAML::Node& parent, const std::string& key, const std::string& path,
            std::string& out) {
    if (auto v = string(parent, key, path)) out = *v;
  }

  void file(const YAML::Node& parent, const std::string& key, const std::string& path,
            fs::path& out) {
    if (auto v = string(parent, key, path)) out = resolve(*v);
  }

  void file(const YAML::Node& parent, const std::string& key, const std::string& path,
            std::optional<fs::path>& out) {
    if (auto v = string(parent, key, path)) out = resolve(*v);
  }

  void real(const YAML::Node& parent, const std::string& key, const std::string& path,
            double& out) {
    const auto node = parent[key];
    if (!node || node.IsNull()) return;
    try {
      out = node.as<double>();
    } catch (const YAML::Exception&) {
      error(join(path, key), "expected a number, got '" + scalar_of(node) + "'");
    }
  }

  // Integers arrive as signed so negative counts are diagnosed, not wrapped.
  template <typename T>
  bool integer(const YAML::Node& parent, const std::string& key, const std::string& path, T& out,
               long long min_value) {
    const auto node = parent[key];
    if (!node || node.IsNull()) return false;
    long long v = 0;
    try {
      v = node.as<long long>();
    } catch (const YAML::Exception&) {
      error(join(path, key), "expected an integer, got '" + scalar_of(node) + "'");
      return false;
    }
    if (v < min_value) {
      error(join(path, key), "must be >= " + std::to_string(min_value) + ", got " + std::to_string(v));
      return false;
    }
    out = static_cast<T>(v);
    return true;
  }

  void boolean(const YAML::Node& parent, const std::string& key, const std::string& path,
               bool& out) {
    const auto node = parent[key];
    if (!node || node.IsNull()) return;
    try {
      out = node.as<bool>();
    } catch (const YAML::Exception&) {
      error(join(path, key), "expected true or false, got '" + scalar_of(node) + "'");
    }
  }

  void unit_interval(const std::string& field, double value) {
    if (!(value >= 0.0 && value <= 1.0)) {
      error(field, "must be in [0, 1], got " + format(value));
    }
  }

  static std::string format(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
  }

 private:
  static std::string scalar_of(const YAML::Node& node) {
    return node.IsScalar() ? node.Scalar() : std::string("<non-scalar>");
  }

  fs::path resolve(const std::string& value) const {
    fs::path p(value);
    return p.is_absolute() ? p : base_ / p;
  }

  std::string interpolate(const std::string& value, const std::string& field) {
    static const std::regex pattern(R"(\$\{([A-Za-z_][A-Za-z0-9_]*)\})");
    std::string out;
    std::size_t last = 0;
    for (auto it = std::sregex_iterator(value.begin(), value.end(), pattern);
         it != std::sregex_iterator(); ++it) {
      out.append(value, last, static_cast<std::size_t>(it->position()) - last);
      const std::string name = (*it)[1].str();
      if (const char* env = std::getenv(name.c_str())) {
        out += env;
      } else {
        error(field, "environment variable " + name + " is not set");
      }
      last = static_cast<std::size_t>(it->position() + it->length());
    }
    out.append(value, last, std::string::npos);
    return out;
  }

  std::vector<Diagnostic>& out_;
  fs::path base_;
};

void read_rule(Reader& r, const YAML::Node& node, const std::string& path, ScriptRule& rule) {
  if (!r.map(node, path)) return;
  r.keys(node, path, {"role", "cycle", "min_cycle", "max_cycle", "reretrievals", "query_contains",
                      "bucket", "response", "responses"});
  if (auto role = r.string(node, "role", path)) {
    if (*role == "analyst") {
      rule.role = BackendRole::kAnalyst;
    } else if (*role == "critic") {
      rule.role = BackendRole::kCritic;
    } else {
      r.error(join(path, "role"), "must be analyst or critic, got '" + *role + "'");
    }
  }
  auto opt_count = [&](const char* key, std::optional<std::size_t>& out) {
    std::size_t v = 0;
    if (r.integer(node, key, path, v, 0)) out = v;
  };
  opt_count("cycle", rule.cycle);
  opt_count("min_cycle", rule.min_cycle);
  opt_count("max_cycle", rule.max_cycle);
  opt_count("reretrievals", rule.reretrievals);
  r.text(node, "query_contains", path, rule.query_contains);
  if (const auto bucket = node["bucket"]; r.map(bucket, join(path, "bucket"))) {
    r.integer(bucket, "mod", join(path, "bucket"), rule.bucket_mod, 1);
    r.integer(bucket, "eq", join(path, "bucket"), rule.bucket_eq, 0);
  }
  if (auto single = r.string(node, "response", path)) rule.responses.push_back(*single);
  if (const auto list = node["responses"]) {
    if (!list.IsSequence()) {
      r.error(join(path, "responses"), "expected a list of strings");
    } else {
      for (std::size_t i = 0; i < list.size(); ++i) {
        if (!list[i].IsScalar()) {
          r.error(join(path, "responses[" + std::to_string(i) + "]"), "expected a string");
        } else {
          rule.responses.push_back(list[i].Scalar());
        }
      }
    }
  }
  if (rule.responses.empty()) r.error(path, "rule needs response or responses");
}

void read_backend(Reader& r, const YAML::Node& node, const std::string& path, BackendConfig& b) {
  if (!r.map(node, path)) return;
  r.keys(node, path, {"id", "kind", "endpoint_url", "model_name", "timeout_seconds", "max_attempts",
                      "backoff_initial_ms", "rules"});
  r.text(node, "id", path, b.id);
  r.text(node, "kind", path, b.kind);
  if (b.id.empty()) r.error(join(path, "id"), "backend id is required");
  if (b.kind == "remote_chat") {
    r.text(node, "endpoint_url", path, b.remote.endpoint_url);
    r.text(node, "model_name", path, b.remote.model_name);
    r.real(node, "timeout_seconds", path, b.remote.retry.timeout_seconds);
    r.integer(node, "max_attempts", path, b.remote.retry.max_attempts, 1);
    r.integer(node, "backoff_initial_ms", path, b.remote.retry.backoff_initial_ms, 0);
    if (b.remote.endpoint_url.empty()) r.error(join(path, "endpoint_url"), "required for remote_chat");
    if (b.remote.model_name.empty()) r.error(join(path, "model_name"), "required for remote_chat");
    if (!b.id.empty()) {
      if (const char* key = std::getenv(api_key_env_name(b.id).c_str())) b.remote.api_key = key;
    }
  } else if (b.kind == "scripted") {
    const auto rules = node["rules"];
    if (!rules || !rules.IsSequence() || rules.size() == 0) {
      r.error(join(path, "rules"), "scripted backend needs a non-empty list of rules");
    } else {
      for (std::size_t i = 0; i < rules.size(); ++i) {
        ScriptRule rule;
        read_rule(r, rules[i], join(path, "rules[" + std::to_string(i) + "]"), rule);
        b.rules.push_back(std::move(rule));
      }
    }
  } else {
    r.error(join(path, "kind"), "must be scripted or remote_chat, got '" + b.kind + "'");
  }
}

void parse_root(Reader& r, const YAML::Node& root, RunConfig& c) {
  r.keys(root, "", {"corpus", "queries", "stopwords", "output_dir", "parallelism", "rng_seed",
                    "retrieval", "embedding", "seeding", "simulation", "validation", "backends",
                    "review"});
  r.file(root, "corpus", "", c.corpus_path);
  r.file(root, "queries", "", c.queries_path);
  r.file(root, "stopwords", "", c.stopwords_path);
  r.file(root, "output_dir", "", c.output_dir);
  r.integer(root, "parallelism", "", c.parallelism, 1);
  r.integer(root, "rng_seed", "", c.rng_seed, 0);
  if (c.corpus_path.empty()) r.error("corpus", "corpus path is required");

  if (const auto n = root["retrieval"]; r.map(n, "retrieval")) {
    r.keys(n, "retrieval", {"k1", "b"});
    r.real(n, "k1", "retrieval", c.bm25.k1);
    r.real(n, "b", "retrieval", c.bm25.b);
    if (!(c.bm25.k1 >= 0.0)) r.error("retrieval.k1", "must be >= 0");
    r.unit_interval("retrieval.b", c.bm25.b);
  }

  if (const auto n = root["embedding"]; r.map(n, "embedding")) {
    r.keys(n, "embedding", {"kind", "dim", "endpoint_url", "model_name", "max_in_flight",
                            "batch_size", "timeout_seconds", "max_attempts"});
    std::string kind = "hashing";
    r.text(n, "kind", "embedding", kind);
    if (kind == "hashing") {
      c.embedding.kind = EmbeddingProviderConfig::Kind::kHashing;
    } else if (kind == "remote") {
      c.embedding.kind = EmbeddingProviderConfig::Kind::kRemote;
    } else {
      r.error("embedding.kind", "must be hashing or remote, got '" + kind + "'");
    }
    r.integer(n, "dim", "embedding", c.embedding.dim, 2);
    r.text(n, "endpoint_url", "embedding", c.embedding.endpoint_url);
    r.text(n, "model_name", "embedding", c.embedding.model_name);
    r.integer(n, "max_in_flight", "embedding", c.embedding.max_in_flight, 1);
    r.integer(n, "batch_size", "embedding", c.embedding.batch_size, 1);
    r.real(n, "timeout_seconds", "embedding", c.embedding.timeout_seconds);
    r.integer(n, "max_attempts", "embedding", c.embedding.max_attempts, 1);
    if (c.embedding.kind == EmbeddingProviderConfig::Kind::kRemote) {
      if (c.embedding.endpoint_url.empty()) r.error("embedding.endpoint_url", "required for remote embeddings");
      if (const char* key = std::getenv(api_key_env_name("embedding").c_str())) c.embedding.api_key = key;
    }
  }

  if (const auto n = root["seeding"]; r.map(n, "seeding")) {
    r.keys(n, "seeding", {"num_clusters", "tau", "lambda", "budget", "strategy",
                          "seed_retrieval_depth"});
    r.integer(n, "num_clusters", "seeding", c.seeding.num_clusters, 1);
    r.real(n, "tau", "seeding", c.seeding.tau);
    r.real(n, "lambda", "seeding", c.seeding.lambda);
    r.integer(n, "budget", "seeding", c.seeding.budget, 0);
    r.integer(n, "seed_retrieval_depth", "seeding", c.seeding.seed_retrieval_depth, 1);
    r.unit_interval("seeding.tau", c.seeding.tau);
    r.unit_interval("seeding.lambda", c.seeding.lambda);
    if (auto s = r.string(n, "strategy", "seeding")) {
      try {
        c.seeding.strategy = parse_strategy(*s);
      } catch (const Error&) {
        r.error("seeding.strategy", "must be corpus_aware, random, stratified or dpp, got '" + *s + "'");
      }
    }
  }

  if (const auto n = root["simulation"]; r.map(n, "simulation")) {
    auto& s = c.simulation;
    r.keys(n, "simulation", {"max_cycles", "retrieval_depth", "adaptive_consultation",
                             "explorations_per_seed", "temperature", "context_token_budget",
                             "analyst", "critics", "fixed_clock"});
    r.integer(n, "max_cycles", "simulation", s.max_cycles, 1);
    r.integer(n, "retrieval_depth", "simulation", s.retrieval_depth, 1);
    r.boolean(n, "adaptive_consultation", "simulation", s.adaptive_consultation);
    r.integer(n, "explorations_per_seed", "simulation", s.explorations_per_seed, 1);
    r.real(n, "temperature", "simulation", s.temperature);
    r.integer(n, "context_token_budget", "simulation", s.context_token_budget, 1);
    r.text(n, "analyst", "simulation", s.analyst);
    if (const auto critics = n["critics"]) {
      if (!critics.IsSequence()) {
        r.error("simulation.critics", "expected a list of backend ids");
      } else {
        for (const auto& id : critics) s.critics.push_back(id.as<std::string>());
      }
    }
    if (const auto clock = n["fixed_clock"]; r.map(clock, "simulation.fixed_clock")) {
      std::int64_t start = 0;
      r.integer(clock, "start_ms", "simulation.fixed_clock", start, 0);
      r.integer(clock, "step_ms", "simulation.fixed_clock", s.fixed_clock_step_ms, 0);
      s.fixed_clock_start_ms = start;
    }
  }

  if (const auto n = root["validation"]; r.map(n, "validation")) {
    auto& v = c.validation;
    r.keys(n, "validation", {"theta", "grounding_threshold", "double_annotation_rate",
                             "max_reretrievals"});
    r.real(n, "theta", "validation", v.theta);
    r.real(n, "grounding_threshold", "validation", v.grounding_threshold);
    r.real(n, "double_annotation_rate", "validation", v.double_annotation_rate);
    r.integer(n, "max_reretrievals", "validation", v.max_reretrievals, 0);
    r.unit_interval("validation.theta", v.theta);
    r.unit_interval("validation.grounding_threshold", v.grounding_threshold);
    r.unit_interval("validation.double_annotation_rate", v.double_annotation_rate);
  }

  if (const auto n = root["backends"]) {
    if (!n.IsSequence()) {
      r.error("backends", "expected a list");
    } else {
      std::set<std::string> ids;
      for (std::size_t i = 0; i < n.size(); ++i) {
        BackendConfig b;
        const std::string path = "backends[" + std::to_string(i) + "]";
        read_backend(r, n[i], path, b);
        if (!b.id.empty() && !ids.insert(b.id).second) {
          r.error(join(path, "id"), "duplicate backend id '" + b.id + "'");
        }
        c.backends.push_back(std::move(b));
      }
    }
  }

  if (const auto n = root["review"]; r.map(n, "review")) {
    r.keys(n, "review", {"port", "static_dir"});
    r.integer(n, "port", "review", c.review_port, 1);
    if (c.review_port > 65535) r.error("review.port", "must be <= 65535");
    r.file(n, "static_dir", "review", c.review_static_dir);
  }
  c.seeding.rng_seed = c.rng_seed;
  c.seeding.bm25 = c.bm25;
}

}  // namespace

std::string Diagnostic::to_string() const {
  std::string out = severity == Severity::kError ? "error: " : "warning: ";
  if (!field.empty()) out += field + ": ";
  return out + message;
}

bool ConfigLoad::ok() const {
  for (const auto& d : diagnostics) {
    if (d.severity == Diagnostic::Severity::kError) return false;
  }
  return true;
}

std::string api_key_env_name(const std::string& backend_id) {
  std::string name = "AGENTSIM_API_KEY_";
  for (unsigned char ch : backend_id) {
    name.push_back(std::isalnum(ch) ? static_cast<char>(std::toupper(ch)) : '_');
  }
  return name;
}

ConfigLoad parse_config(const std::string& yaml_text, const fs::path& base_dir) {
  ConfigLoad load;
  Reader reader(load.diagnostics, base_dir);
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    reader.error("", std::string("YAML syntax: ") + e.what());
    return load;
  }
  if (!root.IsMap()) {
    reader.error("", "top level must be a mapping");
    return load;
  }
  try {
    parse_root(reader, root, load.config);
  } catch (const YAML::Exception& e) {
    reader.error("", std::string("malformed configuration: ") + e.what());
  }
  return load;
}

ConfigLoad load_config(const fs::path& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error& e) {
    ConfigLoad load;
    load.diagnostics.push_back({Diagnostic::Severity::kError, "", e.what()});
    return load;
  }
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  auto load = parse_config(text, base);
  load.config.config_path = path;
  return load;
}

std::vector<Diagnostic> check_config(const RunConfig& c, bool probe) {
  std::vector<Diagnostic> out;
  auto error = [&](std::string field, std::string message) {
    out.push_back({Diagnostic::Severity::kError, std::move(field), std::move(message)});
  };
  auto warning = [&](std::string field, std::string message) {
    out.push_back({Diagnostic::Severity::kWarning, std::move(field), std::move(message)});
  };
  if (!c.corpus_path.empty() && !fs::is_regular_file(c.corpus_path)) {
    error("corpus", "file not found: " + c.corpus_path.string());
  }
  if (c.queries_path.empty()) {
    warning("queries", "no candidate query file; seed-select is unavailable");
  } else if (!fs::is_regular_file(c.queries_path)) {
    error("queries", "file not found: " + c.queries_path.string());
  }
  if (c.stopwords_path && !fs::is_regular_file(*c.stopwords_path)) {
    error("stopwords", "file not found: " + c.stopwords_path->string());
  }
  if (c.review_static_dir && !fs::is_directory(*c.review_static_dir)) {
    warning("review.static_dir", "directory not found: " + c.review_static_dir->string());
  }

  std::map<std::string, const BackendConfig*> backends;
  for (const auto& b : c.backends) backends[b.id] = &b;
  const auto& s = c.simulation;
  if (s.analyst.empty()) {
    warning("simulation.analyst", "no analyst backend; simulate is unavailable");
  } else if (!backends.contains(s.analyst)) {
    error("simulation.analyst", "unknown backend id '" + s.analyst + "'");
  }
  if (!s.analyst.empty() && s.critics.empty()) {
    error("simulation.critics", "at least one critic backend is required");
  }
  for (std::size_t i = 0; i < s.critics.size(); ++i) {
    if (!backends.contains(s.critics[i])) {
      error("simulation.critics[" + std::to_string(i) + "]",
            "unknown backend id '" + s.critics[i] + "'");
    }
  }

  if (probe) {
    for (const auto& b : c.backends) {
      if (b.kind != "remote_chat") continue;
      if (!http::probe(b.remote.endpoint_url, b.remote.retry.timeout_seconds)) {
        error("backends." + b.id, "endpoint unreachable: " + b.remote.endpoint_url);
      }
    }
    if (c.embedding.kind == EmbeddingProviderConfig::Kind::kRemote &&
        !http::probe(c.embedding.endpoint_url, c.embedding.timeout_seconds)) {
      error("embedding.endpoint_url", "endpoint unreachable: " + c.embedding.endpoint_url);
    }
  }
  return out;
}

SimulationConfig make_simulation_config(const RunConfig& c) {
  std::map<std::string, std::shared_ptr<ModelBackend>> built;
  auto backend = [&](const std::string& id) {
    if (auto it = built.find(id); it != built.end()) return it->second;
    for (const auto& b : c.backends) {
      if (b.id == id) return built[id] = make_backend(b);
    }
    throw Error(ErrorCode::kConfigError, "unknown backend id '" + id + "'");
  };
  SimulationConfig sim;
  const auto& s = c.simulation;
  if (s.analyst.empty()) throw Error(ErrorCode::kConfigError, "simulation.analyst is not set");
  sim.analyst = backend(s.analyst);
  for (const auto& id : s.critics) sim.critics.push_back(backend(id));
  sim.max_cycles = s.max_cycles;
  sim.retrieval_depth = s.retrieval_depth;
  sim.validation = c.validation;
  sim.adaptive_consultation = s.adaptive_consultation;
  sim.rng_seed = c.rng_seed;
  sim.bm25 = c.bm25;
  sim.temperature = s.temperature;
  sim.context_token_budget = s.context_token_budget;
  sim.explorations_per_seed = s.explorations_per_seed;
  sim.clock = s.fixed_clock_start_ms ? fixed_step_clock(*s.fixed_clock_start_ms, s.fixed_clock_step_ms)
                                     : system_clock_ms();
  return sim;
}

}  // namespace agentsim
