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

#include "agentsim/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "agentsim/error.hpp"
#include "agentsim/jsonl.hpp"
#include "agentsim/kmeans.hpp"
#include "agentsim/metrics.hpp"
#include "agentsim/review_queue.hpp"
#include "agentsim/review_service.hpp"
#include "agentsim/simulation.hpp"
#include "agentsim/stats.hpp"
#include "agentsim/validation.hpp"

namespace agentsim {

namespace fs = std::filesystem;

namespace {

constexpr int kRawSchemaVersion = 1;

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

nlohmann::ordered_json manifest_to_json(const ManifestEntry& e) {
  nlohmann::ordered_json j;
  j["schema_version"] = kRawSchemaVersion;
  j["seed_id"] = e.seed_id;
  j["status"] = e.status;
  j["trace_ids"] = e.trace_ids;
  j["outcomes"] = e.outcomes;
  j["flagged_items"] = e.flagged_items;
  j["error"] = e.error;
  return j;
}

std::vector<SeedRecord> select_for_run(const RunConfig& config, const Corpus& corpus,
                                       std::vector<std::string>& warnings, SeedSet* out_set) {
  auto queries = load_queries(config.queries_path, &warnings);
  const auto stopwords = load_run_stopwords(config);
  const auto provider = make_provider(config.embedding, stopwords);
  auto set = select_seeds(queries, corpus, config.seeding, *provider);
  warnings.insert(warnings.end(), set.warnings.begin(), set.warnings.end());
  auto seeds = set.seeds;
  if (out_set) *out_set = std::move(set);
  return seeds;
}

std::string fixed(double v, int digits = 3) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

}  // namespace

std::string error_json(const std::string& command, const std::exception& e) {
  nlohmann::ordered_json j;
  j["command"] = command;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["error"] = to_string(err->code());
  } else {
    j["error"] = "InternalError";
  }
  j["message"] = e.what();
  return j.dump();
}

std::vector<std::string> load_queries(const fs::path& path, std::vector<std::string>* warnings) {
  std::vector<std::string> queries;
  std::set<std::string> seen;
  std::size_t duplicates = 0;
  io::for_each_line(path, [&](std::string_view raw, std::size_t line_no) {
    std::string line = trim(raw);
    if (line.empty()) return;
    std::string query = line;
    if (line.front() == '{') {
      try {
        const auto j = nlohmann::json::parse(line);
        if (j.contains("query")) {
          query = j.at("query").get<std::string>();
        } else if (j.contains("text")) {
          query = j.at("text").get<std::string>();
        } else {
          throw Error(ErrorCode::kCorruptData, "object has no query field");
        }
      } catch (const std::exception& e) {
        throw Error(ErrorCode::kCorruptData,
                    path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
      query = trim(query);
      if (query.empty()) return;
    }
    if (!seen.insert(query).second) {
      ++duplicates;
      return;
    }
    queries.push_back(std::move(query));
  });
  if (duplicates > 0 && warnings) {
    warnings->push_back(std::to_string(duplicates) + " duplicate queries dropped");
  }
  return queries;
}

StopwordSet load_run_stopwords(const RunConfig& config) {
  return config.stopwords_path ? load_stopwords(*config.stopwords_path) : default_stopwords();
}

Corpus load_run_corpus(const RunConfig& config) {
  return build_index(load_documents(config.corpus_path), load_run_stopwords(config));
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::vector<ManifestEntry> entries;
  if (!fs::exists(path)) return entries;
  std::map<std::string, std::size_t> index;
  io::for_each_line(path, [&](std::string_view line, std::size_t) {
    ManifestEntry e;
    try {
      const auto j = nlohmann::json::parse(line);
      e.seed_id = j.at("seed_id").get<std::string>();
      e.status = j.at("status").get<std::string>();
      e.trace_ids = j.value("trace_ids", std::vector<std::string>{});
      e.outcomes = j.value("outcomes", std::vector<std::string>{});
      e.flagged_items = j.value("flagged_items", std::size_t{0});
      e.error = j.value("error", std::string());
    } catch (const std::exception&) {
      return;  // torn final line from an interrupted run
    }
    if (auto it = index.find(e.seed_id); it != index.end()) {
      entries[it->second] = std::move(e);
    } else {
      index[e.seed_id] = entries.size();
      entries.push_back(std::move(e));
    }
  });
  return entries;
}

std::vector<StoredTrace> read_raw_traces(const fs::path& raw_dir) {
  std::vector<StoredTrace> out;
  if (!fs::is_directory(raw_dir)) return out;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(raw_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    try {
      const auto j = nlohmann::json::parse(io::read_file(f));
      out.push_back({seed_from_json(j.at("seed")), trace_from_json(j.at("trace"))});
    } catch (const std::exception& e) {
      throw Error(ErrorCode::kCorruptData, f.string() + ": " + e.what());
    }
  }
  return out;
}

ExportSummary export_dataset(const OutputLayout& layout, const Corpus& corpus) {
  ExportSummary summary;
  auto stored = read_raw_traces(layout.raw());
  ReviewQueue queue(layout.review());
  std::map<std::string, ReviewItem> items;
  for (auto& item : queue.items()) items.emplace(item.item_id, std::move(item));

  std::vector<Trace> finalized;
  std::vector<Trajectory> trajectories;
  for (auto& [seed, trace] : stored) {
    ++summary.traces;
    for (const auto& step : std::vector<TraceStep>(trace.steps)) {
      if (step.review_item_id.empty()) continue;
      const auto it = items.find(step.review_item_id);
      if (it != items.end() && it->second.status == ReviewStatus::kDecided) {
        apply_resolution(trace, it->second);
      }
    }
    if (trace.outcome == Outcome::kDiscarded) {
      ++summary.discarded;
      continue;
    }
    if (trace.has_pending_review()) {
      ++summary.pending;
      continue;
    }
    trajectories.push_back(project_trajectory(trace, seed));
    finalized.push_back(std::move(trace));
  }
  summary.counts = write_dataset(layout.root, finalized, trajectories, corpus);
  return summary;
}

int cmd_validate(const fs::path& config_path, bool probe, std::ostream& out, std::ostream& err) {
  auto load = load_config(config_path);
  auto diagnostics = load.diagnostics;
  if (load.ok()) {
    auto more = check_config(load.config, probe);
    diagnostics.insert(diagnostics.end(), more.begin(), more.end());
  }
  std::size_t errors = 0;
  for (const auto& d : diagnostics) {
    if (d.severity == Diagnostic::Severity::kError) ++errors;
    err << d.to_string() << "\n";
  }
  if (errors > 0) {
    err << errors << " error(s) in " << config_path.string() << "\n";
    return kExitConfig;
  }
  out << "OK\n";
  return kExitOk;
}

int cmd_seed_select(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.queries_path.empty()) throw Error(ErrorCode::kConfigError, "queries path is not configured");
    const OutputLayout layout{config.output_dir};
    fs::create_directories(layout.root);
    const Corpus corpus = load_run_corpus(config);
    std::vector<std::string> warnings;
    SeedSet set;
    const auto seeds = select_for_run(config, corpus, warnings, &set);
    write_seeds(layout.seeds(), seeds);

    for (const auto& w : warnings) err << "warning: " << w << "\n";
    double novelty = 0.0;
    std::map<std::size_t, std::size_t> per_cluster;
    for (const auto& s : seeds) {
      novelty += s.novelty;
      ++per_cluster[s.cluster_id];
    }
    out << "selected " << seeds.size() << " seeds (" << to_string(config.seeding.strategy)
        << ") into " << layout.seeds().string() << "\n";
    out << "clusters covered: " << per_cluster.size() << "/" << set.assignment.k() << "\n";
    out << "mean novelty: " << fixed(seeds.empty() ? 0.0 : novelty / static_cast<double>(seeds.size()))
        << "\n";
    out << "seeds per cluster:";
    for (const auto& [cluster, n] : per_cluster) out << " " << cluster << ":" << n;
    out << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << error_json("seed-select", e) << "\n";
    return kExitFailure;
  }
}

int cmd_simulate(const RunConfig& config, const std::optional<fs::path>& seeds_path,
                 std::ostream& out, std::ostream& err) {
  try {
    const OutputLayout layout{config.output_dir};
    fs::create_directories(layout.raw());
    const Corpus corpus = load_run_corpus(config);
    const auto seeds = read_seeds(seeds_path.value_or(layout.seeds()));
    const SimulationConfig sim = make_simulation_config(config);
    sim.validate();

    std::set<std::string> completed;
    for (const auto& e : read_manifest(layout.manifest())) {
      if (e.status == "completed") completed.insert(e.seed_id);
    }
    std::vector<const SeedRecord*> todo;
    for (const auto& s : seeds) {
      if (!completed.contains(s.seed_id)) todo.push_back(&s);
    }

    ReviewQueue queue(layout.review());
    std::mutex manifest_mutex;
    io::LineWriter manifest(layout.manifest(), /*append=*/true);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> succeeded{0};
    std::atomic<std::size_t> failed{0};
    std::atomic<std::size_t> flagged{0};

    auto worker = [&] {
      for (std::size_t i = next++; i < todo.size(); i = next++) {
        const SeedRecord& seed = *todo[i];
        ManifestEntry entry;
        entry.seed_id = seed.seed_id;
        entry.status = "completed";
        std::vector<SimulationResult> results;
        try {
          for (std::size_t x = 0; x < sim.explorations_per_seed; ++x) {
            results.push_back(run_trajectory(seed, corpus, sim, x));
            if (!results.back().error.empty()) {
              entry.status = "failed";
              entry.error = results.back().error;
              break;
            }
          }
        } catch (const std::exception& e) {
          entry.status = "failed";
          entry.error = e.what();
        }
        if (entry.status == "completed") {
          try {
            for (const auto& r : results) {
              nlohmann::ordered_json raw;
              raw["schema_version"] = kRawSchemaVersion;
              raw["seed"] = seed_to_json(seed);
              raw["trace"] = trace_to_json(r.trace);
              io::write_file_atomic(layout.raw() / (r.trace.trace_id + ".json"), raw.dump());
              for (const auto& item : r.review_items) queue.enqueue(item);
              entry.trace_ids.push_back(r.trace.trace_id);
              entry.outcomes.emplace_back(to_string(r.trace.outcome));
              entry.flagged_items += r.review_items.size();
            }
          } catch (const std::exception& e) {
            entry.status = "failed";
            entry.error = e.what();
          }
        }
        (entry.status == "completed" ? succeeded : failed)++;
        flagged += entry.flagged_items;
        std::lock_guard lock(manifest_mutex);
        manifest.write_line(manifest_to_json(entry).dump());
        manifest.flush();
      }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(config.parallelism, todo.size()));
    std::vector<std::thread> pool;
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    manifest.close();

    const auto summary = export_dataset(layout, corpus);
    out << "seeds: " << seeds.size() << " total, " << completed.size() << " already complete, "
        << succeeded.load() << " simulated, " << failed.load() << " failed\n";
    out << "review items flagged this run: " << flagged.load() << "\n";
    out << "exported " << summary.counts.trajectories << " trajectories, " << summary.counts.supervised
        << " supervised pairs (" << summary.pending << " awaiting review, " << summary.discarded
        << " discarded)\n";
    for (const auto& e : read_manifest(layout.manifest())) {
      if (e.status == "failed") err << "failed: " << e.seed_id << ": " << e.error << "\n";
    }
    return completed.size() + succeeded.load() > 0 ? kExitOk : kExitFailure;
  } catch (const std::exception& e) {
    err << error_json("simulate", e) << "\n";
    return kExitFailure;
  }
}

int cmd_export(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const OutputLayout layout{config.output_dir};
    if (!fs::is_directory(layout.raw())) {
      throw Error(ErrorCode::kCorruptData, "no simulation output under " + layout.root.string());
    }
    const Corpus corpus = load_run_corpus(config);
    const auto summary = export_dataset(layout, corpus);
    out << "exported " << summary.counts.trace_lines << " trace steps, "
        << summary.counts.trajectories << " trajectories, " << summary.counts.supervised
        << " supervised pairs; " << summary.pending << " awaiting review, " << summary.discarded
        << " discarded\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << error_json("export", e) << "\n";
    return kExitFailure;
  }
}

int cmd_metrics(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const OutputLayout layout{config.output_dir};
    const Corpus corpus = load_run_corpus(config);
    const auto dataset = read_dataset(layout.root);
    if (dataset.trajectories.empty()) {
      throw Error(ErrorCode::kCorruptData,
                  "no exported trajectories under " + (layout.root / "trajectories").string());
    }
    const auto stopwords = load_run_stopwords(config);
    nlohmann::ordered_json report;
    report["behavior"] = to_json(behavior_metrics(dataset.trajectories, stopwords));

    const auto grounding = grounding_rate(dataset.trajectories, corpus, config.validation);
    nlohmann::ordered_json g;
    g["substantive"] = grounding.substantive;
    g["grounded"] = grounding.grounded;
    g["refusals"] = grounding.refusals;
    g["grounding_rate"] = grounding.rate();
    g["mean_coverage"] = grounding.mean_coverage;
    report["grounding"] = g;

    const auto unresolved = unresolved_doc_ids(dataset, corpus);
    report["unresolved_doc_ids"] = unresolved;

    if (fs::exists(layout.seeds()) && !config.queries_path.empty() &&
        fs::exists(config.queries_path)) {
      const auto seeds = read_seeds(layout.seeds());
      if (seeds.size() >= 2) {
        const auto queries = load_queries(config.queries_path);
        const auto provider = make_provider(config.embedding, stopwords);
        const auto pool = provider->embed(queries);
        const auto assignment = cluster_queries(pool, config.seeding.num_clusters, config.seeding.rng_seed);
        SeedSet set;
        set.seeds = seeds;
        report["seeding"] = to_json(seeding_metrics(set, assignment, corpus, *provider, config.bm25));
      }
    }

    // Per-analyst comparison of exploration breadth per trajectory.
    std::map<std::string, std::vector<double>> breadth;
    std::map<std::string, std::map<std::string, double>> reformulations;
    for (const auto& t : dataset.trajectories) {
      std::set<std::string> docs;
      for (const auto& c : t.tool_calls) {
        if (c.tool == "search") docs.insert(c.doc_ids.begin(), c.doc_ids.end());
      }
      breadth[t.analyst_id].push_back(static_cast<double>(docs.size()));
      auto& counts = reformulations[t.analyst_id];
      for (const auto& [old_q, new_q] : reformulation_pairs(t)) {
        counts[std::string(to_string(classify_reformulation(old_q, new_q, stopwords)))] += 1.0;
      }
    }
    std::vector<stats::LabeledSample> groups;
    for (const auto& [label, values] : breadth) {
      if (values.size() >= 2) groups.push_back({label, values});
    }
    if (groups.size() >= 2) {
      const auto tests = stats::significance_tests(groups);
      std::string csv = "group_a,group_b,mann_whitney_u,p,cohens_d,holm_reject\n";
      auto rows = nlohmann::ordered_json::array();
      for (const auto& t : tests) {
        csv += t.a + "," + t.b + "," + std::to_string(t.mann_whitney.u1) + "," +
               std::to_string(t.mann_whitney.p) + "," +
               (t.cohens_d ? std::to_string(*t.cohens_d) : std::string()) + "," +
               (t.holm_reject ? "true" : "false") + "\n";
        nlohmann::ordered_json row;
        row["a"] = t.a;
        row["b"] = t.b;
        row["mann_whitney_u"] = t.mann_whitney.u1;
        row["p"] = t.mann_whitney.p;
        row["cohens_d"] = t.cohens_d ? nlohmann::ordered_json(*t.cohens_d) : nlohmann::ordered_json(nullptr);
        row["holm_reject"] = t.holm_reject;
        rows.push_back(std::move(row));
      }
      report["breadth_tests"] = rows;
      io::write_file_atomic(layout.metrics_tests(), csv);
    }
    if (reformulations.size() >= 2) {
      std::vector<std::vector<double>> table;
      for (const auto& [label, counts] : reformulations) {
        table.push_back({counts.count("conceptual") ? counts.at("conceptual") : 0.0,
                         counts.count("procedural") ? counts.at("procedural") : 0.0,
                         counts.count("syntactic") ? counts.at("syntactic") : 0.0});
      }
      try {
        const auto chi = stats::chi_squared(table);
        nlohmann::ordered_json c;
        c["statistic"] = chi.statistic;
        c["dof"] = chi.dof;
        c["p"] = chi.p;
        c["cramers_v"] = chi.cramers_v;
        report["reformulation_chi_squared"] = c;
      } catch (const Error&) {
        report["reformulation_chi_squared"] = nullptr;
      }
    }

    io::write_file_atomic(layout.metrics(), report.dump(2) + "\n");
    out << report.dump(2) << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    err << error_json("metrics", e) << "\n";
    return kExitFailure;
  }
}

int cmd_review_serve(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const OutputLayout layout{config.output_dir};
    ReviewQueue queue(layout.review());
    std::optional<Corpus> corpus;
    if (fs::is_regular_file(config.corpus_path)) corpus.emplace(load_run_corpus(config));
    ReviewServiceOptions options;
    options.port = config.review_port;
    options.static_dir = config.review_static_dir;
    ReviewService service(queue, corpus ? &*corpus : nullptr, options);
    service.bind();
    out << "review service listening on http://" << options.host << ":" << service.port()
        << " (queue " << layout.review().string() << ")\n"
        << std::flush;
    service.listen();
    return kExitOk;
  } catch (const std::exception& e) {
    err << error_json("review-serve", e) << "\n";
    return kExitFailure;
  }
}

}  // namespace agentsim
