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

#include "agentsim/dataset_io.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "agentsim/error.hpp"

namespace agentsim {

namespace fs = std::filesystem;

namespace {

nlohmann::ordered_json versioned(const nlohmann::ordered_json& body) {
  nlohmann::ordered_json j;
  j["schema_version"] = kDatasetSchemaVersion;
  for (const auto& [key, value] : body.items()) j[key] = value;
  return j;
}

void check_version(const nlohmann::json& j, const fs::path& path, std::size_t line_no) {
  const auto it = j.find("schema_version");
  if (it == j.end() || !it->is_number_integer() || it->get<int>() > kDatasetSchemaVersion) {
    throw Error(ErrorCode::kCorruptData, path.string() + ":" + std::to_string(line_no) +
                                             ": missing or unsupported schema_version");
  }
}

template <typename Fn>
void read_records(const fs::path& path, Fn&& fn) {
  io::for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kCorruptData,
                  path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    check_version(j, path, line_no);
    fn(j);
  });
}

template <typename Fn>
std::size_t write_records(const fs::path& path, Fn&& produce) {
  try {
    io::LineWriter writer(path);
    std::size_t n = 0;
    produce([&](const std::string& line) {
      writer.write_line(line);
      ++n;
    });
    writer.close();
    return n;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kPendingReviewItems) throw;
    throw Error(ErrorCode::kIOError, e.what());
  }
}

void require_finalized(const Trace& trace) {
  if (trace.has_pending_review()) {
    throw Error(ErrorCode::kPendingReviewItems,
                "trace " + trace.trace_id + " has steps awaiting human review");
  }
}

const TraceStep* terminal_step(const Trace& trace) {
  for (auto it = trace.steps.rbegin(); it != trace.steps.rend(); ++it) {
    if (it->executed()) return &*it;
  }
  return nullptr;
}

std::string document_text(const Corpus& corpus, const std::string& doc_id) {
  const auto idx = corpus.find(doc_id);
  if (!idx) throw Error(ErrorCode::kUnknownDocId, "unknown doc id " + doc_id);
  return corpus.document(*idx).text;
}

}  // namespace

nlohmann::ordered_json supervised_to_json(const SupervisedPair& pair) {
  nlohmann::ordered_json j;
  j["source_trace_id"] = pair.source_trace_id;
  j["question"] = pair.question;
  auto docs = nlohmann::ordered_json::array();
  for (const auto& [id, text] : pair.documents) {
    nlohmann::ordered_json d;
    d["doc_id"] = id;
    d["text"] = text;
    docs.push_back(std::move(d));
  }
  j["documents"] = std::move(docs);
  j["answer"] = pair.answer;
  j["abstain"] = pair.abstained;
  j["reasoning_chain"] = pair.reasoning_chain;
  return j;
}

SupervisedPair supervised_from_json(const nlohmann::json& j) {
  try {
    SupervisedPair pair;
    pair.source_trace_id = j.at("source_trace_id").get<std::string>();
    pair.question = j.at("question").get<std::string>();
    for (const auto& d : j.at("documents")) {
      pair.documents.emplace_back(d.at("doc_id").get<std::string>(), d.at("text").get<std::string>());
    }
    pair.answer = j.at("answer").get<std::string>();
    pair.abstained = j.at("abstain").get<bool>();
    pair.reasoning_chain = j.at("reasoning_chain").get<std::vector<std::string>>();
    return pair;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kCorruptData, std::string("malformed supervised pair: ") + e.what());
  }
}

std::vector<std::string> trace_lines(const Trace& trace) {
  std::vector<std::string> lines;
  for (const auto& step : trace.steps) {
    nlohmann::ordered_json j;
    j["schema_version"] = kDatasetSchemaVersion;
    j["seed_id"] = trace.seed_id;
    j["seed_query"] = trace.seed_query;
    j["analyst_id"] = trace.analyst_id;
    j["template_hash"] = trace.template_hash;
    j["outcome"] = to_string(trace.outcome);
    const auto body = step_to_json(step);
    for (const auto& [key, value] : body.items()) j[key] = value;
    lines.push_back(j.dump());
  }
  return lines;
}

std::string trajectory_line(const Trajectory& trajectory) {
  return versioned(trajectory_to_json(trajectory)).dump();
}

std::string supervised_line(const SupervisedPair& pair) {
  return versioned(supervised_to_json(pair)).dump();
}

std::size_t write_traces(std::span<const Trace> traces, const fs::path& path) {
  for (const auto& t : traces) {
    if (t.outcome != Outcome::kDiscarded) require_finalized(t);
  }
  return write_records(path, [&](auto&& emit) {
    for (const auto& t : traces) {
      if (t.outcome == Outcome::kDiscarded) continue;
      for (const auto& line : trace_lines(t)) emit(line);
    }
  });
}

std::size_t write_trajectories(std::span<const Trajectory> trajectories, const fs::path& path) {
  return write_records(path, [&](auto&& emit) {
    for (const auto& t : trajectories) {
      if (t.outcome != Outcome::kDiscarded) emit(trajectory_line(t));
    }
  });
}

std::size_t write_supervised(std::span<const SupervisedPair> pairs, const fs::path& path) {
  return write_records(path, [&](auto&& emit) {
    for (const auto& p : pairs) emit(supervised_line(p));
  });
}

std::vector<Trace> read_traces(const fs::path& path) {
  std::vector<Trace> traces;
  read_records(path, [&](const nlohmann::json& j) {
    const auto trace_id = j.at("trace_id").get<std::string>();
    if (traces.empty() || traces.back().trace_id != trace_id) {
      Trace t;
      t.trace_id = trace_id;
      t.seed_id = j.at("seed_id").get<std::string>();
      t.seed_query = j.at("seed_query").get<std::string>();
      t.analyst_id = j.at("analyst_id").get<std::string>();
      t.template_hash = j.at("template_hash").get<std::string>();
      t.outcome = parse_outcome(j.at("outcome").get<std::string>());
      traces.push_back(std::move(t));
    }
    traces.back().steps.push_back(step_from_json(j));
  });
  return traces;
}

std::vector<Trajectory> read_trajectories(const fs::path& path) {
  std::vector<Trajectory> out;
  read_records(path, [&](const nlohmann::json& j) { out.push_back(trajectory_from_json(j)); });
  return out;
}

std::vector<SupervisedPair> read_supervised(const fs::path& path) {
  std::vector<SupervisedPair> out;
  read_records(path, [&](const nlohmann::json& j) { out.push_back(supervised_from_json(j)); });
  return out;
}

std::vector<SupervisedPair> extract_supervised_pairs(std::span<const Trace> traces,
                                                     const Corpus& corpus) {
  std::vector<SupervisedPair> pairs;
  for (const auto& trace : traces) {
    if (trace.outcome == Outcome::kDiscarded) continue;
    require_finalized(trace);
    const TraceStep* last = terminal_step(trace);
    if (!last) continue;
    const AgentAction& final_action = *last->action;
    if (final_action.type != ActionType::kSynthesize && final_action.type != ActionType::kAbstain) {
      continue;
    }

    SupervisedPair pair;
    pair.source_trace_id = trace.trace_id;
    pair.question = trace.seed_query;
    pair.abstained = final_action.type == ActionType::kAbstain;
    pair.answer = final_action.text;

    std::vector<std::string> doc_ids;
    if (pair.abstained) {
      std::set<std::string> seen;
      for (const auto& step : trace.steps) {
        if (!step.executed() || !step.observation.retrieval) continue;
        for (const auto& hit : step.observation.retrieval->hits) {
          if (seen.insert(hit.doc_id).second) doc_ids.push_back(hit.doc_id);
        }
      }
    } else {
      doc_ids = final_action.doc_ids;
    }
    for (const auto& id : doc_ids) pair.documents.emplace_back(id, document_text(corpus, id));

    // Analyst thoughts of cycles whose executed action was kept as is or
    // settled by a reviewer.
    for (const auto& step : trace.steps) {
      if (step.role != AgentRole::kJudge) continue;
      if (step.status != StepStatus::kAccepted && step.status != StepStatus::kPromoted &&
          step.status != StepStatus::kRevised) {
        continue;
      }
      for (const auto& s : trace.steps) {
        if (s.role == AgentRole::kAnalyst && s.cycle_index == step.cycle_index) {
          pair.reasoning_chain.push_back(s.thought);
          break;
        }
      }
    }
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

ShardedWriter::ShardedWriter(fs::path dir, std::size_t shard_size)
    : dir_(std::move(dir)), shard_size_(shard_size == 0 ? kShardSize : shard_size) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) throw Error(ErrorCode::kIOError, "cannot create " + dir_.string() + ": " + ec.message());
}

void ShardedWriter::write_line(std::string_view line) {
  if (!current_ || lines_ % shard_size_ == 0) {
    if (current_) current_->close();
    char name[32];
    std::snprintf(name, sizeof name, "part-%05zu.jsonl.gz", files_.size());
    files_.push_back(dir_ / name);
    try {
      current_ = std::make_unique<io::LineWriter>(files_.back());
    } catch (const Error& e) {
      throw Error(ErrorCode::kIOError, e.what());
    }
  }
  current_->write_line(line);
  ++lines_;
}

void ShardedWriter::close() {
  if (current_) {
    current_->close();
    current_.reset();
  }
}

std::vector<fs::path> shard_files(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::is_directory(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.find(".jsonl") != std::string::npos) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

DatasetCounts write_dataset(const fs::path& out_dir, std::span<const Trace> traces,
                            std::span<const Trajectory> trajectories, const Corpus& corpus,
                            std::size_t shard_size) {
  std::vector<Trace> kept;
  for (const auto& t : traces) {
    if (t.outcome == Outcome::kDiscarded) continue;
    require_finalized(t);
    kept.push_back(t);
  }
  const auto pairs = extract_supervised_pairs(kept, corpus);
  std::set<std::string> kept_ids;
  for (const auto& t : kept) kept_ids.insert(t.trace_id);

  DatasetCounts counts;
  for (const char* sub : {"traces", "trajectories", "supervised"}) {
    std::error_code ec;
    fs::remove_all(out_dir / sub, ec);
  }
  {
    ShardedWriter w(out_dir / "traces", shard_size);
    for (const auto& t : kept) {
      for (const auto& line : trace_lines(t)) w.write_line(line);
    }
    w.close();
    counts.trace_lines = w.lines();
  }
  {
    ShardedWriter w(out_dir / "trajectories", shard_size);
    for (const auto& t : trajectories) {
      if (t.outcome == Outcome::kDiscarded || !kept_ids.contains(t.trace_id)) continue;
      w.write_line(trajectory_line(t));
    }
    w.close();
    counts.trajectories = w.lines();
  }
  {
    ShardedWriter w(out_dir / "supervised", shard_size);
    for (const auto& p : pairs) w.write_line(supervised_line(p));
    w.close();
    counts.supervised = w.lines();
  }
  return counts;
}

Dataset read_dataset(const fs::path& out_dir) {
  Dataset ds;
  for (const auto& f : shard_files(out_dir / "traces")) {
    auto part = read_traces(f);
    for (auto& t : part) {
      // A trace split across a shard boundary continues in the next file.
      if (!ds.traces.empty() && ds.traces.back().trace_id == t.trace_id) {
        auto& steps = ds.traces.back().steps;
        steps.insert(steps.end(), t.steps.begin(), t.steps.end());
      } else {
        ds.traces.push_back(std::move(t));
      }
    }
  }
  for (const auto& f : shard_files(out_dir / "trajectories")) {
    auto part = read_trajectories(f);
    ds.trajectories.insert(ds.trajectories.end(), part.begin(), part.end());
  }
  for (const auto& f : shard_files(out_dir / "supervised")) {
    auto part = read_supervised(f);
    ds.supervised.insert(ds.supervised.end(), part.begin(), part.end());
  }
  return ds;
}

std::vector<std::string> unresolved_doc_ids(const Dataset& dataset, const Corpus& corpus) {
  std::set<std::string> missing;
  auto check = [&](const std::string& id) {
    if (!corpus.contains(id)) missing.insert(id);
  };
  for (const auto& t : dataset.traces) {
    for (const auto& s : t.steps) {
      if (s.action) {
        for (const auto& id : s.action->doc_ids) check(id);
      }
      if (s.observation.retrieval) {
        for (const auto& h : s.observation.retrieval->hits) check(h.doc_id);
      }
    }
  }
  for (const auto& t : dataset.trajectories) {
    for (const auto& c : t.tool_calls) {
      for (const auto& id : c.doc_ids) check(id);
    }
    if (t.final) {
      for (const auto& id : t.final->cited_doc_ids) check(id);
    }
    for (const auto& id : t.seed.retrieved_doc_ids) check(id);
  }
  for (const auto& p : dataset.supervised) {
    for (const auto& [id, text] : p.documents) check(id);
  }
  return {missing.begin(), missing.end()};
}

}  // namespace agentsim
