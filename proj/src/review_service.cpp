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

#include "agentsim/review_service.hpp"

#include <algorithm>

#include "httplib.h"

#include "agentsim/error.hpp"
#include "agentsim/text.hpp"

namespace agentsim {

namespace {

constexpr std::size_t kSnippetWords = 60;

const char* kRubric =
    "Judge each candidate on query-document relevance, evidence sufficiency, and synthesis "
    "faithfulness. Promote the best candidate, revise it when none is adequate, or discard the "
    "trajectory when it cannot be salvaged.";

nlohmann::ordered_json error_body(const std::string& code, const std::string& message) {
  nlohmann::ordered_json j;
  j["error"] = code;
  j["message"] = message;
  return j;
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kAlreadyDecided:
    case ErrorCode::kStaleItem: return 409;
    case ErrorCode::kInvalidDecision:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kUnparseableAction: return 422;
    default: return 500;
  }
}

std::string snippet(std::string_view text) {
  std::string out;
  std::size_t words = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r';
    if (!space && !in_word && ++words > kSnippetWords) {
      out += "...";
      return out;
    }
    in_word = !space;
    out.push_back(c);
  }
  return out;
}

nlohmann::ordered_json summary(const ReviewItem& item) {
  nlohmann::ordered_json j;
  j["item_id"] = item.item_id;
  j["trace_id"] = item.trace_id;
  j["seed_query"] = item.seed_query;
  j["divergence_score"] = item.divergence_score;
  j["candidate_count"] = item.candidates.size();
  j["double_annotation"] = item.double_annotation;
  j["status"] = item.status == ReviewStatus::kPending ? "pending" : "decided";
  j["needs_adjudication"] = item.needs_adjudication;
  j["decision_count"] = item.decisions.size();
  j["version"] = item.version;
  return j;
}

// Body fields: verdict, chosen_candidate_index, revised_action, notes,
// reviewer_role, version.
ReviewDecision parse_decision_body(const std::string& body, const std::string& reviewer_id) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidDecision, std::string("body is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::kInvalidDecision, "body must be a JSON object");
  ReviewDecision d;
  d.reviewer_id = reviewer_id;
  try {
    if (!j.contains("verdict")) throw Error(ErrorCode::kInvalidDecision, "verdict is required");
    d.verdict = parse_verdict(j.at("verdict").get<std::string>());
    if (auto it = j.find("chosen_candidate_index"); it != j.end() && !it->is_null()) {
      if (!it->is_number_integer() || it->get<long long>() < 0) {
        throw Error(ErrorCode::kInvalidDecision, "chosen_candidate_index must be a non-negative integer");
      }
      d.chosen_candidate_index = it->get<std::size_t>();
    }
    if (auto it = j.find("revised_action"); it != j.end() && !it->is_null()) {
      try {
        d.revised_action = action_from_json(*it);
      } catch (const Error& e) {
        throw Error(ErrorCode::kInvalidDecision, std::string("revised_action: ") + e.what());
      }
    }
    if (auto it = j.find("notes"); it != j.end() && !it->is_null()) d.notes = it->get<std::string>();
    if (auto it = j.find("reviewer_role"); it != j.end() && !it->is_null()) {
      d.reviewer_role = it->get<std::string>();
    }
    if (auto it = j.find("version"); it != j.end() && !it->is_null()) {
      d.expected_version = it->get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kInvalidDecision, std::string("malformed field: ") + e.what());
  }
  return d;
}

}  // namespace

ReviewApi::ReviewApi(ReviewQueue& queue, const Corpus* corpus) : queue_(queue), corpus_(corpus) {}

ReviewApi::Response ReviewApi::list_items(const std::string& status_filter,
                                          std::optional<std::size_t> limit) {
  if (status_filter != "pending" && status_filter != "decided" && status_filter != "all") {
    return {422, error_body("InvalidArgument", "status must be pending, decided or all")};
  }
  try {
    queue_.reload();
  } catch (const Error& e) {
    return {500, error_body(std::string(to_string(e.code())), e.what())};
  }
  auto items = queue_.items();
  std::vector<ReviewItem> selected;
  for (auto& item : items) {
    const bool pending = item.status == ReviewStatus::kPending;
    if (status_filter == "all" || (status_filter == "pending") == pending) {
      selected.push_back(std::move(item));
    }
  }
  std::stable_sort(selected.begin(), selected.end(), [](const ReviewItem& a, const ReviewItem& b) {
    if (a.divergence_score != b.divergence_score) return a.divergence_score > b.divergence_score;
    return a.item_id < b.item_id;
  });
  if (limit && selected.size() > *limit) selected.resize(*limit);
  auto body = nlohmann::ordered_json::array();
  for (const auto& item : selected) body.push_back(summary(item));
  return {200, body};
}

ReviewApi::Response ReviewApi::get_item(const std::string& item_id) {
  const auto item = queue_.get(item_id);
  if (!item) return {404, error_body("NotFound", "no review item " + item_id)};
  auto body = review_item_to_json(*item);
  body["status"] = item->status == ReviewStatus::kPending ? "pending" : "decided";
  auto evidence = nlohmann::ordered_json::object();
  if (corpus_) {
    for (const auto& c : item->candidates) {
      if (c.action.type != ActionType::kSynthesize && c.action.type != ActionType::kSummarize) continue;
      for (const auto& id : c.action.doc_ids) {
        if (const auto idx = corpus_->find(id)) evidence[id] = snippet(corpus_->document(*idx).text);
      }
    }
  }
  body["evidence"] = std::move(evidence);
  body["rubric"] = kRubric;
  return {200, body};
}

ReviewApi::Response ReviewApi::post_decision(const std::string& item_id,
                                             const std::string& reviewer_id,
                                             const std::string& body) {
  if (reviewer_id.empty()) {
    return {422, error_body("InvalidDecision", "X-Reviewer-Id header is required")};
  }
  try {
    auto decision = parse_decision_body(body, reviewer_id);
    const auto updated = queue_.decide(item_id, std::move(decision));
    auto out = review_item_to_json(updated);
    out["status"] = updated.status == ReviewStatus::kPending ? "pending" : "decided";
    return {200, out};
  } catch (const Error& e) {
    return {status_for(e.code()), error_body(std::string(to_string(e.code())), e.what())};
  }
}

ReviewApi::Response ReviewApi::stats() {
  try {
    queue_.reload();
    const auto s = queue_.stats();
    nlohmann::ordered_json j;
    j["pending"] = s.pending;
    j["decided"] = s.decided;
    j["promote"] = s.promote;
    j["revise"] = s.revise;
    j["discard"] = s.discard;
    j["needs_adjudication"] = s.needs_adjudication;
    j["agreement_rate"] = s.agreement_rate ? nlohmann::ordered_json(*s.agreement_rate)
                                           : nlohmann::ordered_json(nullptr);
    return {200, j};
  } catch (const Error& e) {
    return {500, error_body(std::string(to_string(e.code())), e.what())};
  }
}

std::string review_api_docs() {
  return R"(<!doctype html>
<html><head><meta charset="utf-8"><title>Review API</title></head><body>
<h1>Review API</h1>
<p>All bodies are UTF-8 JSON. Mutating requests must send the reviewer identity in the
<code>X-Reviewer-Id</code> header.</p>
<h2>GET /api/review/items?status=pending|decided|all&amp;limit=N</h2>
<p>Item summaries sorted by divergence_score descending (ties by item_id). Fields:
item_id, trace_id, seed_query, divergence_score, candidate_count, double_annotation, status,
needs_adjudication, decision_count, version.</p>
<h2>GET /api/review/items/{id}</h2>
<p>The full item: item_id, trace_id, step_index, seed_query, context_excerpt, candidates
[{model_id, action}], divergence_score, status, double_annotation, assigned_reviewers,
decisions, needs_adjudication, version, evidence {doc_id: snippet}, rubric. 404 for unknown ids.</p>
<h2>POST /api/review/items/{id}/decision</h2>
<p>Body: {"verdict": "promote"|"revise"|"discard", "chosen_candidate_index": n (promote),
"revised_action": action (revise), "notes": text, "version": n (optional optimistic check)}.
Returns the updated item. 409 when the item is already decided, the reviewer already decided
it, or the version is stale; 422 for an invalid body; 404 for unknown ids.</p>
<p>Actions: {"type":"search","query"}, {"type":"rerank","doc_ids"},
{"type":"summarize","doc_ids","summary"}, {"type":"synthesize","answer","doc_ids"},
{"type":"abstain","reason"}.</p>
<h2>GET /api/review/stats</h2>
<p>{pending, decided, promote, revise, discard, needs_adjudication, agreement_rate}
where agreement_rate is null until a double-annotated item has two decisions.</p>
</body></html>
)";
}

struct ReviewService::Impl {
  httplib::Server server;
  ReviewApi api;
  Impl(ReviewQueue& queue, const Corpus* corpus) : api(queue, corpus) {}
};

ReviewService::ReviewService(ReviewQueue& queue, const Corpus* corpus, ReviewServiceOptions options)
    : impl_(std::make_unique<Impl>(queue, corpus)), options_(std::move(options)) {
  auto& server = impl_->server;
  auto& api = impl_->api;
  const std::string origin = options_.cors_origin;

  // httplib also sets SO_REUSEPORT by default, which would let a second
  // service share a busy port instead of failing.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });

  auto send = [](httplib::Response& res, const ReviewApi::Response& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };

  server.set_post_routing_handler([origin](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Origin", origin);
    res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Reviewer-Id");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
  });
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });

  server.Get("/api/review/items", [&api, send](const httplib::Request& req, httplib::Response& res) {
    const std::string status = req.has_param("status") ? req.get_param_value("status") : "pending";
    std::optional<std::size_t> limit;
    if (req.has_param("limit")) {
      try {
        const long long n = std::stoll(req.get_param_value("limit"));
        if (n < 0) throw std::invalid_argument("negative");
        limit = static_cast<std::size_t>(n);
      } catch (const std::exception&) {
        send(res, {422, error_body("InvalidArgument", "limit must be a non-negative integer")});
        return;
      }
    }
    send(res, api.list_items(status, limit));
  });
  server.Get(R"(/api/review/items/(.+))", [&api, send](const httplib::Request& req, httplib::Response& res) {
    send(res, api.get_item(req.matches[1]));
  });
  server.Post(R"(/api/review/items/(.+)/decision)",
              [&api, send](const httplib::Request& req, httplib::Response& res) {
                send(res, api.post_decision(req.matches[1], req.get_header_value("X-Reviewer-Id"),
                                            req.body));
              });
  server.Get("/api/review/stats", [&api, send](const httplib::Request&, httplib::Response& res) {
    send(res, api.stats());
  });
  server.Get("/api/docs", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(review_api_docs(), "text/html; charset=utf-8");
  });

  bool mounted = false;
  if (options_.static_dir) mounted = server.set_mount_point("/", options_.static_dir->string());
  if (!mounted) {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(
          "<!doctype html><title>Review service</title><p>Review UI assets are not installed. "
          "See <a href=\"/api/docs\">/api/docs</a> for the API.</p>",
          "text/html; charset=utf-8");
    });
  }
}

ReviewService::~ReviewService() { stop(); }

void ReviewService::bind() {
  auto& server = impl_->server;
  if (options_.port == 0) {
    port_ = server.bind_to_any_port(options_.host);
    if (port_ < 0) throw Error(ErrorCode::kIOError, "cannot bind any port on " + options_.host);
    return;
  }
  if (!server.bind_to_port(options_.host, options_.port)) {
    throw Error(ErrorCode::kIOError, "port " + std::to_string(options_.port) + " on " + options_.host +
                                         " is already in use or not bindable");
  }
  port_ = options_.port;
}

void ReviewService::listen() { impl_->server.listen_after_bind(); }

void ReviewService::wait_until_ready() const { impl_->server.wait_until_ready(); }

void ReviewService::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace agentsim
