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

#include "doctest.h"

#include <thread>

#include "httplib.h"
#include <nlohmann/json.hpp>

#include "agentsim/error.hpp"
#include "agentsim/review_service.hpp"
#include "support/test_util.hpp"

using namespace agentsim;
using nlohmann::json;

namespace {

ReviewItem item(const std::string& trace, double ds, bool double_annotation = false) {
  auto i = make_review_item(trace, 3, "river delta", {"context line"},
                            {{"analyst", AgentAction::search("river")},
                             {"critic", AgentAction::synthesize("delta", {"d1"})}},
                            ds, ValidationConfig{});
  i.double_annotation = double_annotation;
  return i;
}

// Review service on a free port, stopped on scope exit.
struct Running {
  ReviewService service;
  std::thread thread;
  httplib::Client client;

  Running(ReviewQueue& queue, const Corpus* corpus)
      : service(queue, corpus, {"127.0.0.1", 0, std::nullopt, "*"}),
        client(([&] {
          service.bind();
          return "http://127.0.0.1:" + std::to_string(service.port());
        })()) {
    thread = std::thread([this] { service.listen(); });
    service.wait_until_ready();
  }
  ~Running() {
    service.stop();
    thread.join();
  }
};

json post_decision(httplib::Client& c, const std::string& id, const std::string& reviewer, const json& body, int& status) {
  httplib::Headers headers;
  if (!reviewer.empty()) headers.emplace("X-Reviewer-Id", reviewer);
  const auto res = c.Post("/api/review/items/" + id + "/decision", headers, body.dump(), "application/json");
  REQUIRE(res);
  status = res->status;
  return json::parse(res->body);
}

}  // namespace

TEST_CASE("HTTP review loop") {
  const auto dir = testutil::fresh_dir("review-http");
  const Corpus corpus = testutil::tiny_corpus();
  ReviewQueue queue(dir);
  const auto low = queue.enqueue(item("t-low", 0.5));
  const auto high = queue.enqueue(item("t-high", 0.8));
  const auto dbl = queue.enqueue(item("t-double", 0.6, true));
  Running server(queue, &corpus);
  auto& c = server.client;

  auto res = c.Get("/api/review/items?status=pending");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Access-Control-Allow-Origin") == "*");
  auto list = json::parse(res->body);
  const auto& arr = list.is_array() ? list : list.at("items");
  REQUIRE(arr.size() == 3);
  CHECK(arr[0].at("item_id") == high.item_id);
  CHECK(arr[2].at("item_id") == low.item_id);

  CHECK(c.Get("/api/review/items?status=bogus")->status == 422);
  CHECK(c.Get("/api/review/items/nope")->status == 404);

  res = c.Get("/api/review/items/" + high.item_id);
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body.find("d1") != std::string::npos);

  int status = 0;
  post_decision(c, high.item_id, "", {{"verdict", "promote"}, {"chosen_candidate_index", 1}}, status);
  CHECK(status == 422);
  post_decision(c, high.item_id, "alice", {{"verdict", "promote"}, {"chosen_candidate_index", 9}}, status);
  CHECK(status == 422);
  post_decision(c, "nope", "alice", {{"verdict", "discard"}}, status);
  CHECK(status == 404);
  post_decision(c, high.item_id, "alice", {{"verdict", "promote"}, {"chosen_candidate_index", 1}}, status);
  CHECK(status == 200);
  post_decision(c, high.item_id, "bob", {{"verdict", "discard"}}, status);
  CHECK(status == 409);
  post_decision(c, low.item_id, "alice",
                {{"verdict", "revise"}, {"revised_action", {{"type", "search"}, {"query", "delta"}}}, {"version", 4}},
                status);
  CHECK(status == 409);
  post_decision(c, low.item_id, "alice",
                {{"verdict", "revise"}, {"revised_action", {{"type", "search"}, {"query", "delta"}}}}, status);
  CHECK(status == 200);

  post_decision(c, dbl.item_id, "alice", {{"verdict", "discard"}}, status);
  CHECK(status == 200);
  const auto after = post_decision(c, dbl.item_id, "bob", {{"verdict", "promote"}, {"chosen_candidate_index", 0}}, status);
  CHECK(status == 200);
  CHECK(after.dump().find("\"needs_adjudication\":true") != std::string::npos);

  res = c.Get("/api/review/stats");
  REQUIRE(res);
  const auto stats = json::parse(res->body);
  CHECK(stats.at("pending") == 1);
  CHECK(stats.at("decided") == 2);
  CHECK(stats.at("promote") == 1);
  CHECK(stats.at("revise") == 1);
  CHECK(stats.at("needs_adjudication") == 1);

  CHECK(c.Get("/api/docs")->status == 200);
  CHECK(c.Options("/api/review/stats")->status < 300);

  ReviewQueue reread(dir);
  CHECK(reread.stats().decided == 2);
}

TEST_CASE("binding a busy port fails with the port in the message") {
  const auto dir = testutil::fresh_dir("review-port");
  ReviewQueue queue(dir);
  Running first(queue, nullptr);
  ReviewService second(queue, nullptr, {"127.0.0.1", first.service.port(), std::nullopt, "*"});
  try {
    second.bind();
    FAIL("expected IOError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIOError);
    CHECK(std::string(e.what()).find(std::to_string(first.service.port())) != std::string::npos);
  }
}

TEST_CASE("API object without a transport") {
  const auto dir = testutil::fresh_dir("review-api");
  ReviewQueue queue(dir);
  queue.enqueue(item("t1", 0.5));
  ReviewApi api(queue);
  CHECK(api.list_items("all", 1).status == 200);
  CHECK(api.get_item("missing").status == 404);
  CHECK(api.post_decision("missing", "r", "{\"verdict\":\"discard\"}").status == 404);
  CHECK(api.post_decision(review_item_id("t1", 3), "r", "not json").status == 422);
  CHECK(api.stats().body.at("pending") == 1);
  CHECK(review_api_docs().find("/api/review/items") != std::string::npos);
}
