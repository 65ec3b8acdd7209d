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

#include "agentsim/error.hpp"
#include "agentsim/text.hpp"
#include "support/test_util.hpp"

using namespace agentsim;

TEST_CASE("tokenize splits on non-alphanumerics and lowercases") {
  const auto t = tokenize("The River-Delta, 2024!", default_stopwords());
  CHECK(t.tokens == std::vector<std::string>{"the", "river", "delta", "2024"});
  CHECK(t.content_tokens == std::vector<std::string>{"river", "delta", "2024"});
}

TEST_CASE("non-ASCII letters stay inside tokens") {
  const auto t = tokenize("Café Ελλάδα, Москва", StopwordSet{});
  REQUIRE(t.tokens.size() == 3);
  CHECK(t.tokens[0] == "café");
  CHECK(t.tokens[2].size() > 6);
}

TEST_CASE("punctuation-only text has no tokens") {
  CHECK(tokenize("... ,,, !!!", default_stopwords()).tokens.empty());
  CHECK(content_tokens("the of and", default_stopwords()).empty());
}

TEST_CASE("stopword parsing skips comments and blanks") {
  const auto s = parse_stopwords("# header\nThe\n\n  and \nOF\n");
  CHECK(s == StopwordSet{"and", "of", "the"});
  CHECK(default_stopwords().size() == 180);
  CHECK(default_stopwords().contains("the"));
}

TEST_CASE("normalize_payload collapses whitespace") {
  CHECK(normalize_payload("  Hello \t  World\n") == "hello world");
  CHECK(normalize_payload("   ").empty());
}

TEST_CASE("word_count counts whitespace-separated words") {
  CHECK(word_count("a b  c") == 3);
  CHECK(word_count("") == 0);
}

TEST_CASE("fnv1a64 matches published vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
}

TEST_CASE("load_stopwords reports a missing file") {
  CHECK_THROWS_AS(load_stopwords("/nonexistent/stopwords.txt"), Error);
}
