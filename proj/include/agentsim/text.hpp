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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace agentsim {

using StopwordSet = std::set<std::string, std::less<>>;

struct TokenList {
  std::vector<std::string> tokens;
  // Subsequence of tokens with stopwords removed, original order kept.
  std::vector<std::string> content_tokens;
};

// Tokens are maximal runs of letters/digits, lowercased. Letters outside ASCII
// are classified by code-point range (Latin, Greek, Cyrillic, CJK, ... count as
// letters; punctuation and symbol blocks do not), which keeps the rule free of
// locale state and identical on every platform.
TokenList tokenize(std::string_view text, const StopwordSet& stopwords);

std::vector<std::string> content_tokens(std::string_view text,
                                        const StopwordSet& stopwords);

// The shipped English list (data/stopwords_en_v1.txt).
const StopwordSet& default_stopwords();

// One word per line; blank lines and lines starting with '#' are skipped.
// Words are lowercased.
StopwordSet parse_stopwords(std::string_view text);
StopwordSet load_stopwords(const std::filesystem::path& path);

// Lowercase ASCII and collapse runs of whitespace into single spaces, trimmed.
std::string normalize_payload(std::string_view text);

// Number of whitespace-separated words.
std::size_t word_count(std::string_view text);

std::uint64_t fnv1a64(std::string_view bytes);
std::string hex64(std::uint64_t value);

}  // namespace agentsim
