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

#include <string_view>

// Text assets compiled in from data/ and prompts/.
namespace agentsim::assets {

std::string_view stopwords_en_v1();
std::string_view analyst_system_v1();
std::string_view critic_system_v1();
std::string_view analyst_user_v1();
std::string_view critic_user_v1();

}  // namespace agentsim::assets
