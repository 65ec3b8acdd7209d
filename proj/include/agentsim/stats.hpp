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

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace agentsim::stats {

struct MannWhitney {
  double u1 = 0.0;  // rank-sum statistic of the first sample
  double u2 = 0.0;  // n1*n2 - u1
  double z = 0.0;
  double p = 1.0;   // two-sided, normal approximation with tie and continuity correction
};

// Midranks for ties. Throws InvalidArgument when either sample is empty.
MannWhitney mann_whitney(std::span<const double> a, std::span<const double> b);

// (mean(a) - mean(b)) / pooled sd. Throws ZeroVariance when the pooled sd is 0.
double cohens_d(std::span<const double> a, std::span<const double> b);

// Holm-Bonferroni step-down; result[i] tells whether p_values[i] is rejected.
std::vector<bool> holm_bonferroni(std::span<const double> p_values, double alpha);

struct ChiSquared {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p = 1.0;
  double cramers_v = 0.0;
};

// Pearson test of independence on an r x c table of counts. All-zero rows and
// columns are dropped first.
ChiSquared chi_squared(const std::vector<std::vector<double>>& table);

struct LabeledSample {
  std::string label;
  std::vector<double> values;
};

struct PairwiseTest {
  std::string a;
  std::string b;
  MannWhitney mann_whitney;
  std::optional<double> cohens_d;  // empty when the pooled sd is 0
  bool holm_reject = false;
};

// Every unordered pair of groups, Holm-corrected across all pairs.
std::vector<PairwiseTest> significance_tests(std::span<const LabeledSample> groups,
                                             double alpha = 0.05);

}  // namespace agentsim::stats
