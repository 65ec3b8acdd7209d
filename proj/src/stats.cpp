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

#include "agentsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/special_functions/gamma.hpp>

#include "agentsim/error.hpp"

namespace agentsim::stats {

namespace {

double mean(std::span<const double> xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sum_squared_deviation(std::span<const double> xs, double m) {
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return s;
}

}  // namespace

MannWhitney mann_whitney(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorCode::kInvalidArgument, "Mann-Whitney needs two non-empty samples");
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  const std::size_t n = n1 + n2;
  std::vector<std::pair<double, std::size_t>> pooled;  // value, 0 = a / 1 = b
  pooled.reserve(n);
  for (double x : a) pooled.emplace_back(x, 0);
  for (double x : b) pooled.emplace_back(x, 1);
  std::sort(pooled.begin(), pooled.end(),
            [](const auto& l, const auto& r) { return l.first < r.first; });

  double rank_sum_a = 0.0;
  double tie_term = 0.0;  // sum of t^3 - t over tie groups
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && pooled[j].first == pooled[i].first) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (pooled[k].second == 0) rank_sum_a += midrank;
    }
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  MannWhitney out;
  const double dn1 = static_cast<double>(n1);
  const double dn2 = static_cast<double>(n2);
  const double dn = static_cast<double>(n);
  out.u1 = rank_sum_a - dn1 * (dn1 + 1.0) / 2.0;
  out.u2 = dn1 * dn2 - out.u1;
  const double mu = dn1 * dn2 / 2.0;
  const double variance = dn1 * dn2 / 12.0 * ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  if (variance <= 0.0) {
    out.z = 0.0;
    out.p = 1.0;
    return out;
  }
  const double deviation = std::max(std::abs(out.u1 - mu) - 0.5, 0.0);
  out.z = std::copysign(deviation / std::sqrt(variance), out.u1 - mu);
  out.p = std::min(1.0, std::erfc(deviation / std::sqrt(variance) / std::sqrt(2.0)));
  return out;
}

double cohens_d(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "Cohen's d needs at least two values per sample");
  }
  const double ma = mean(a);
  const double mb = mean(b);
  const double pooled_var = (sum_squared_deviation(a, ma) + sum_squared_deviation(b, mb)) /
                            static_cast<double>(a.size() + b.size() - 2);
  if (!(pooled_var > 0.0)) throw Error(ErrorCode::kZeroVariance, "pooled standard deviation is zero");
  return (ma - mb) / std::sqrt(pooled_var);
}

std::vector<bool> holm_bonferroni(std::span<const double> p_values, double alpha) {
  const std::size_t m = p_values.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return p_values[l] < p_values[r]; });
  std::vector<bool> reject(m, false);
  for (std::size_t rank = 0; rank < m; ++rank) {
    if (!(p_values[order[rank]] <= alpha / static_cast<double>(m - rank))) break;
    reject[order[rank]] = true;
  }
  return reject;
}

ChiSquared chi_squared(const std::vector<std::vector<double>>& table) {
  if (table.empty()) throw Error(ErrorCode::kInvalidArgument, "empty contingency table");
  const std::size_t cols = table.front().size();
  for (const auto& row : table) {
    if (row.size() != cols) throw Error(ErrorCode::kInvalidArgument, "ragged contingency table");
    for (double v : row) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument, "contingency counts must be finite and >= 0");
      }
    }
  }
  std::vector<double> row_sums;
  std::vector<std::size_t> kept_rows;
  for (std::size_t r = 0; r < table.size(); ++r) {
    const double s = std::accumulate(table[r].begin(), table[r].end(), 0.0);
    if (s > 0.0) {
      kept_rows.push_back(r);
      row_sums.push_back(s);
    }
  }
  std::vector<double> col_sums;
  std::vector<std::size_t> kept_cols;
  for (std::size_t c = 0; c < cols; ++c) {
    double s = 0.0;
    for (std::size_t r : kept_rows) s += table[r][c];
    if (s > 0.0) {
      kept_cols.push_back(c);
      col_sums.push_back(s);
    }
  }
  if (kept_rows.size() < 2 || kept_cols.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "chi-squared needs at least a 2x2 table of non-empty margins");
  }
  const double total = std::accumulate(row_sums.begin(), row_sums.end(), 0.0);
  ChiSquared out;
  for (std::size_t i = 0; i < kept_rows.size(); ++i) {
    for (std::size_t j = 0; j < kept_cols.size(); ++j) {
      const double expected = row_sums[i] * col_sums[j] / total;
      const double diff = table[kept_rows[i]][kept_cols[j]] - expected;
      out.statistic += diff * diff / expected;
    }
  }
  out.dof = (kept_rows.size() - 1) * (kept_cols.size() - 1);
  out.p = out.statistic > 0.0
              ? boost::math::gamma_q(static_cast<double>(out.dof) / 2.0, out.statistic / 2.0)
              : 1.0;
  const double min_dim = static_cast<double>(std::min(kept_rows.size(), kept_cols.size()) - 1);
  out.cramers_v = std::sqrt(out.statistic / (total * min_dim));
  return out;
}

std::vector<PairwiseTest> significance_tests(std::span<const LabeledSample> groups, double alpha) {
  if (groups.size() < 2) throw Error(ErrorCode::kInvalidArgument, "need at least two groups");
  for (const auto& g : groups) {
    if (g.values.size() < 2) {
      throw Error(ErrorCode::kInvalidArgument, "group " + g.label + " needs at least two samples");
    }
  }
  std::vector<PairwiseTest> out;
  std::vector<double> p_values;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    for (std::size_t j = i + 1; j < groups.size(); ++j) {
      PairwiseTest t;
      t.a = groups[i].label;
      t.b = groups[j].label;
      t.mann_whitney = mann_whitney(groups[i].values, groups[j].values);
      try {
        t.cohens_d = cohens_d(groups[i].values, groups[j].values);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kZeroVariance) throw;
      }
      p_values.push_back(t.mann_whitney.p);
      out.push_back(std::move(t));
    }
  }
  const auto reject = holm_bonferroni(p_values, alpha);
  for (std::size_t k = 0; k < out.size(); ++k) out[k].holm_reject = reject[k];
  return out;
}

}  // namespace agentsim::stats
