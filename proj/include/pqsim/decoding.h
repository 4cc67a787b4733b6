// Copyright 2026 The pqsim Authors
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

#ifndef PQSIM_DECODING_H_
#define PQSIM_DECODING_H_

#include <cstdint>
#include <string>
#include <vector>

namespace pqsim {

struct TreeStatsConfig {
  int n_logical = 4;   // N
  int n_trees = 4;     // n
  double x = 0.9;      // fraction of runs that must allow a decision
  double epsilon = 0.0;

  int n_physical() const { return n_logical * (n_logical - 1) / 2; }  // K
  void validate() const;
};

// <n_inc>(m) by the mean-field recursion; m = 0 gives 0.
double expected_incorrect_trees(const TreeStatsConfig& cfg, int m);
// <n_inc>(m) for m = 0..K.
std::vector<double> expected_incorrect_table(const TreeStatsConfig& cfg);

// Probability mass over integer <n_ok> buckets; support ascending.
struct NOkDistribution {
  std::vector<int> support;
  std::vector<double> mass;
  double cdf(int t) const;  // mass at or below t
};

NOkDistribution n_ok_distribution(const TreeStatsConfig& cfg);
// Smallest t in the support with cdf(t) >= 1 - x.
int threshold_n_ok(const TreeStatsConfig& cfg);
// Mass of the epsilon = 0.5 distribution at or above the threshold; 1 when
// the threshold is 0.
double p_fail(const TreeStatsConfig& cfg);

enum class TreeCountRule { kN, k2N };
std::string tree_count_rule_name(TreeCountRule r);
TreeCountRule tree_count_rule_from_name(const std::string& name);
int trees_for(int n_logical, TreeCountRule r);

// Largest x in (0, 1] for which the threshold is positive and non-decreasing
// over `n_range`, bisected to `tol`. 0 when even x = tol fails.
double x_max(const std::vector<int>& n_range, TreeCountRule rule, double epsilon,
             double tol = 1e-3);

// Indices i > 0 where a p_fail curve rises above its predecessor.
std::vector<std::size_t> detect_jumps(const std::vector<double>& p_fail_curve);

// Error placement for the Monte-Carlo oracle. kIndependent draws m qubits
// uniformly with replacement, under which the recursion is the exact mean.
// kDistinct draws m different qubits.
enum class Placement { kIndependent, kDistinct };

struct MonteCarloStats {
  std::vector<double> mean_incorrect;  // per m = 0..max_m
  std::vector<double> std_error;
  double mean_incorrect_binomial = 0.0;  // m ~ Binomial(K, epsilon), distinct
  double std_error_binomial = 0.0;
  std::int64_t trials = 0;
};

// Samples incorrect-tree counts over a concrete balanced tree set built with
// `seed`. Trials run in fixed-size chunks with per-chunk seeds, so results do
// not depend on `workers`.
MonteCarloStats monte_carlo_trees(const TreeStatsConfig& cfg, int max_m, std::int64_t trials,
                                  std::uint64_t seed, Placement placement = Placement::kIndependent,
                                  int workers = 1);

}  // namespace pqsim

#endif  // PQSIM_DECODING_H_
