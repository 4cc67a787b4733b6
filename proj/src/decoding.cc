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

#include "pqsim/decoding.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>

#include "pqsim/parity.h"

namespace pqsim {

void TreeStatsConfig::validate() const {
  if (n_logical < 2) throw std::invalid_argument("tree statistics need N >= 2");
  if (n_trees < 1) throw std::invalid_argument("tree statistics need n >= 1");
  if (!(x > 0.0 && x <= 1.0)) throw std::invalid_argument("x must lie in (0, 1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0, 1]");
  }
}

namespace {

double first_error_trees(const TreeStatsConfig& cfg) {
  const std::int64_t n = cfg.n_trees, big_n = cfg.n_logical, k = cfg.n_physical();
  return static_cast<double>((2 * n) / big_n) +
         static_cast<double>((n * (big_n - 1)) % k) / static_cast<double>(k);
}

double binomial_pmf(int m, int k, double p) {
  if (p == 0.0) return m == 0 ? 1.0 : 0.0;
  if (p == 1.0) return m == k ? 1.0 : 0.0;
  const double log_choose =
      std::lgamma(k + 1.0) - std::lgamma(m + 1.0) - std::lgamma(k - m + 1.0);
  return std::exp(log_choose + m * std::log(p) + (k - m) * std::log1p(-p));
}

}  // namespace

double expected_incorrect_trees(const TreeStatsConfig& cfg, int m) {
  cfg.validate();
  if (m < 0) throw std::invalid_argument("error count must be non-negative");
  if (m == 0) return 0.0;
  const double one = first_error_trees(cfg);
  double inc = one;
  for (int i = 2; i <= m; ++i) {
    // The max() guard keeps the count from overshooting n.
    inc += std::max(1.0 - inc / cfg.n_trees, 0.0) * one;
  }
  return inc;
}

std::vector<double> expected_incorrect_table(const TreeStatsConfig& cfg) {
  cfg.validate();
  const int k = cfg.n_physical();
  const double one = first_error_trees(cfg);
  std::vector<double> t(k + 1, 0.0);
  for (int m = 1; m <= k; ++m) {
    t[m] = m == 1 ? one : t[m - 1] + std::max(1.0 - t[m - 1] / cfg.n_trees, 0.0) * one;
  }
  return t;
}

double NOkDistribution::cdf(int t) const {
  double c = 0.0;
  for (std::size_t i = 0; i < support.size() && support[i] <= t; ++i) c += mass[i];
  return c;
}

NOkDistribution n_ok_distribution(const TreeStatsConfig& cfg) {
  const std::vector<double> inc = expected_incorrect_table(cfg);
  const int k = cfg.n_physical();
  std::map<int, double> buckets;
  for (int m = 0; m <= k; ++m) {
    const double ok = cfg.n_trees - inc[m];
    const int bucket = static_cast<int>(std::floor(ok + 1e-9));
    const double w = binomial_pmf(m, k, cfg.epsilon);
    if (w > 0.0) buckets[std::max(bucket, 0)] += w;
  }
  NOkDistribution d;
  for (const auto& [t, w] : buckets) {
    d.support.push_back(t);
    d.mass.push_back(w);
  }
  return d;
}

int threshold_n_ok(const TreeStatsConfig& cfg) {
  const NOkDistribution d = n_ok_distribution(cfg);
  const double need = 1.0 - cfg.x;
  double c = 0.0;
  for (std::size_t i = 0; i < d.support.size(); ++i) {
    c += d.mass[i];
    if (c >= need - 1e-12) return d.support[i];
  }
  return d.support.back();
}

double p_fail(const TreeStatsConfig& cfg) {
  const int t = threshold_n_ok(cfg);
  if (t == 0) return 1.0;
  TreeStatsConfig random = cfg;
  random.epsilon = 0.5;
  const NOkDistribution d = n_ok_distribution(random);
  double tail = 0.0;
  for (std::size_t i = 0; i < d.support.size(); ++i) {
    if (d.support[i] >= t) tail += d.mass[i];
  }
  return std::clamp(tail, 0.0, 1.0);
}

std::string tree_count_rule_name(TreeCountRule r) { return r == TreeCountRule::kN ? "N" : "2N"; }

TreeCountRule tree_count_rule_from_name(const std::string& name) {
  if (name == "N") return TreeCountRule::kN;
  if (name == "2N") return TreeCountRule::k2N;
  throw std::invalid_argument("unknown tree count rule '" + name + "'");
}

int trees_for(int n_logical, TreeCountRule r) {
  return r == TreeCountRule::kN ? n_logical : 2 * n_logical;
}

double x_max(const std::vector<int>& n_range, TreeCountRule rule, double epsilon, double tol) {
  if (n_range.empty()) throw std::invalid_argument("x_max needs a non-empty N range");
  if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("x_max tolerance must lie in (0, 1)");
  auto scalable = [&](double x) {
    int prev = -1;
    for (int big_n : n_range) {
      TreeStatsConfig c{big_n, trees_for(big_n, rule), x, epsilon};
      const int t = threshold_n_ok(c);
      if (t == 0 || t < prev) return false;
      prev = t;
    }
    return true;
  };
  if (scalable(1.0)) return 1.0;
  if (!scalable(tol)) return 0.0;
  double lo = tol, hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (scalable(mid) ? lo : hi) = mid;
  }
  return lo;
}

std::vector<std::size_t> detect_jumps(const std::vector<double>& curve) {
  std::vector<std::size_t> jumps;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    if (curve[i] > curve[i - 1]) jumps.push_back(i);
  }
  return jumps;
}

namespace {

constexpr std::int64_t kChunk = 1 << 14;

struct ChunkSums {
  std::vector<double> sum, sum_sq;
  double bin_sum = 0.0, bin_sum_sq = 0.0;
};

}  // namespace

MonteCarloStats monte_carlo_trees(const TreeStatsConfig& cfg, int max_m, std::int64_t trials,
                                  std::uint64_t seed, Placement placement, int workers) {
  cfg.validate();
  const int k = cfg.n_physical();
  if (max_m < 0 || trials < 2) throw std::invalid_argument("need max_m >= 0 and trials >= 2");
  if (placement == Placement::kDistinct && max_m > k) {
    throw std::invalid_argument("cannot place more distinct errors than qubits");
  }
  const ParityLayout layout = parity_map(LogicalProblem::complete_graph(cfg.n_logical));
  const SpanningTreeSet set = enumerate_spanning_trees(layout, cfg.n_trees, seed);
  std::vector<std::vector<int>> trees_of(k);
  for (int t = 0; t < set.n_trees; ++t) {
    for (int q : set.trees[t]) trees_of[q].push_back(t);
  }

  const std::int64_t n_chunks = (trials + kChunk - 1) / kChunk;
  std::vector<ChunkSums> chunks(n_chunks);
  std::atomic<std::int64_t> next{0};
  auto work = [&] {
    std::vector<char> hit(set.n_trees);
    std::vector<int> pool(k);
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
      std::mt19937_64 rng(ss);
      std::uniform_int_distribution<int> pick(0, k - 1);
      std::binomial_distribution<int> count(k, cfg.epsilon);
      ChunkSums& s = chunks[c];
      s.sum.assign(max_m + 1, 0.0);
      s.sum_sq.assign(max_m + 1, 0.0);
      const std::int64_t begin = c * kChunk, end = std::min(trials, begin + kChunk);
      auto place = [&](int q, int& incorrect) {
        for (int t : trees_of[q]) {
          if (!hit[t]) {
            hit[t] = 1;
            ++incorrect;
          }
        }
      };
      for (std::int64_t i = begin; i < end; ++i) {
        std::fill(hit.begin(), hit.end(), 0);
        std::iota(pool.begin(), pool.end(), 0);
        int incorrect = 0;
        for (int m = 1; m <= max_m; ++m) {
          int q;
          if (placement == Placement::kIndependent) {
            q = pick(rng);
          } else {
            std::uniform_int_distribution<int> j(m - 1, k - 1);
            std::swap(pool[m - 1], pool[j(rng)]);
            q = pool[m - 1];
          }
          place(q, incorrect);
          s.sum[m] += incorrect;
          s.sum_sq[m] += static_cast<double>(incorrect) * incorrect;
        }
        // Physical model: Binomial(K, epsilon) distinct faulty qubits.
        std::fill(hit.begin(), hit.end(), 0);
        std::iota(pool.begin(), pool.end(), 0);
        const int m = count(rng);
        int inc = 0;
        for (int e = 0; e < m; ++e) {
          std::uniform_int_distribution<int> j(e, k - 1);
          std::swap(pool[e], pool[j(rng)]);
          place(pool[e], inc);
        }
        s.bin_sum += inc;
        s.bin_sum_sq += static_cast<double>(inc) * inc;
      }
    }
  };
  std::vector<std::thread> threads;
  for (int w = 1; w < std::max(1, workers); ++w) threads.emplace_back(work);
  work();
  for (std::thread& t : threads) t.join();

  MonteCarloStats out;
  out.trials = trials;
  std::vector<double> sum(max_m + 1, 0.0), sum_sq(max_m + 1, 0.0);
  double bs = 0.0, bss = 0.0;
  for (const ChunkSums& c : chunks) {
    for (int m = 0; m <= max_m; ++m) {
      sum[m] += c.sum[m];
      sum_sq[m] += c.sum_sq[m];
    }
    bs += c.bin_sum;
    bss += c.bin_sum_sq;
  }
  const double n = static_cast<double>(trials);
  auto se = [n](double s, double ss) {
    const double var = std::max(ss / n - (s / n) * (s / n), 0.0) * n / (n - 1.0);
    return std::sqrt(var / n);
  };
  for (int m = 0; m <= max_m; ++m) {
    out.mean_incorrect.push_back(sum[m] / n);
    out.std_error.push_back(se(sum[m], sum_sq[m]));
  }
  out.mean_incorrect_binomial = bs / n;
  out.std_error_binomial = se(bs, bss);
  return out;
}

}  // namespace pqsim
