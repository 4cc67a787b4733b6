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

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include <gtest/gtest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include "pqsim/parity.h"

namespace pqsim {
namespace {

// exp(-i omega sum_l Z Z Z Z) as a dense diagonal.
Matrix constraint_oracle(const ParityLayout& l, double omega) {
  const std::int64_t d = std::int64_t{1} << l.n_physical;
  Matrix u = Matrix::Zero(d, d);
  for (std::int64_t x = 0; x < d; ++x) {
    double e = 0.0;
    for (const auto& p : l.plaquettes) {
      int s = 1;
      for (int q : p) s = ((x >> q) & 1) ? -s : s;
      e += s;
    }
    u(x, x) = std::exp(Complex(0.0, -omega * e));
  }
  return u;
}

Matrix sum_single(const ParityLayout& l, const Matrix& pauli, const std::vector<double>& w) {
  const std::int64_t d = std::int64_t{1} << l.n_physical;
  Matrix h = Matrix::Zero(d, d);
  for (int q = 0; q < l.n_physical; ++q) h += w[q] * embed_operator(pauli, {q}, l.n_physical);
  return h;
}

TEST(ParityMap, SmallestInstance) {
  const ParityLayout l = parity_map(LogicalProblem::complete_graph(3));
  EXPECT_EQ(l.n_physical, 3);
  EXPECT_TRUE(l.plaquettes.empty());
  EXPECT_EQ(l.triangles.size(), 1u);
}

TEST(ParityMap, FiveLogicalQubits) {
  const LogicalProblem prob = LogicalProblem::complete_graph(5);
  const ParityLayout l = parity_map(prob);
  EXPECT_EQ(l.n_physical, 10);
  std::set<std::pair<int, int>> labels(l.qubit_labels.begin(), l.qubit_labels.end());
  std::set<std::pair<int, int>> want;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) want.insert({i, j});
  EXPECT_EQ(labels, want);
  for (int q = 0; q < l.n_physical; ++q) {
    EXPECT_DOUBLE_EQ(l.field_strengths[q], prob.pair_couplings.at(l.qubit_labels[q]));
    // Row index counts the distance to the top row of the triangle.
    EXPECT_EQ(l.rows[q], l.qubit_labels[q].first);
  }
  EXPECT_EQ(l.plaquettes.size(), 3u);
}

TEST(ParityMap, PlaquettesAreClosedCycles) {
  for (int n = 4; n <= 8; ++n) {
    const ParityLayout l = parity_map(LogicalProblem::complete_graph(n));
    EXPECT_EQ(static_cast<int>(l.plaquettes.size()), (n - 2) * (n - 3) / 2);
    for (const auto& p : l.plaquettes) {
      std::map<int, int> count;
      for (int q : p) {
        ++count[l.qubit_labels[q].first];
        ++count[l.qubit_labels[q].second];
      }
      for (const auto& [node, c] : count) EXPECT_EQ(c % 2, 0) << "node " << node;
    }
  }
}

TEST(ParityMap, RejectsBadProblems) {
  LogicalProblem p = LogicalProblem::complete_graph(4);
  p.pair_couplings.erase({0, 3});
  EXPECT_THROW(parity_map(p), std::invalid_argument);
  EXPECT_THROW(parity_map(LogicalProblem::complete_graph(2)), std::invalid_argument);
}

TEST(ConstraintCircuit, NoPlaquettesMeansNoGates) {
  const AbstractCircuit c = constraint_circuit(parity_map(LogicalProblem::complete_graph(3)), 0.4);
  EXPECT_EQ(c.gate_count(), 0u);
}

TEST(ConstraintCircuit, MatchesExponentialOnSmallLayouts) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (const ParityLayout& l : {grid_layout(2, 3), grid_layout(3, 3), grid_layout(2, 4),
                                parity_map(LogicalProblem::complete_graph(4))}) {
    for (int k = 0; k < 5; ++k) {
      const double omega = u(rng);
      const Matrix got = circuit_unitary(constraint_circuit(l, omega));
      EXPECT_TRUE(equal_up_to_phase(got, constraint_oracle(l, omega), 1e-9))
          << l.n_physical << " qubits, omega " << omega;
    }
  }
}

TEST(ConstraintCircuit, ZeroAngleIsIdentity) {
  const ParityLayout l = grid_layout(2, 3);
  EXPECT_TRUE(equal_up_to_phase(circuit_unitary(constraint_circuit(l, 0.0)),
                                Matrix::Identity(64, 64), 1e-9));
}

TEST(ConstraintCircuit, FlippedZZSignIsWrong) {
  const ParityLayout l = grid_layout(2, 3);
  EXPECT_FALSE(equal_up_to_phase(circuit_unitary(constraint_circuit(l, 0.3, 1.0)),
                                 constraint_oracle(l, 0.3), 1e-3));
}

TEST(QaoaRound, MatchesProductOfExponentials) {
  const ParityLayout l = grid_layout(2, 3);
  const double beta = 0.21, gamma = -0.43, omega = 0.3;
  Matrix x = Matrix::Zero(2, 2), z = Matrix::Zero(2, 2), h(2, 2);
  x(0, 1) = x(1, 0) = 1.0;
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  h << 1.0, 1.0, 1.0, -1.0;
  h /= std::sqrt(2.0);
  Matrix prep = Matrix::Identity(64, 64);
  for (int q = 0; q < 6; ++q) prep = embed_operator(h, {q}, 6) * prep;
  const std::vector<double> ones(6, 1.0);
  const Matrix ux = (Complex(0, -beta) * sum_single(l, x, ones)).exp();
  const Matrix uz = (Complex(0, -gamma) * sum_single(l, z, l.field_strengths)).exp();
  const Matrix want = uz * constraint_oracle(l, omega) * ux * prep;
  EXPECT_TRUE(equal_up_to_phase(circuit_unitary(qaoa_round_circuit(l, beta, gamma, omega)), want, 1e-9));
}

TEST(QaoaRound, ZeroAnglesLeaveOnlyPreparation) {
  const ParityLayout l = grid_layout(2, 3);
  const Matrix with = circuit_unitary(qaoa_round_circuit(l, 0.0, 0.0, 0.0));
  Matrix h(2, 2);
  h << 1.0, 1.0, 1.0, -1.0;
  h /= std::sqrt(2.0);
  Matrix prep = Matrix::Identity(64, 64);
  for (int q = 0; q < 6; ++q) prep = embed_operator(h, {q}, 6) * prep;
  EXPECT_TRUE(equal_up_to_phase(with, prep, 1e-9));
}

TEST(DecodeTree, Examples) {
  const ParityLayout l = parity_map(LogicalProblem::complete_graph(4));
  auto index = [&](int a, int b) {
    return static_cast<int>(std::find(l.qubit_labels.begin(), l.qubit_labels.end(), std::make_pair(a, b)) -
                            l.qubit_labels.begin());
  };
  const std::vector<int> tree{index(0, 1), index(1, 2), index(2, 3)};
  std::vector<std::uint8_t> bits(6, 0);
  EXPECT_EQ(decode_spanning_tree(bits, l, tree), (std::vector<int>{1, 1, 1, 1}));
  bits[index(1, 2)] = 1;
  EXPECT_EQ(decode_spanning_tree(bits, l, tree), (std::vector<int>{1, 1, -1, -1}));
  EXPECT_THROW(decode_spanning_tree(bits, l, {index(0, 1), index(1, 2), index(0, 2)}),
               std::invalid_argument);
}

TEST(DecodeTree, AllTreesAgreeOnValidParityStates) {
  // Brute force: every 3-subset of the 6 qubits that is a tree, every logical state.
  const ParityLayout l = parity_map(LogicalProblem::complete_graph(4));
  std::vector<std::vector<int>> trees;
  for (int m = 0; m < 64; ++m) {
    if (__builtin_popcount(m) != 3) continue;
    std::vector<int> t;
    for (int q = 0; q < 6; ++q)
      if (m >> q & 1) t.push_back(q);
    try {
      validate_tree(l, t);
      trees.push_back(t);
    } catch (const std::invalid_argument&) {
    }
  }
  EXPECT_EQ(trees.size(), 16u);  // Cayley: 4^(4-2)
  for (int s = 0; s < 8; ++s) {
    const std::vector<int> spins{1, s & 1 ? -1 : 1, s & 2 ? -1 : 1, s & 4 ? -1 : 1};
    std::vector<std::uint8_t> bits(6);
    for (int q = 0; q < 6; ++q) {
      const auto [a, b] = l.qubit_labels[q];
      bits[q] = spins[a] != spins[b];
    }
    for (const auto& t : trees) EXPECT_EQ(decode_spanning_tree(bits, l, t), spins);
  }
}

TEST(SpanningTrees, Examples) {
  const ParityLayout l4 = parity_map(LogicalProblem::complete_graph(4));
  const SpanningTreeSet one = enumerate_spanning_trees(l4, 1, 5);
  ASSERT_EQ(one.trees.size(), 1u);
  EXPECT_NO_THROW(validate_tree(l4, one.trees[0]));
  for (int u : tree_usage_counts(l4, enumerate_spanning_trees(l4, 4, 5))) EXPECT_EQ(u, 2);

  const ParityLayout l5 = parity_map(LogicalProblem::complete_graph(5));
  const std::vector<int> use = tree_usage_counts(l5, enumerate_spanning_trees(l5, 4, 5));
  EXPECT_EQ(std::count(use.begin(), use.end(), 2), 6);
  EXPECT_EQ(std::count(use.begin(), use.end(), 1), 4);
}

TEST(SpanningTrees, DeterministicAndBalanced) {
  const ParityLayout l = parity_map(LogicalProblem::complete_graph(7));
  const SpanningTreeSet a = enumerate_spanning_trees(l, 9, 42), b = enumerate_spanning_trees(l, 9, 42);
  EXPECT_EQ(a.trees, b.trees);
  for (const auto& t : a.trees) EXPECT_NO_THROW(validate_tree(l, t));
  const std::vector<int> use = tree_usage_counts(l, a);
  EXPECT_LE(*std::max_element(use.begin(), use.end()) - *std::min_element(use.begin(), use.end()), 1);
}

TEST(SpanningTrees, BalancedWheneverTheBoundAllows) {
  for (int big_n = 4; big_n <= 10; ++big_n) {
    const ParityLayout l = parity_map(LogicalProblem::complete_graph(big_n));
    const int k = l.n_physical;
    for (int n : {big_n, 2 * big_n, 3 * big_n})
      for (std::uint64_t seed : {1u, 7u, 20260101u}) {
        if (n * (big_n - 1) > k * ((2 * n) / big_n + 1)) continue;
        const SpanningTreeSet set = enumerate_spanning_trees(l, n, seed);
        for (const auto& t : set.trees) ASSERT_NO_THROW(validate_tree(l, t));
        const std::vector<int> use = tree_usage_counts(l, set);
        EXPECT_LE(*std::max_element(use.begin(), use.end()) -
                      *std::min_element(use.begin(), use.end()),
                  1)
            << "N=" << big_n << " n=" << n << " seed=" << seed;
      }
  }
}

}  // namespace
}  // namespace pqsim
