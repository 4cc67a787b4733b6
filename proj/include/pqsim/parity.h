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

#ifndef PQSIM_PARITY_H_
#define PQSIM_PARITY_H_

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pqsim/core.h"

namespace pqsim {

struct LogicalProblem {
  int n_logical = 0;
  std::map<std::pair<int, int>, double> pair_couplings;
  std::map<int, double> local_fields;

  void validate() const;
  // All-to-all couplings J_ij = 1 + (i + j) / 10, no local fields.
  static LogicalProblem complete_graph(int n_logical);
};

struct ParityLayout {
  int n_physical = 0;
  int n_logical = 0;  // 0 for bare grids without logical labels
  std::vector<std::pair<int, int>> qubit_labels;
  std::vector<double> field_strengths;
  std::vector<int> rows;
  std::vector<int> cols;
  // Square plaquettes as (top-left, top-right, bottom-left, bottom-right).
  std::vector<std::array<int, 4>> plaquettes;
  // Three-body boundary constraints; recorded but never enforced.
  std::vector<std::array<int, 3>> triangles;
  int degeneracy_d = 1;
  bool periodic = false;  // plaquettes wrap around both grid edges

  int index_at(int row, int col) const;  // -1 if the site is empty
  int n_rows() const;
};

ParityLayout parity_map(const LogicalProblem& problem);
// Fully occupied rows x cols grid without logical labels.
ParityLayout grid_layout(int rows, int cols);
// Torus version of grid_layout; the unit cells of both architectures.
ParityLayout periodic_grid_layout(int rows, int cols);

struct CircuitOp {
  GateKind kind = GateKind::kH;
  double angle = 0.0;
  std::vector<int> qubits;
};

struct CircuitStep {
  std::string tag;
  std::vector<CircuitOp> ops;
};

struct AbstractCircuit {
  int n_qubits = 0;
  std::vector<CircuitStep> steps;

  // Throws if a qubit appears twice within one step or is out of range.
  void validate() const;
  std::size_t gate_count() const;
};

// Per half (even-top ribbons, then odd-top ribbons): CNOT bottom->top on each
// plaquette column, ZZ on even-column top pairs, ZZ on odd-column top pairs,
// CNOT again. `zz_sign` flips the ZZ angle; only the verify negative control
// sets it to +1.
AbstractCircuit constraint_circuit(const ParityLayout& layout, double omega,
                                   double zz_sign = -1.0);
AbstractCircuit qaoa_round_circuit(const ParityLayout& layout, double beta,
                                   double gamma, double omega,
                                   bool include_prep = true);

// Dense unitary of a circuit (n_qubits <= 12).
Matrix circuit_unitary(const AbstractCircuit& circuit);
// Dense unitary of one gate embedded in n qubits.
Matrix gate_unitary(const CircuitOp& op, int n_qubits);

struct SpanningTreeSet {
  int n_trees = 0;
  std::vector<std::vector<int>> trees;  // physical qubit indices, size N-1
};

// Throws std::invalid_argument unless `tree` spans all logical nodes acyclically.
void validate_tree(const ParityLayout& layout, const std::vector<int>& tree);
// Spins in {+1, -1}; logical spin 0 is pinned to +1.
std::vector<int> decode_spanning_tree(const std::vector<std::uint8_t>& bits,
                                      const ParityLayout& layout,
                                      const std::vector<int>& tree);
SpanningTreeSet enumerate_spanning_trees(const ParityLayout& layout, int n,
                                         std::uint64_t seed);
std::vector<int> tree_usage_counts(const ParityLayout& layout,
                                   const SpanningTreeSet& set);

}  // namespace pqsim

#endif  // PQSIM_PARITY_H_
