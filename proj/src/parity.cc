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

#include "pqsim/parity.h"

#include <algorithm>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <stdexcept>

namespace pqsim {

void LogicalProblem::validate() const {
  if (n_logical < 1) throw std::invalid_argument("n_logical must be positive");
  for (const auto& [key, j] : pair_couplings) {
    (void)j;
    if (key.first >= key.second)
      throw std::invalid_argument("coupling keys need i < j");
    if (key.first < 0 || key.second >= n_logical)
      throw std::invalid_argument("coupling index out of range");
  }
  for (const auto& [i, h] : local_fields) {
    (void)h;
    if (i < 0 || i >= n_logical)
      throw std::invalid_argument("local field index out of range");
  }
}

LogicalProblem LogicalProblem::complete_graph(int n_logical) {
  LogicalProblem p;
  p.n_logical = n_logical;
  for (int i = 0; i < n_logical; ++i)
    for (int j = i + 1; j < n_logical; ++j)
      p.pair_couplings[{i, j}] = 1.0 + (i + j) / 10.0;
  return p;
}

int ParityLayout::index_at(int row, int col) const {
  for (int q = 0; q < n_physical; ++q)
    if (rows[q] == row && cols[q] == col) return q;
  return -1;
}

int ParityLayout::n_rows() const {
  if (rows.empty()) return 0;
  return *std::max_element(rows.begin(), rows.end()) + 1;
}

namespace {

// Square plaquettes from occupied (r,c),(r,c+1),(r+1,c),(r+1,c+1).
void fill_plaquettes(ParityLayout& l) {
  l.plaquettes.clear();
  const int nr = l.n_rows();
  const int nc = l.cols.empty() ? 0 : *std::max_element(l.cols.begin(), l.cols.end()) + 1;
  for (int q = 0; q < l.n_physical; ++q) {
    int r = l.rows[q], c = l.cols[q];
    if (l.periodic) {
      int tr = l.index_at(r, (c + 1) % nc);
      int bl = l.index_at((r + 1) % nr, c);
      int br = l.index_at((r + 1) % nr, (c + 1) % nc);
      l.plaquettes.push_back({q, tr, bl, br});
      continue;
    }
    int tr = l.index_at(r, c + 1);
    int bl = l.index_at(r + 1, c);
    int br = l.index_at(r + 1, c + 1);
    if (tr >= 0 && bl >= 0 && br >= 0) l.plaquettes.push_back({q, tr, bl, br});
  }
}

ParityLayout make_grid(int rows, int cols, bool periodic) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("empty grid");
  ParityLayout l;
  l.periodic = periodic;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      l.rows.push_back(r);
      l.cols.push_back(c);
      l.field_strengths.push_back(1.0);
    }
  }
  l.n_physical = rows * cols;
  fill_plaquettes(l);
  return l;
}

}  // namespace

ParityLayout parity_map(const LogicalProblem& problem) {
  problem.validate();
  const int n = problem.n_logical;
  if (n < 3) throw std::invalid_argument("parity_map needs at least 3 logical qubits");
  ParityLayout l;
  l.n_logical = n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      auto it = problem.pair_couplings.find({i, j});
      if (it == problem.pair_couplings.end())
        throw std::invalid_argument("missing coupling (" + std::to_string(i) +
                                    "," + std::to_string(j) + ")");
      l.qubit_labels.push_back({i, j});
      l.field_strengths.push_back(it->second);
      l.rows.push_back(i);
      l.cols.push_back(j);
    }
  }
  l.n_physical = static_cast<int>(l.qubit_labels.size());
  fill_plaquettes(l);
  for (int i = 0; i + 2 < n; ++i)
    l.triangles.push_back({l.index_at(i, i + 1), l.index_at(i, i + 2),
                           l.index_at(i + 1, i + 2)});
  l.degeneracy_d = 1;
  return l;
}

ParityLayout grid_layout(int rows, int cols) {
  return make_grid(rows, cols, false);
}

ParityLayout periodic_grid_layout(int rows, int cols) {
  // A 1-wide torus would make plaquettes reuse a qubit.
  if (rows < 2 || cols < 2) throw std::invalid_argument("periodic grid needs 2x2 or more");
  return make_grid(rows, cols, true);
}

void AbstractCircuit::validate() const {
  for (const auto& step : steps) {
    std::vector<char> used(n_qubits, 0);
    for (const auto& op : step.ops) {
      for (int q : op.qubits) {
        if (q < 0 || q >= n_qubits)
          throw std::out_of_range("qubit out of range in step " + step.tag);
        if (used[q]) throw std::invalid_argument("qubit reused in step " + step.tag);
        used[q] = 1;
      }
    }
  }
}

std::size_t AbstractCircuit::gate_count() const {
  std::size_t n = 0;
  for (const auto& s : steps) n += s.ops.size();
  return n;
}

namespace {

void append_half(const ParityLayout& l, int parity, double zz_angle,
                 const std::string& prefix, AbstractCircuit& out) {
  CircuitStep cnot{prefix + "-1", {}}, zz_even{prefix + "-2", {}},
      zz_odd{prefix + "-3", {}};
  std::set<int> cnot_targets;
  for (const auto& p : l.plaquettes) {
    const int top = p[0];
    if (l.rows[top] % 2 != parity) continue;
    // CNOT columns are shared by neighbouring plaquettes in a ribbon.
    for (int k : {0, 1}) {
      if (cnot_targets.insert(p[k]).second)
        cnot.ops.push_back({GateKind::kCNOT, 0.0, {p[k + 2], p[k]}});
    }
    CircuitOp zz{GateKind::kZZ, zz_angle, {p[0], p[1]}};
    (l.cols[top] % 2 == 0 ? zz_even : zz_odd).ops.push_back(zz);
  }
  CircuitStep undo = cnot;
  undo.tag = prefix + "-4";
  out.steps.push_back(std::move(cnot));
  out.steps.push_back(std::move(zz_even));
  out.steps.push_back(std::move(zz_odd));
  out.steps.push_back(std::move(undo));
}

}  // namespace

AbstractCircuit constraint_circuit(const ParityLayout& layout, double omega,
                                   double zz_sign) {
  // ZZ(a) = exp(i a ZZ), so a = -omega realises exp(-i omega C_l).
  AbstractCircuit c;
  c.n_qubits = layout.n_physical;
  append_half(layout, 0, zz_sign * omega, "constraint-even-odd", c);
  append_half(layout, 1, zz_sign * omega, "constraint-odd-even", c);
  c.validate();
  return c;
}

AbstractCircuit qaoa_round_circuit(const ParityLayout& layout, double beta,
                                   double gamma, double omega,
                                   bool include_prep) {
  AbstractCircuit c;
  c.n_qubits = layout.n_physical;
  const int n = layout.n_physical;
  if (include_prep) {
    CircuitStep prep{"prep", {}};
    for (int q = 0; q < n; ++q) prep.ops.push_back({GateKind::kH, 0.0, {q}});
    c.steps.push_back(std::move(prep));
  }
  CircuitStep driver{"driver", {}};
  for (int q = 0; q < n; ++q)
    driver.ops.push_back({GateKind::kRx, 2.0 * beta, {q}});
  c.steps.push_back(std::move(driver));
  AbstractCircuit uc = constraint_circuit(layout, omega);
  for (auto& s : uc.steps) c.steps.push_back(std::move(s));
  CircuitStep problem{"problem-phase", {}};
  for (int q = 0; q < n; ++q)
    problem.ops.push_back(
        {GateKind::kRz, 2.0 * gamma * layout.field_strengths[q], {q}});
  c.steps.push_back(std::move(problem));
  c.validate();
  return c;
}

namespace {

// u <- G u for a local gate G on `targets`, column by column.
void left_apply(Matrix& u, const Matrix& g, const std::vector<int>& targets) {
  const int k = static_cast<int>(targets.size());
  const std::int64_t local = std::int64_t{1} << k;
  std::int64_t mask = 0;
  for (int t : targets) mask |= std::int64_t{1} << t;
  std::vector<std::int64_t> offs(local);
  for (std::int64_t a = 0; a < local; ++a) {
    std::int64_t o = 0;
    for (int j = 0; j < k; ++j)
      if ((a >> j) & 1) o |= std::int64_t{1} << targets[j];
    offs[a] = o;
  }
  const std::int64_t dim = u.rows();
  Vector buf(local);
  for (std::int64_t col = 0; col < u.cols(); ++col) {
    for (std::int64_t base = 0; base < dim; ++base) {
      if (base & mask) continue;
      for (std::int64_t a = 0; a < local; ++a) buf[a] = u(base | offs[a], col);
      for (std::int64_t a = 0; a < local; ++a) {
        Complex s = 0.0;
        for (std::int64_t b = 0; b < local; ++b) s += g(a, b) * buf[b];
        u(base | offs[a], col) = s;
      }
    }
  }
}

}  // namespace

Matrix gate_unitary(const CircuitOp& op, int n_qubits) {
  return embed_operator(build_gate(op.kind, op.angle).matrix, op.qubits,
                        n_qubits);
}

Matrix circuit_unitary(const AbstractCircuit& circuit) {
  if (circuit.n_qubits > 12)
    throw std::length_error("circuit_unitary supports at most 12 qubits");
  const std::int64_t dim = std::int64_t{1} << circuit.n_qubits;
  Matrix u = Matrix::Identity(dim, dim);
  for (const auto& step : circuit.steps)
    for (const auto& op : step.ops)
      left_apply(u, build_gate(op.kind, op.angle).matrix, op.qubits);
  return u;
}

namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[a] = b;
    return true;
  }
};

void require_labels(const ParityLayout& l) {
  if (l.n_logical < 2 ||
      static_cast<int>(l.qubit_labels.size()) != l.n_physical)
    throw std::invalid_argument("layout has no logical labels");
}

}  // namespace

void validate_tree(const ParityLayout& layout, const std::vector<int>& tree) {
  require_labels(layout);
  if (static_cast<int>(tree.size()) != layout.n_logical - 1)
    throw std::invalid_argument("tree must have N-1 qubits");
  Dsu dsu(layout.n_logical);
  for (int q : tree) {
    if (q < 0 || q >= layout.n_physical)
      throw std::invalid_argument("tree qubit out of range");
    auto [i, j] = layout.qubit_labels[q];
    if (!dsu.unite(i, j)) throw std::invalid_argument("tree has a cycle");
  }
}

std::vector<int> decode_spanning_tree(const std::vector<std::uint8_t>& bits,
                                      const ParityLayout& layout,
                                      const std::vector<int>& tree) {
  validate_tree(layout, tree);
  if (static_cast<int>(bits.size()) != layout.n_physical)
    throw std::invalid_argument("bitstring length mismatch");
  const int n = layout.n_logical;
  std::vector<std::vector<std::pair<int, int>>> adj(n);
  for (int q : tree) {
    auto [i, j] = layout.qubit_labels[q];
    adj[i].push_back({j, q});
    adj[j].push_back({i, q});
  }
  std::vector<int> spin(n, 0);
  spin[0] = 1;
  std::queue<int> todo;
  todo.push(0);
  while (!todo.empty()) {
    int i = todo.front();
    todo.pop();
    for (auto [j, q] : adj[i]) {
      if (spin[j] != 0) continue;
      spin[j] = bits[q] ? -spin[i] : spin[i];
      todo.push(j);
    }
  }
  return spin;
}

SpanningTreeSet enumerate_spanning_trees(const ParityLayout& layout, int n,
                                         std::uint64_t seed) {
  require_labels(layout);
  if (n < 1) throw std::invalid_argument("need at least one tree");
  constexpr int kCandidates = 16;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int k = layout.n_physical;
  std::vector<int> usage(k, 0);
  SpanningTreeSet out;
  out.n_trees = n;
  for (int t = 0; t < n; ++t) {
    std::vector<int> best;
    std::pair<int, long> best_score{0, 0};
    for (int cand = 0; cand < kCandidates; ++cand) {
      // Usage offsets steer Kruskal toward least-used qubits; the random part
      // picks uniformly among ties.
      std::vector<std::pair<double, int>> w(k);
      for (int q = 0; q < k; ++q) w[q] = {usage[q] + unif(rng), q};
      std::sort(w.begin(), w.end());
      Dsu dsu(layout.n_logical);
      std::vector<int> tree;
      for (auto [weight, q] : w) {
        (void)weight;
        auto [i, j] = layout.qubit_labels[q];
        if (dsu.unite(i, j)) tree.push_back(q);
      }
      int max_use = 0;
      long sq = 0;
      std::vector<int> after = usage;
      for (int q : tree) ++after[q];
      for (int u : after) {
        max_use = std::max(max_use, u);
        sq += static_cast<long>(u) * u;
      }
      std::pair<int, long> score{max_use, sq};
      if (best.empty() || score < best_score) {
        best = tree;
        best_score = score;
      }
    }
    for (int q : best) ++usage[q];
    out.trees.push_back(std::move(best));
  }
  // Greedy picks can strand a qubit at +-2. Repair by augmenting paths: a
  // step x -> y swaps x for y in one tree that stays spanning, and a path
  // through distinct trees moves one unit of usage from a most-used qubit to
  // one used at least twice less. Each path lowers sum(usage^2).
  struct Step {
    int from = -1, tree = -1;
  };
  auto can_swap = [&](const std::vector<int>& tree, int x, int y) {
    if (std::find(tree.begin(), tree.end(), y) != tree.end()) return false;
    Dsu dsu(layout.n_logical);
    for (int q : tree)
      if (q != x) dsu.unite(layout.qubit_labels[q].first, layout.qubit_labels[q].second);
    return dsu.unite(layout.qubit_labels[y].first, layout.qubit_labels[y].second);
  };
  auto augment = [&]() {
    const int top = *std::max_element(usage.begin(), usage.end());
    std::vector<Step> prev(k);
    std::vector<bool> seen(k, false);
    std::queue<int> frontier;
    for (int q = 0; q < k; ++q)
      if (usage[q] == top) {
        seen[q] = true;
        frontier.push(q);
      }
    auto trees_on_path = [&](int x) {
      std::vector<int> used;
      for (; prev[x].from >= 0; x = prev[x].from) used.push_back(prev[x].tree);
      return used;
    };
    while (!frontier.empty()) {
      const int x = frontier.front();
      frontier.pop();
      const std::vector<int> used = trees_on_path(x);
      for (int t = 0; t < n; ++t) {
        const auto& tree = out.trees[t];
        if (std::find(used.begin(), used.end(), t) != used.end()) continue;
        if (std::find(tree.begin(), tree.end(), x) == tree.end()) continue;
        for (int y = 0; y < k; ++y) {
          if (seen[y] || !can_swap(tree, x, y)) continue;
          seen[y] = true;
          prev[y] = {x, t};
          if (usage[y] <= top - 2) {
            for (int z = y; prev[z].from >= 0; z = prev[z].from) {
              auto& tz = out.trees[prev[z].tree];
              *std::find(tz.begin(), tz.end(), prev[z].from) = z;
            }
            ++usage[y];
            int root = y;
            while (prev[root].from >= 0) root = prev[root].from;
            --usage[root];
            return true;
          }
          frontier.push(y);
        }
      }
    }
    return false;
  };
  while (augment()) {
  }
  for (auto& tree : out.trees) std::sort(tree.begin(), tree.end());
  return out;
}

std::vector<int> tree_usage_counts(const ParityLayout& layout,
                                   const SpanningTreeSet& set) {
  std::vector<int> usage(layout.n_physical, 0);
  for (const auto& t : set.trees)
    for (int q : t) ++usage.at(q);
  return usage;
}

}  // namespace pqsim
