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

#include "pqsim/architectures.h"

#include <algorithm>
#include <map>
#include <sstream>

namespace pqsim {

std::string architecture_name(ArchitectureKind kind) {
  switch (kind) {
    case ArchitectureKind::kSpinBus: return "spin_bus";
    case ArchitectureKind::kModular: return "modular";
    case ArchitectureKind::kModularHop: return "modular_hop";
  }
  return "?";
}

ArchitectureKind architecture_from_name(const std::string& name) {
  if (name == "spin_bus") return ArchitectureKind::kSpinBus;
  if (name == "modular") return ArchitectureKind::kModular;
  if (name == "modular_hop") return ArchitectureKind::kModularHop;
  throw std::invalid_argument("unknown architecture '" + name + "'");
}

ArchitectureSpec ArchitectureSpec::defaults(ArchitectureKind kind) {
  ArchitectureSpec s;
  s.kind = kind;
  s.readout_path_nm = kind == ArchitectureKind::kSpinBus ? 10000 : 0;
  return s;
}

int ArchitectureSpec::n_qubits() const {
  return kind == ArchitectureKind::kSpinBus ? 4 : 8;
}

void ArchitectureSpec::validate() const {
  if (!(t_1q_ns > 0 && t_2q_ns > 0 && t_r_ns > 0))
    throw std::invalid_argument("gate and readout times must be positive");
  if (!(hop_time_ns > 0)) throw std::invalid_argument("hop_time_ns must be positive");
  if (!(hop_error >= 0 && hop_error <= 1))
    throw std::invalid_argument("hop_error must be in [0, 1]");
  if (readout_path_nm < 0) throw std::invalid_argument("readout path must be >= 0");
}

TimeExpr& TimeExpr::operator+=(const TimeExpr& o) {
  dist_nm += o.dist_nm;
  n1q += o.n1q;
  n2q += o.n2q;
  nr += o.nr;
  nhop += o.nhop;
  return *this;
}

TimeExpr& TimeExpr::operator-=(const TimeExpr& o) {
  dist_nm -= o.dist_nm;
  n1q -= o.n1q;
  n2q -= o.n2q;
  nr -= o.nr;
  nhop -= o.nhop;
  return *this;
}

bool TimeExpr::non_negative() const {
  return dist_nm >= 0 && n1q >= 0 && n2q >= 0 && nr >= 0 && nhop >= 0;
}

double TimeExpr::ns(const ArchitectureSpec& spec, double v_m_s) const {
  double t = n1q * spec.t_1q_ns + n2q * spec.t_2q_ns + nr * spec.t_r_ns +
             nhop * spec.hop_time_ns;
  // nm / (m/s) is ns.
  if (dist_nm != 0) t += static_cast<double>(dist_nm) / v_m_s;
  return t;
}

std::string TimeExpr::to_string() const {
  std::ostringstream os;
  bool first = true;
  auto term = [&](long n, const char* unit) {
    if (n == 0) return;
    os << (first ? "" : " + ") << n << unit;
    first = false;
  };
  if (dist_nm != 0) {
    os << static_cast<double>(dist_nm) / 1000.0 << " um/v";
    first = false;
  }
  term(n1q, " T1q");
  term(n2q, " T2q");
  term(nr, " Tr");
  term(nhop, " Thop");
  if (first) os << "0";
  return os.str();
}

TimeExpr TimeExpr::gate(GateKind kind) {
  switch (kind) {
    case GateKind::kRz:
    case GateKind::kRx:
    case GateKind::kH:
    case GateKind::kX: return {0, 1, 0, 0, 0};
    case GateKind::kCP: return {0, 0, 1, 0, 0};
    // Rz pair runs in parallel, so one T_1q.
    case GateKind::kZZ: return {0, 1, 1, 0, 0};
    case GateKind::kCNOT: return {0, 2, 1, 0, 0};
    case GateKind::kSWAP: return {0, 6, 3, 0, 0};
    case GateKind::kCustom: break;
  }
  throw std::invalid_argument("custom gates have no native duration");
}

std::string event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::kGate: return "gate";
    case EventKind::kShuttle: return "shuttle";
    case EventKind::kIdle: return "idle";
    case EventKind::kMeasure: return "measure";
    case EventKind::kInit: return "init";
    case EventKind::kHop: return "hop";
  }
  return "?";
}

ParityLayout spin_bus_unit_cell() { return periodic_grid_layout(2, 2); }
ParityLayout modular_unit_cell() { return periodic_grid_layout(2, 4); }

namespace {

using Img = std::pair<int, int>;

struct Move {
  int qubit;
  std::int64_t nm;
  Position dest;
};

struct GateSpec {
  GateKind kind;
  std::vector<int> qubits;
  std::vector<Img> images;  // empty means all (0, 0)
};

// A table row is either a shuttle phase, a gate phase tied to one circuit
// step, a SWAP phase or a hop phase.
struct Row {
  enum Kind { kShuttle, kGate, kSwap } kind;
  std::string tag;
  std::vector<Move> moves;
  std::string step;
  std::vector<GateSpec> gates;
};

Row shuttle(std::string tag, std::vector<Move> moves) {
  return {Row::kShuttle, std::move(tag), std::move(moves), "", {}};
}
Row gates(std::string tag, std::string step, std::vector<GateSpec> g) {
  return {Row::kGate, std::move(tag), {}, std::move(step), std::move(g)};
}
Row swaps(std::string tag) { return {Row::kSwap, std::move(tag), {}, "", {}}; }

Position at(const char* site, int dx = 0, int dy = 0) { return {site, dx, dy}; }

const char* kEO = "constraint-even-odd";
const char* kOE = "constraint-odd-even";
std::string step(const char* half, int k) { return std::string(half) + "-" + std::to_string(k); }

// Spin bus, qubits 1..4 are indices 0..3 of the periodic 2x2 cell. The first
// even-odd shuttle is folded into the preceding single-qubit block.
std::vector<Row> spin_bus_constraint_rows() {
  const GateSpec cnot_a1{GateKind::kCNOT, {2, 0}, {}};
  const GateSpec cnot_a2{GateKind::kCNOT, {3, 1}, {}};
  const GateSpec cnot_b1{GateKind::kCNOT, {0, 2}, {{0, 1}, {0, 0}}};
  const GateSpec cnot_b2{GateKind::kCNOT, {1, 3}, {{0, 1}, {0, 0}}};
  return {
      gates("A1", step(kEO, 1), {cnot_a1, cnot_a2}),
      shuttle("A2", {{0, 10000, at("Z2")}, {1, 10000, at("Z2")}, {3, 10000, at("H4")}}),
      gates("A2", step(kEO, 2), {{GateKind::kZZ, {0, 1}, {}}}),
      // Qubit 1 visits the neighbouring cell for the wrap-around ZZ.
      shuttle("A3", {{0, 12500, at("Z1", -1, 0)}, {1, 12500, at("Z1")}}),
      gates("A3", step(kEO, 3), {{GateKind::kZZ, {1, 0}, {{0, 0}, {1, 0}}}}),
      shuttle("A4", {{0, 12500, at("Z1")}, {1, 12500, at("Z2")}, {3, 10000, at("Z2")}}),
      gates("A4", step(kEO, 4), {cnot_a1, cnot_a2}),
      // Qubit 2 rides the global vertical lane and comes back.
      shuttle("B1", {{2, 6250, at("Z1", 0, 1)}, {3, 15000, at("Z2", 0, 1)}, {1, 15000, at("Z2")}}),
      gates("B1", step(kOE, 1), {cnot_b1, cnot_b2}),
      shuttle("B2", {{2, 6250, at("Z2", 0, 1)}}),
      gates("B2", step(kOE, 2), {{GateKind::kZZ, {2, 3}, {}}}),
      shuttle("B3", {{3, 12500, at("Z2", 1, 1)}}),
      gates("B3", step(kOE, 3), {{GateKind::kZZ, {3, 2}, {{0, 0}, {1, 0}}}}),
      shuttle("B4", {{2, 6250, at("Z1", 0, 1)}, {3, 6250, at("Z2", 0, 1)}}),
      gates("B4", step(kOE, 4), {cnot_b1, cnot_b2}),
      shuttle("B5", {{0, 6250, at("L1")}, {1, 6250, at("L2")}, {2, 6250, at("L3")}}),
      shuttle("B6", {{0, 1250, at("H1")}, {1, 6250, at("H2")}, {2, 1250, at("H3")}, {3, 7500, at("H4")}}),
  };
}

// Two manipulation zones serve four qubits in two sub-rounds. The
// manipulation variant leaves qubits where the constraint block starts.
std::vector<Row> spin_bus_sqg_rows(bool to_home, std::vector<int>& sub_round_of) {
  sub_round_of = {0, 1, 0, 1};
  if (to_home) {
    return {
        shuttle("H1", {{0, 5000, at("Z1")}, {2, 3750, at("Z2")}, {3, 5000, at("L4")}}),
        gates("H1", "", {}),
        shuttle("H2", {{0, 5000, at("H1")}, {2, 3750, at("H3")}, {1, 2500, at("Z1")}, {3, 2500, at("Z2")}}),
        gates("H2", "", {}),
        shuttle("H3", {{1, 2500, at("H2")}, {3, 2500, at("H4")}}),
    };
  }
  return {
      shuttle("M1", {{0, 5000, at("Z2")}, {2, 3750, at("Z1")}, {3, 3750, at("L4")}}),
      gates("M1", "", {}),
      shuttle("M2", {{0, 3750, at("Z1")}, {2, 2500, at("Z1")}, {1, 2500, at("Z2")}, {3, 2500, at("Z2")}}),
      gates("M2", "", {}),
  };
}

// Modular cell: top row t0..t3 = 0..3, bottom row b0..b3 = 4..7. Register a
// holds columns 0-1, register b columns 2-3.
std::vector<Row> modular_constraint_rows() {
  const std::vector<GateSpec> cnot_a = {{GateKind::kCNOT, {4, 0}, {}},
                                        {GateKind::kCNOT, {5, 1}, {}},
                                        {GateKind::kCNOT, {6, 2}, {}},
                                        {GateKind::kCNOT, {7, 3}, {}}};
  const Img up{0, 1}, here{0, 0};
  const std::vector<GateSpec> cnot_b_even = {{GateKind::kCNOT, {0, 4}, {up, here}},
                                             {GateKind::kCNOT, {2, 6}, {up, here}}};
  const std::vector<GateSpec> cnot_b_odd = {{GateKind::kCNOT, {1, 5}, {up, here}},
                                            {GateKind::kCNOT, {3, 7}, {up, here}}};
  std::vector<Move> tops_up, tops_home, bottoms_home;
  for (int q = 0; q < 4; ++q) {
    const char* reg = q < 2 ? "a" : "b";
    tops_up.push_back({q, 20000, at(reg, 0, -1)});
    tops_home.push_back({q, 20000, at(reg)});
    bottoms_home.push_back({q + 4, 20000, at(reg)});
  }
  return {
      gates("A1", step(kEO, 1), cnot_a),
      gates("A2", step(kEO, 2), {{GateKind::kZZ, {0, 1}, {}}, {GateKind::kZZ, {2, 3}, {}}}),
      swaps("W1"),
      shuttle("S1", {{1, 10000, at("b")}, {3, 10000, at("a", 1, 0)}}),
      gates("A3", step(kEO, 3),
            {{GateKind::kZZ, {1, 2}, {}}, {GateKind::kZZ, {3, 0}, {{0, 0}, {1, 0}}}}),
      shuttle("S2", {{1, 10000, at("a")}, {3, 10000, at("b")}}),
      swaps("W2"),
      gates("A4", step(kEO, 4), cnot_a),
      swaps("W3"),
      shuttle("S3", tops_up),
      swaps("W4"),
      gates("B1a", step(kOE, 1), cnot_b_even),
      gates("B1b", step(kOE, 1), cnot_b_odd),
      swaps("W5"),
      shuttle("S4", tops_home),
      swaps("W6"),
      gates("B2", step(kOE, 2), {{GateKind::kZZ, {4, 5}, {}}, {GateKind::kZZ, {6, 7}, {}}}),
      swaps("W7"),
      shuttle("S5", {{4, 10000, at("b", -1, 0)}, {6, 10000, at("a")}}),
      gates("B3", step(kOE, 3),
            {{GateKind::kZZ, {5, 6}, {}}, {GateKind::kZZ, {7, 4}, {{0, 0}, {1, 0}}}}),
      shuttle("S6", {{4, 30000, at("a", 0, 1)},
                     {5, 20000, at("a", 0, 1)},
                     {6, 30000, at("b", 0, 1)},
                     {7, 20000, at("b", 0, 1)}}),
      swaps("W8"),
      gates("B4a", step(kOE, 4), cnot_b_even),
      gates("B4b", step(kOE, 4), cnot_b_odd),
      swaps("W9"),
      shuttle("S7", bottoms_home),
      swaps("W10"),
  };
}

// Registers in readout order; the first entry sits on the readout dot.
const std::vector<std::vector<int>> kModularRegisters = {{0, 1, 4, 5}, {2, 3, 6, 7}};

class Builder {
 public:
  Builder(ArchitectureKind kind, int n, std::vector<Position> start) {
    s_.kind = kind;
    s_.n_qubits = n;
    s_.initial_positions = start;
    pos_ = std::move(start);
  }

  void shuttle_phase(const std::string& tag, const std::string& block,
                     const std::vector<Move>& moves) {
    Phase p{tag, block, {}, {}, {}};
    for (const auto& m : moves) {
      PhaseOp op;
      op.kind = EventKind::kShuttle;
      op.qubits = {m.qubit};
      op.distance_nm = m.nm;
      op.dest = m.dest;
      p.ops.push_back(op);
      pos_[m.qubit] = m.dest;
    }
    finish(p);
  }

  void op_phase(const std::string& tag, const std::string& block,
                std::vector<PhaseOp> ops) {
    Phase p{tag, block, {}, std::move(ops), {}};
    finish(p);
  }

  const std::vector<Position>& positions() const { return pos_; }
  Schedule take() { return std::move(s_); }

 private:
  static TimeExpr op_duration(const PhaseOp& op) {
    switch (op.kind) {
      case EventKind::kShuttle: return TimeExpr::distance(op.distance_nm);
      case EventKind::kGate: return TimeExpr::gate(op.gate);
      case EventKind::kMeasure:
      case EventKind::kInit: return {0, 0, 0, 1, 0};
      case EventKind::kHop: return {0, 0, 0, 0, 1};
      case EventKind::kIdle: break;
    }
    return {};
  }

  void finish(Phase& p) {
    const int n = s_.n_qubits;
    std::vector<TimeExpr> busy(n);
    p.events.assign(n, {});
    for (int i = 0; i < static_cast<int>(p.ops.size()); ++i) {
      const auto& op = p.ops[i];
      for (int q : op.qubits) {
        if (q < 0 || q >= n) throw CompileError("qubit out of range in " + p.tag);
        Event e{op.kind, op_duration(op), op.kind == EventKind::kShuttle ? op.distance_nm : 0, i};
        busy[q] += e.duration;
        p.events[q].push_back(e);
      }
    }
    TimeExpr dur;
    bool shuttle_only = std::all_of(p.ops.begin(), p.ops.end(), [](const PhaseOp& o) {
      return o.kind == EventKind::kShuttle;
    });
    if (shuttle_only) {
      for (const auto& b : busy)
        if (b.dist_nm > dur.dist_nm) dur = b;
    } else {
      // Mixed phases must keep every busy qubit equally long so the barrier
      // stays symbolic.
      for (const auto& b : busy) {
        if (b.is_zero()) continue;
        if (dur.is_zero()) dur = b;
        else if (!(b == dur))
          throw CompileError("phase " + p.tag + " mixes durations " + b.to_string() +
                             " and " + dur.to_string());
      }
    }
    for (int q = 0; q < n; ++q) {
      TimeExpr pad = dur - busy[q];
      if (!pad.non_negative()) throw CompileError("negative idle in " + p.tag);
      if (!pad.is_zero()) p.events[q].push_back({EventKind::kIdle, pad, 0, -1});
    }
    p.duration = dur;
    s_.phases.push_back(std::move(p));
  }

  Schedule s_;
  std::vector<Position> pos_;
};

PhaseOp gate_op(GateKind kind, double angle, std::vector<int> qubits,
                std::vector<Img> images = {}) {
  PhaseOp op;
  op.kind = EventKind::kGate;
  op.gate = kind;
  op.angle = angle;
  op.qubits = std::move(qubits);
  op.images = images.empty() ? std::vector<Img>(op.qubits.size(), {0, 0}) : std::move(images);
  return op;
}

bool is_constraint(const std::string& tag) { return tag.rfind("constraint-", 0) == 0; }

void check_unit_cell(const AbstractCircuit& circ, int n) {
  if (circ.n_qubits != n)
    throw CompileError("circuit not unit-cell shaped: expected " + std::to_string(n) +
                       " qubits, got " + std::to_string(circ.n_qubits));
  circ.validate();
}

// Matches table gates against one circuit step and copies its angles.
std::vector<PhaseOp> bind_gates(const CircuitStep& st, const std::vector<GateSpec>& specs,
                                std::vector<char>& used) {
  std::vector<PhaseOp> out;
  for (const auto& g : specs) {
    bool found = false;
    for (std::size_t i = 0; i < st.ops.size(); ++i) {
      const auto& op = st.ops[i];
      if (used[i] || op.kind != g.kind || op.qubits != g.qubits) continue;
      out.push_back(gate_op(op.kind, op.angle, op.qubits, g.images));
      used[i] = 1;
      found = true;
      break;
    }
    if (!found)
      throw CompileError("circuit not unit-cell shaped: step " + st.tag + " lacks " +
                         gate_kind_name(g.kind) + " on (" + std::to_string(g.qubits[0]) +
                         "," + std::to_string(g.qubits[1]) + ")");
  }
  return out;
}

// Replays a constraint table against the eight circuit steps starting at
// `first`. `swap_row` emits the SWAP (or hop) phases.
template <typename SwapFn>
void emit_constraint(Builder& b, const AbstractCircuit& circ, std::size_t first,
                     const std::vector<Row>& rows, SwapFn swap_row) {
  std::map<std::string, const CircuitStep*> steps;
  std::map<std::string, std::vector<char>> used;
  for (std::size_t k = first; k < first + 8; ++k) {
    steps[circ.steps[k].tag] = &circ.steps[k];
    used[circ.steps[k].tag].assign(circ.steps[k].ops.size(), 0);
  }
  for (const auto& r : rows) {
    if (r.kind == Row::kShuttle) {
      b.shuttle_phase(r.tag, "constraint", r.moves);
    } else if (r.kind == Row::kSwap) {
      swap_row(r.tag);
    } else {
      auto it = steps.find(r.step);
      if (it == steps.end()) throw CompileError("missing circuit step " + r.step);
      b.op_phase(r.tag, "constraint", bind_gates(*it->second, r.gates, used[r.step]));
    }
  }
  for (const auto& [tag, u] : used)
    if (std::count(u.begin(), u.end(), 0) != 0)
      throw CompileError("circuit not unit-cell shaped: unplaced gates in " + tag);
}

// Sequence of blocks in one compiled circuit.
struct StepGroups {
  bool has_prep = false;
  std::vector<std::pair<std::string, std::vector<std::size_t>>> blocks;
};

StepGroups group_steps(const AbstractCircuit& circ) {
  StepGroups g;
  const auto& st = circ.steps;
  std::size_t i = 0;
  while (i < st.size()) {
    const std::string& tag = st[i].tag;
    if (tag == "prep" || tag == "driver" || tag == "problem-phase") {
      if (tag == "prep") {
        if (i != 0) throw CompileError("prep must be the first step");
        g.has_prep = true;
      }
      std::vector<std::size_t> idx;
      while (i < st.size() && !is_constraint(st[i].tag)) {
        if (st[i].tag != "prep" && st[i].tag != "driver" && st[i].tag != "problem-phase")
          throw CompileError("unknown step tag " + st[i].tag);
        idx.push_back(i++);
      }
      g.blocks.push_back({"sqg", idx});
    } else if (tag == step(kEO, 1)) {
      if (i + 8 > st.size()) throw CompileError("truncated constraint circuit");
      const char* halves[] = {kEO, kOE};
      for (int h = 0; h < 2; ++h)
        for (int k = 1; k <= 4; ++k)
          if (st[i + 4 * h + k - 1].tag != step(halves[h], k))
            throw CompileError("constraint steps out of order at " + st[i + 4 * h + k - 1].tag);
      g.blocks.push_back({"constraint", {i}});
      i += 8;
    } else {
      throw CompileError("unknown step tag " + tag);
    }
  }
  return g;
}

// 1q ops of the grouped steps, per qubit in step order.
std::vector<std::vector<PhaseOp>> single_qubit_ops(const AbstractCircuit& circ,
                                                   const std::vector<std::size_t>& idx) {
  std::vector<std::vector<PhaseOp>> per(circ.n_qubits);
  for (std::size_t k : idx) {
    for (const auto& op : circ.steps[k].ops) {
      if (op.qubits.size() != 1) throw CompileError("2q gate in single-qubit step " + circ.steps[k].tag);
      per[op.qubits[0]].push_back(gate_op(op.kind, op.angle, op.qubits));
    }
  }
  return per;
}

void emit_init_readout(Builder& b, const ArchitectureSpec& spec, bool readout) {
  const std::string block = readout ? "readout" : "init";
  const EventKind kind = readout ? EventKind::kMeasure : EventKind::kInit;
  auto single = [&](std::vector<int> qs) {
    std::vector<PhaseOp> ops;
    for (int q : qs) {
      PhaseOp op;
      op.kind = kind;
      op.qubits = {q};
      ops.push_back(op);
    }
    return ops;
  };
  if (spec.kind == ArchitectureKind::kSpinBus) {
    for (int q = 0; q < 4; ++q) {
      const std::string n = std::to_string(q + 1);
      const Position home{"H" + n, 0, 0};
      if (readout) {
        if (spec.readout_path_nm > 0) b.shuttle_phase("R" + n + "-path", block, {{q, spec.readout_path_nm, at("R")}});
        b.op_phase("R" + n, block, single({q}));
      } else {
        b.op_phase("I" + n, block, single({q}));
        if (spec.readout_path_nm > 0) b.shuttle_phase("I" + n + "-path", block, {{q, spec.readout_path_nm, home}});
      }
    }
    return;
  }
  // Modular: one readout dot per register, neighbours reached by SWAP transfers.
  const auto& ra = kModularRegisters[0];
  const auto& rb = kModularRegisters[1];
  for (int k = 0; k < 4; ++k) {
    const std::string n = std::to_string(k + 1);
    b.op_phase((readout ? "R" : "I") + n, block, single({ra[k], rb[k]}));
    if (k == 3) break;
    std::vector<PhaseOp> ops;
    for (const auto* r : {&ra, &rb}) {
      PhaseOp op = gate_op(GateKind::kSWAP, 0.0, {(*r)[k], (*r)[k + 1]});
      op.role = "transfer";
      ops.push_back(op);
    }
    b.op_phase((readout ? "R" : "I") + n + "-transfer", block, ops);
  }
}

}  // namespace

Schedule compile_spin_bus(const AbstractCircuit& circ, const ArchitectureSpec& spec) {
  if (spec.kind != ArchitectureKind::kSpinBus) throw CompileError("spec is not a spin bus");
  spec.validate();
  check_unit_cell(circ, 4);
  StepGroups g = group_steps(circ);
  std::vector<Position> start;
  for (int q = 0; q < 4; ++q) {
    const bool from_zone = g.has_prep && spec.readout_path_nm > 0;
    start.push_back(from_zone ? at("R") : Position{"H" + std::to_string(q + 1), 0, 0});
  }
  Builder b(ArchitectureKind::kSpinBus, 4, start);
  if (g.has_prep) emit_init_readout(b, spec, false);
  for (std::size_t bi = 0; bi < g.blocks.size(); ++bi) {
    const auto& [kind, idx] = g.blocks[bi];
    if (kind == "sqg") {
      const bool next_constraint = bi + 1 < g.blocks.size();
      const std::string block = next_constraint ? "sqg-manipulation" : "sqg-home";
      std::vector<int> sub_round;
      auto rows = spin_bus_sqg_rows(!next_constraint, sub_round);
      auto per = single_qubit_ops(circ, idx);
      int round = 0;
      for (const auto& r : rows) {
        if (r.kind == Row::kShuttle) {
          b.shuttle_phase(r.tag, block, r.moves);
          continue;
        }
        std::vector<PhaseOp> ops;
        for (int q = 0; q < 4; ++q)
          if (sub_round[q] == round)
            for (const auto& op : per[q]) ops.push_back(op);
        b.op_phase(r.tag, block, ops);
        ++round;
      }
    } else {
      // Without a preceding manipulation block the zones still have to be
      // reached; replay its moves without gates.
      if (bi == 0 || g.blocks[bi - 1].first != "sqg") {
        std::vector<int> unused;
        for (const auto& r : spin_bus_sqg_rows(false, unused))
          if (r.kind == Row::kShuttle) b.shuttle_phase(r.tag, "constraint-entry", r.moves);
      }
      emit_constraint(b, circ, idx[0], spin_bus_constraint_rows(),
                      [](const std::string&) {});
    }
  }
  Schedule s = b.take();
  check_locality(s);
  check_lock_step(s);
  return s;
}

Schedule compile_modular(const AbstractCircuit& circ, const ArchitectureSpec& spec) {
  if (spec.kind == ArchitectureKind::kSpinBus) throw CompileError("spec is not modular");
  spec.validate();
  check_unit_cell(circ, 8);
  StepGroups g = group_steps(circ);
  std::vector<Position> start(8);
  for (int q = 0; q < 8; ++q) start[q] = at((q % 4) < 2 ? "a" : "b");
  Builder b(spec.kind, 8, start);
  if (g.has_prep) emit_init_readout(b, spec, false);
  const bool hop = spec.kind == ArchitectureKind::kModularHop;
  for (std::size_t bi = 0; bi < g.blocks.size(); ++bi) {
    const auto& [kind, idx] = g.blocks[bi];
    if (kind == "sqg") {
      const bool next_constraint = bi + 1 < g.blocks.size();
      auto per = single_qubit_ops(circ, idx);
      std::vector<PhaseOp> ops;
      for (const auto& v : per)
        for (const auto& op : v) ops.push_back(op);
      b.op_phase(next_constraint ? "SQG-pre" : "SQG-post",
                 next_constraint ? "sqg-manipulation" : "sqg-home", ops);
      continue;
    }
    int swap_index = 0;
    auto swap_row = [&](const std::string& tag) {
      ++swap_index;
      // The hop variant keeps only the first and last SWAP layer.
      if (hop && swap_index != 1 && swap_index != 10) {
        std::vector<PhaseOp> ops;
        for (int q = 0; q < 8; ++q) {
          PhaseOp op;
          op.kind = EventKind::kHop;
          op.qubits = {q};
          ops.push_back(op);
        }
        b.op_phase(tag + "-hop", "constraint", ops);
        return;
      }
      // Pair co-located qubits in index order.
      std::vector<PhaseOp> ops;
      std::vector<char> done(8, 0);
      const auto& pos = b.positions();
      for (int q = 0; q < 8; ++q) {
        if (done[q]) continue;
        int partner = -1;
        for (int r = q + 1; r < 8 && partner < 0; ++r)
          if (!done[r] && pos[r] == pos[q]) partner = r;
        if (partner < 0) throw CompileError("SWAP layer " + tag + " leaves qubit unpaired");
        done[q] = done[partner] = 1;
        PhaseOp op = gate_op(GateKind::kSWAP, 0.0, {q, partner});
        op.relabel = true;
        ops.push_back(op);
      }
      b.op_phase(tag, "constraint", ops);
    };
    emit_constraint(b, circ, idx[0], modular_constraint_rows(), swap_row);
  }
  Schedule s = b.take();
  check_locality(s);
  check_lock_step(s);
  return s;
}

Schedule compile(const AbstractCircuit& circ, const ArchitectureSpec& spec) {
  return spec.kind == ArchitectureKind::kSpinBus ? compile_spin_bus(circ, spec)
                                                 : compile_modular(circ, spec);
}

Schedule append_readout(const Schedule& s, const ArchitectureSpec& spec) {
  if ((spec.kind == ArchitectureKind::kSpinBus) != (s.kind == ArchitectureKind::kSpinBus))
    throw CompileError("readout spec does not match schedule architecture");
  std::vector<Position> start = s.initial_positions;
  for (const auto& p : s.phases)
    for (const auto& op : p.ops)
      if (op.kind == EventKind::kShuttle) start[op.qubits[0]] = op.dest;
  Builder b(s.kind, s.n_qubits, start);
  emit_init_readout(b, spec, true);
  Schedule r = b.take();
  Schedule out = s;
  for (auto& p : r.phases) out.phases.push_back(std::move(p));
  return out;
}

void check_locality(const Schedule& s) {
  std::vector<Position> pos = s.initial_positions;
  const bool bus = s.kind == ArchitectureKind::kSpinBus;
  for (const auto& p : s.phases) {
    for (const auto& op : p.ops) {
      if (op.kind == EventKind::kShuttle) {
        pos[op.qubits[0]] = op.dest;
        continue;
      }
      if (op.kind != EventKind::kGate) continue;
      if (op.qubits.size() == 1) {
        const auto& site = pos[op.qubits[0]].site;
        if (bus && site != "Z1" && site != "Z2")
          throw CompileError("1q gate in " + p.tag + " on qubit " +
                             std::to_string(op.qubits[0]) + " outside a manipulation zone");
        continue;
      }
      const Position& a = pos[op.qubits[0]];
      const Position& c = pos[op.qubits[1]];
      const auto [ia, ic] = std::pair{op.images[0], op.images[1]};
      const bool ok = a.site == c.site && a.dx + ia.first == c.dx + ic.first &&
                      a.dy + ia.second == c.dy + ic.second;
      if (!ok)
        throw CompileError("non-local " + gate_kind_name(op.gate) + " in " + p.tag + ": qubit " +
                           std::to_string(op.qubits[0]) + " at " + a.site + " vs qubit " +
                           std::to_string(op.qubits[1]) + " at " + c.site);
    }
  }
}

void check_lock_step(const Schedule& s) {
  for (const auto& p : s.phases) {
    for (int q = 0; q < s.n_qubits; ++q) {
      TimeExpr t;
      for (const auto& e : p.events[q]) t += e.duration;
      if (!(t == p.duration))
        throw CompileError("phase " + p.tag + " not lock-step on qubit " + std::to_string(q));
    }
  }
}

ScheduleTotals schedule_totals(const Schedule& s, const std::string& block) {
  ScheduleTotals t;
  t.qubits.assign(s.n_qubits, {});
  for (const auto& p : s.phases) {
    if (!block.empty() && p.block != block) continue;
    t.wall += p.duration;
    for (int q = 0; q < s.n_qubits; ++q) {
      auto& qt = t.qubits[q];
      for (const auto& e : p.events[q]) {
        if (e.kind == EventKind::kIdle) {
          qt.idle += e.duration;
          continue;
        }
        qt.busy += e.duration;
        const PhaseOp& op = p.ops[e.op_index];
        switch (e.kind) {
          case EventKind::kShuttle: qt.shuttled_nm += e.distance_nm; break;
          case EventKind::kMeasure: ++qt.n_measure; break;
          case EventKind::kInit: ++qt.n_init; break;
          case EventKind::kHop: ++qt.n_hop; break;
          case EventKind::kGate:
            switch (op.gate) {
              case GateKind::kCNOT:
                ++(op.qubits[0] == q ? qt.n_cnot_control : qt.n_cnot_target);
                break;
              case GateKind::kZZ: ++qt.n_zz; break;
              case GateKind::kSWAP: ++qt.n_swap; break;
              default: ++qt.n_1q; break;
            }
            break;
          case EventKind::kIdle: break;
        }
      }
    }
  }
  return t;
}

std::string timeline(const Schedule& s) {
  std::ostringstream os;
  os << "# " << architecture_name(s.kind) << ", " << s.n_qubits << " qubits, "
     << s.phases.size() << " phases\n";
  TimeExpr clock;
  for (const auto& p : s.phases) {
    os << "[" << clock.to_string() << "] " << p.block << "/" << p.tag << " ("
       << p.duration.to_string() << "):";
    for (const auto& op : p.ops) {
      os << " ";
      if (op.kind == EventKind::kGate) {
        os << gate_kind_name(op.gate);
      } else if (op.kind == EventKind::kShuttle) {
        os << "move" << static_cast<double>(op.distance_nm) / 1000.0 << "um->" << op.dest.site;
        if (op.dest.dx || op.dest.dy) os << "(" << op.dest.dx << "," << op.dest.dy << ")";
      } else {
        os << event_kind_name(op.kind);
      }
      os << "[";
      for (std::size_t i = 0; i < op.qubits.size(); ++i) os << (i ? "," : "") << op.qubits[i];
      os << "]";
    }
    os << "\n";
    clock += p.duration;
  }
  return os.str();
}

}  // namespace pqsim
