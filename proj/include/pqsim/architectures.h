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

#ifndef PQSIM_ARCHITECTURES_H_
#define PQSIM_ARCHITECTURES_H_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pqsim/core.h"
#include "pqsim/parity.h"

namespace pqsim {

enum class ArchitectureKind { kSpinBus, kModular, kModularHop };
std::string architecture_name(ArchitectureKind kind);
ArchitectureKind architecture_from_name(const std::string& name);

struct ArchitectureSpec {
  ArchitectureKind kind = ArchitectureKind::kSpinBus;
  double t_1q_ns = 100.0;
  double t_2q_ns = 50.0;
  double t_r_ns = 5000.0;
  double hop_time_ns = 100.0;
  double hop_error = 0.004;
  // Per-qubit path to the readout zone. Integral nanometres keep the
  // schedule arithmetic exact.
  std::int64_t readout_path_nm = 10000;

  static ArchitectureSpec defaults(ArchitectureKind kind);
  int n_qubits() const;
  void validate() const;
};

// Durations are kept symbolic so totals can be compared exactly:
// distance / v + n1q T_1q + n2q T_2q + nr T_r + nhop T_hop.
struct TimeExpr {
  std::int64_t dist_nm = 0;
  int n1q = 0;
  int n2q = 0;
  int nr = 0;
  int nhop = 0;

  TimeExpr& operator+=(const TimeExpr& o);
  TimeExpr& operator-=(const TimeExpr& o);
  friend TimeExpr operator+(TimeExpr a, const TimeExpr& b) { return a += b; }
  friend TimeExpr operator-(TimeExpr a, const TimeExpr& b) { return a -= b; }
  friend bool operator==(const TimeExpr&, const TimeExpr&) = default;
  bool is_zero() const { return *this == TimeExpr{}; }
  bool non_negative() const;
  double ns(const ArchitectureSpec& spec, double v_m_s) const;
  std::string to_string() const;

  static TimeExpr distance(std::int64_t nm) { return {nm, 0, 0, 0, 0}; }
  static TimeExpr gate(GateKind kind);
};

// (site, cell offset). Offsets count unit cells in x and y.
struct Position {
  std::string site;
  int dx = 0;
  int dy = 0;
  friend bool operator==(const Position&, const Position&) = default;
};

enum class EventKind { kGate, kShuttle, kIdle, kMeasure, kInit, kHop };
std::string event_kind_name(EventKind kind);

struct Event {
  EventKind kind = EventKind::kIdle;
  TimeExpr duration;
  std::int64_t distance_nm = 0;  // shuttle only
  int op_index = -1;             // index into Phase::ops, -1 for idle
};

// One scheduled operation. 2q gates list both operands; `images` gives the
// periodic cell offset of each operand's copy taking part in the gate.
struct PhaseOp {
  EventKind kind = EventKind::kGate;
  GateKind gate = GateKind::kH;
  double angle = 0.0;
  std::vector<int> qubits;
  std::vector<std::pair<int, int>> images;
  std::int64_t distance_nm = 0;
  Position dest;                 // shuttle only
  bool relabel = false;          // SWAP that also moves logical labels
  std::string role;              // "transfer" for readout/init SWAP chains
};

struct Phase {
  std::string tag;
  std::string block;  // init, sqg-manipulation, constraint, sqg-home, readout
  TimeExpr duration;
  std::vector<PhaseOp> ops;
  std::vector<std::vector<Event>> events;  // per qubit, idle-padded
};

struct Schedule {
  ArchitectureKind kind = ArchitectureKind::kSpinBus;
  int n_qubits = 0;
  std::vector<Position> initial_positions;
  std::vector<Phase> phases;
};

class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Layouts whose constraint circuits the tables below are written for.
ParityLayout spin_bus_unit_cell();
ParityLayout modular_unit_cell();

Schedule compile_spin_bus(const AbstractCircuit& circ, const ArchitectureSpec& spec);
Schedule compile_modular(const AbstractCircuit& circ, const ArchitectureSpec& spec);
// Dispatches on spec.kind.
Schedule compile(const AbstractCircuit& circ, const ArchitectureSpec& spec);
Schedule append_readout(const Schedule& s, const ArchitectureSpec& spec);

// Replays positions and throws CompileError on a non-local 2q gate or a 1q
// gate outside a manipulation site.
void check_locality(const Schedule& s);
// Throws CompileError unless per-qubit event durations add up to the phase.
void check_lock_step(const Schedule& s);

struct QubitTotals {
  std::int64_t shuttled_nm = 0;
  TimeExpr idle;
  TimeExpr busy;
  int n_1q = 0;
  int n_cnot_control = 0;
  int n_cnot_target = 0;
  int n_zz = 0;
  int n_swap = 0;
  int n_hop = 0;
  int n_measure = 0;
  int n_init = 0;
};

struct ScheduleTotals {
  TimeExpr wall;
  std::vector<QubitTotals> qubits;
};

// Totals over phases whose block equals `block`, or all phases when empty.
ScheduleTotals schedule_totals(const Schedule& s, const std::string& block = "");

// Human-readable timeline, one line per phase.
std::string timeline(const Schedule& s);

}  // namespace pqsim

#endif  // PQSIM_ARCHITECTURES_H_
