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

#include <gtest/gtest.h>

#include "pqsim/architectures.h"
#include "pqsim/parity.h"
#include "pqsim/verify.h"

namespace pqsim {
namespace {

Schedule round_for(ArchitectureKind kind, bool readout = true) {
  const ArchitectureSpec spec = ArchitectureSpec::defaults(kind);
  const ParityLayout cell = kind == ArchitectureKind::kSpinBus ? spin_bus_unit_cell() : modular_unit_cell();
  const Schedule s = compile(qaoa_round_circuit(cell, 0.3, 0.4, 0.5), spec);
  return readout ? append_readout(s, spec) : s;
}

TimeExpr um_v(double um) { return TimeExpr::distance(static_cast<std::int64_t>(um * 1000)); }

TEST(TimeExpr, Arithmetic) {
  const TimeExpr a{1000, 1, 2, 0, 1}, b{500, 0, 1, 1, 0};
  EXPECT_EQ(a + b, (TimeExpr{1500, 1, 3, 1, 1}));
  EXPECT_EQ(a - a, TimeExpr{});
  EXPECT_TRUE((a - a).is_zero());
  EXPECT_FALSE((b - a).non_negative());
  const ArchitectureSpec spec = ArchitectureSpec::defaults(ArchitectureKind::kSpinBus);
  // 10 um at 10 m/s is 1000 ns.
  EXPECT_DOUBLE_EQ((TimeExpr{10000, 1, 1, 1, 1}).ns(spec, 10.0), 1000.0 + 100.0 + 50.0 + 5000.0 + 100.0);
  EXPECT_EQ(um_v(46.25).to_string(), "46.25 um/v");
}

TEST(ArchitectureSpec, DefaultsAndValidation) {
  EXPECT_EQ(ArchitectureSpec::defaults(ArchitectureKind::kSpinBus).readout_path_nm, 10000);
  EXPECT_EQ(ArchitectureSpec::defaults(ArchitectureKind::kModular).readout_path_nm, 0);
  EXPECT_EQ(ArchitectureSpec::defaults(ArchitectureKind::kSpinBus).n_qubits(), 4);
  EXPECT_EQ(ArchitectureSpec::defaults(ArchitectureKind::kModular).n_qubits(), 8);
  ArchitectureSpec bad;
  bad.t_2q_ns = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_THROW(architecture_from_name("ring"), std::invalid_argument);
}

TEST(SpinBus, ConstraintBlockTotals) {
  const ScheduleTotals t = schedule_totals(round_for(ArchitectureKind::kSpinBus), "constraint");
  const double shuttled[] = {42.5, 62.5, 26.25, 61.25};
  const double idle[] = {46.25, 26.25, 62.5, 27.5};
  ASSERT_EQ(t.qubits.size(), 4u);
  for (int q = 0; q < 4; ++q) {
    EXPECT_EQ(t.qubits[q].shuttled_nm, static_cast<std::int64_t>(shuttled[q] * 1000)) << q;
    // Two ZZ gates' worth of gate time on top of the shuttle idling.
    EXPECT_EQ(t.qubits[q].idle, (um_v(idle[q]) + TimeExpr{0, 2, 2, 0, 0})) << q;
    EXPECT_EQ(t.qubits[q].n_cnot_control, 2);
    EXPECT_EQ(t.qubits[q].n_cnot_target, 2);
    EXPECT_EQ(t.qubits[q].n_zz, 2);
  }
}

TEST(SpinBus, SingleQubitGateBlocks) {
  const Schedule s = round_for(ArchitectureKind::kSpinBus);
  const ScheduleTotals manip = schedule_totals(s, "sqg-manipulation");
  const ScheduleTotals home = schedule_totals(s, "sqg-home");
  const double to_manip[] = {8.75, 2.5, 6.25, 6.25};
  const double to_home[] = {10, 5, 7.5, 10};
  for (int q = 0; q < 4; ++q) {
    EXPECT_EQ(manip.qubits[q].shuttled_nm, static_cast<std::int64_t>(to_manip[q] * 1000)) << q;
    EXPECT_EQ(home.qubits[q].shuttled_nm, static_cast<std::int64_t>(to_home[q] * 1000)) << q;
  }
}

TEST(Modular, SwapVariant) {
  const ScheduleTotals t = schedule_totals(round_for(ArchitectureKind::kModular), "constraint");
  ASSERT_EQ(t.qubits.size(), 8u);
  const TimeExpr gates{0, 6, 4, 0, 0};  // 2 T_ZZ + 2 T_CNOT in primitive units
  for (int q = 0; q < 8; ++q) {
    EXPECT_EQ(t.qubits[q].n_swap, 10);
    EXPECT_EQ(t.qubits[q].n_hop, 0);
    const bool short_path = t.qubits[q].shuttled_nm == 40000;
    EXPECT_TRUE(short_path || t.qubits[q].shuttled_nm == 60000);
    EXPECT_EQ(t.qubits[q].idle, um_v(short_path ? 80 : 60) + gates);
  }
  EXPECT_EQ(t.qubits[0].shuttled_nm, 40000);
}

TEST(Modular, HopVariant) {
  const ScheduleTotals t = schedule_totals(round_for(ArchitectureKind::kModularHop), "constraint");
  for (const QubitTotals& q : t.qubits) {
    EXPECT_EQ(q.n_swap, 2);
    EXPECT_EQ(q.n_hop, 8);
  }
}

TEST(ScheduleTotals, EmptyScheduleIsZero) {
  Schedule s;
  s.n_qubits = 2;
  const ScheduleTotals t = schedule_totals(s);
  EXPECT_TRUE(t.wall.is_zero());
  ASSERT_EQ(t.qubits.size(), 2u);
  EXPECT_EQ(t.qubits[0].shuttled_nm, 0);
}

TEST(ScheduleTotals, BusIsTenMicronsOverVFasterWithoutInitAndReadout) {
  const WallComparison w = compare_round_walls();
  const TimeExpr diff = w.modular_core - w.bus_core;
  EXPECT_EQ(diff.dist_nm, 10000);
  // With the default readout path the init and readout shuttles flip the sign.
  EXPECT_EQ((w.modular_full - w.bus_full).dist_nm, -70000);
}

TEST(Readout, SequentialMeasurement) {
  const ArchitectureSpec spec = ArchitectureSpec::defaults(ArchitectureKind::kSpinBus);
  const Schedule s = round_for(ArchitectureKind::kSpinBus);
  const ScheduleTotals r = schedule_totals(s, "readout");
  EXPECT_EQ(r.wall, (TimeExpr{4 * spec.readout_path_nm, 0, 0, 4, 0}));
  // The last qubit measured waits for the three before it.
  int last = -1;
  TimeExpr waited;
  for (const Phase& p : s.phases) {
    if (p.block != "readout") continue;
    for (std::size_t q = 0; q < p.events.size(); ++q)
      for (const Event& e : p.events[q])
        if (e.kind == EventKind::kMeasure) last = static_cast<int>(q);
  }
  ASSERT_GE(last, 0);
  for (const Phase& p : s.phases) {
    if (p.block != "readout") continue;
    bool measured = false;
    for (const Event& e : p.events[last]) {
      if (e.kind == EventKind::kMeasure) measured = true;
      if (e.kind == EventKind::kIdle) waited += e.duration;
    }
    if (measured) break;
  }
  EXPECT_GE(waited.nr, 3);
  EXPECT_EQ(r.qubits[last].n_measure, 1);
}

TEST(Compile, ChecksPass) {
  for (ArchitectureKind k : {ArchitectureKind::kSpinBus, ArchitectureKind::kModular, ArchitectureKind::kModularHop}) {
    const Schedule s = round_for(k);
    EXPECT_NO_THROW(check_locality(s)) << architecture_name(k);
    EXPECT_NO_THROW(check_lock_step(s)) << architecture_name(k);
    EXPECT_FALSE(timeline(s).empty());
  }
}

TEST(Compile, RejectsCircuitsThatAreNotUnitCells) {
  const ArchitectureSpec spec = ArchitectureSpec::defaults(ArchitectureKind::kSpinBus);
  EXPECT_THROW(compile(qaoa_round_circuit(grid_layout(2, 3), 0.1, 0.1, 0.1), spec), CompileError);
}

TEST(Compile, EveryCircuitGateIsScheduledOnce) {
  for (ArchitectureKind k : {ArchitectureKind::kSpinBus, ArchitectureKind::kModular}) {
    const ArchitectureSpec spec = ArchitectureSpec::defaults(k);
    const ParityLayout cell = k == ArchitectureKind::kSpinBus ? spin_bus_unit_cell() : modular_unit_cell();
    const AbstractCircuit c = qaoa_round_circuit(cell, 0.3, 0.4, 0.5);
    const Schedule s = compile(c, spec);
    std::size_t gates = 0;
    for (const Phase& p : s.phases)
      for (const PhaseOp& op : p.ops)
        if (op.kind == EventKind::kGate && !op.relabel && op.role.empty() && op.gate != GateKind::kSWAP) ++gates;
    EXPECT_EQ(gates, c.gate_count()) << architecture_name(k);
  }
}

}  // namespace
}  // namespace pqsim
