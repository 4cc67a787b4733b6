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

#ifndef PQSIM_SIMULATION_H_
#define PQSIM_SIMULATION_H_

#include <cstddef>
#include <string>
#include <vector>

#include "pqsim/architectures.h"
#include "pqsim/core.h"
#include "pqsim/noise.h"

namespace pqsim {

struct NoiseParams {
  GateErrorParams gate;
  CoherenceParams coherence;
  ShuttleParams shuttle;
  ValleyDistribution valley = ValleyDistribution::from_moments(100.0, 20.0);
  SpamParams spam;
  // Switches for oracle runs; all on in production.
  bool gate_noise = true;
  bool idle_noise = true;
  bool shuttle_noise = true;
  bool init_error = true;
  void validate() const;
};

// z: readout fidelity from computational-basis populations (the measured
// quantity). full: Uhlmann fidelity of the single-qubit marginals.
enum class ReadoutBasis { kZ, kFull };
std::string readout_basis_name(ReadoutBasis b);
ReadoutBasis readout_basis_from_name(const std::string& name);

struct RunConfig {
  ArchitectureSpec arch;
  NoiseParams noise;
  double beta = 0.3;
  double gamma = 0.4;
  double omega = 0.5;
  ReadoutBasis readout_basis = ReadoutBasis::kZ;
  void validate() const;
};

struct RunOutput {
  DensityMatrix rho_id;
  DensityMatrix rho_err;
};

// Superoperator of a gate decomposed into noisy primitives.
Matrix noisy_gate_superop(GateKind kind, double angle, const GateErrorParams& p);

// Executes every phase outside the readout block; rho_id sees unitaries only.
RunOutput run_schedule(const Schedule& s, const RunConfig& cfg);
DensityMatrix run_ideal(const Schedule& s);

// Per-qubit readout fidelities of the readout block applied to rho_pre.
std::vector<double> readout_fidelities(const Schedule& s, const DensityMatrix& rho_pre,
                                       const RunConfig& cfg);

double epsilon(double p_1q, double f_r, double f_m);
// F_m entering epsilon: sweep fidelity times charge-detection success.
double measurement_fidelity(const SpamParams& sp);

struct RunResult {
  double fidelity = 0.0;
  double p_1q = 0.0;
  double f_r = 0.0;
  double f_m = 0.0;
  double epsilon = 0.0;
  double wall_ns = 0.0;
  std::vector<double> f_r_per_qubit;
};

// Unit-cell QAOA round for cfg.arch, with readout appended.
Schedule build_round_schedule(const RunConfig& cfg);
RunResult evaluate(const Schedule& full, const RunConfig& cfg,
                   const DensityMatrix* rho_id = nullptr);
RunResult evaluate(const RunConfig& cfg);

struct Family {
  double mean_ev = 0.0;
  double std_ev = 0.0;
  friend bool operator==(const Family&, const Family&) = default;
};

struct SweepGrid {
  std::vector<double> velocities;
  std::vector<Family> families;
  std::vector<DephasingLaw> laws;
};

std::vector<double> log_velocity_grid(double lo, double hi, int per_decade);
SweepGrid default_sweep_grid();

struct SweepPoint {
  double velocity = 0.0;
  Family family;
  DephasingLaw law = DephasingLaw::kLinear;
  RunResult result;
};

struct SweepResult {
  std::vector<SweepPoint> points;  // law-major, then family, then velocity
  std::vector<Family> skipped;     // no Rice distribution has these moments
};

// Deterministic: results are ordered by grid index regardless of `workers`.
SweepResult sweep(const RunConfig& base, const SweepGrid& grid, int workers);

struct Optimum {
  double velocity = 0.0;
  double epsilon = 0.0;
  std::size_t index = 0;
  bool interior = false;
};

// Parabolic refinement in log10(v) around the grid argmin; ties pick the
// smaller velocity, boundary minima are returned unrefined with a warning.
Optimum optimal_velocity(const std::vector<double>& v, const std::vector<double>& eps);

double max_depth(double f1, double p1, double f2, double p2, double eps_target);

struct LayerAttribution {
  int layers_1q = 1;
  int layers_2q = 8;
  double share_1q = 0.0;  // of shuttle plus idle time
  double share_2q = 0.0;
  double f1 = 0.0, p1 = 0.0, f2 = 0.0, p2 = 0.0;
  double d_max = 0.0;
  double rounds = 0.0;
};

// Spreads a per-round error over single- and two-qubit layers weighted by
// each block's share of shuttle and idle time.
LayerAttribution attribute_layers(const Schedule& s, const ArchitectureSpec& spec,
                                  double v_m_s, double p_round, double eps_target,
                                  int layers_1q = 1, int layers_2q = 8);

}  // namespace pqsim

#endif  // PQSIM_SIMULATION_H_
