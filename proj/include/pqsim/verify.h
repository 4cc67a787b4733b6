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

#ifndef PQSIM_VERIFY_H_
#define PQSIM_VERIFY_H_

#include <cstdint>
#include <string>
#include <vector>

#include "pqsim/architectures.h"
#include "pqsim/core.h"

namespace pqsim {

// Oracle checks shared by the verify subcommand, the tests and the
// acceptance binary.
struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;      // observed deviation
  double tolerance = 0.0;  // bound it is compared against
  std::string detail;
};

bool all_passed(const std::vector<CheckResult>& checks);
// Fixed-width table, one row per check.
std::string format_checks(const std::vector<CheckResult>& checks);

// Largest entry of |U e^{i phi} - V| after aligning the global phase.
double phase_aligned_distance(const Matrix& u, const Matrix& v);

// Decomposed constraint circuit on the 2x3 grid (two plaquettes) against the
// diagonal exp(-i omega sum_l Z_l1 Z_l2 Z_l3 Z_l4). zz_sign = +1 is the
// negative control with the ZZ angle convention flipped.
std::vector<CheckResult> check_circuit_equivalence(const std::vector<double>& omegas,
                                                   double zz_sign = -1.0, double tol = 1e-9);

struct QuadratureCase {
  double mean_ev = 0.0, std_ev = 0.0, velocity_m_s = 0.0, dx_nm = 0.0;
};
// Random feasible tuples: Rice moments, velocity and dot size.
std::vector<QuadratureCase> random_quadrature_cases(int n, std::uint64_t seed);
// Mean and standard error of the excitation probability by direct sampling.
std::pair<double, double> valley_excitation_monte_carlo(const QuadratureCase& c,
                                                        std::int64_t samples,
                                                        std::uint64_t seed, int workers = 1);
// Quadrature within 3 standard errors of the sampled mean, per tuple.
std::vector<CheckResult> check_valley_quadrature(int tuples, std::int64_t samples,
                                                 std::uint64_t seed, int workers = 1);

// Constraint-block totals per qubit for the reference unit cells, compared
// exactly against the frozen table, plus SWAP/hop counts and the
// manipulation wall-time difference between the bus and the modular device.
std::vector<CheckResult> check_schedule_regression();

// Round wall times without init and readout, and with them.
struct WallComparison {
  TimeExpr bus_core, modular_core;
  TimeExpr bus_full, modular_full;
};
WallComparison compare_round_walls();

// Random Kraus channels (library channels with random parameters and
// Stinespring-sampled ones) applied to random states; checks trace,
// Hermiticity and positivity of every output.
CheckResult check_channel_properties(int constructions, std::uint64_t seed,
                                     double tol = 1e-10);

}  // namespace pqsim

#endif  // PQSIM_VERIFY_H_
