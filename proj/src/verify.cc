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

#include "pqsim/verify.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include <Eigen/QR>

#include "pqsim/noise.h"
#include "pqsim/parity.h"

namespace pqsim {

namespace {

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Matrix random_gaussian(std::int64_t rows, std::int64_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (std::int64_t i = 0; i < rows; ++i)
    for (std::int64_t j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

}  // namespace

bool all_passed(const std::vector<CheckResult>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string format_checks(const std::vector<CheckResult>& checks) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-4s  %-44s  %-12s  %-12s  %s\n", "", "check", "value",
                "tolerance", "detail");
  os << buf;
  for (const CheckResult& c : checks) {
    std::snprintf(buf, sizeof buf, "%-4s  %-44s  %-12.4g  %-12.4g  ", c.passed ? "PASS" : "FAIL",
                  c.name.c_str(), c.value, c.tolerance);
    os << buf << c.detail << '\n';
  }
  return os.str();
}

double phase_aligned_distance(const Matrix& u, const Matrix& v) {
  const Complex overlap = (u.adjoint() * v).trace();
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
  return (u * phase - v).cwiseAbs().maxCoeff();
}

std::vector<CheckResult> check_circuit_equivalence(const std::vector<double>& omegas,
                                                   double zz_sign, double tol) {
  const ParityLayout layout = grid_layout(2, 3);
  const std::int64_t dim = std::int64_t{1} << layout.n_physical;
  std::vector<CheckResult> out;
  for (double omega : omegas) {
    Matrix target = Matrix::Zero(dim, dim);
    for (std::int64_t x = 0; x < dim; ++x) {
      double energy = 0.0;
      for (const auto& p : layout.plaquettes) {
        int s = 1;
        for (int q : p) s = ((x >> q) & 1) ? -s : s;
        energy += s;
      }
      target(x, x) = std::exp(Complex(0.0, -omega * energy));
    }
    const Matrix u = circuit_unitary(constraint_circuit(layout, omega, zz_sign));
    CheckResult c;
    c.name = "circuit-equivalence omega=" + fmt("%.4g", omega);
    c.value = phase_aligned_distance(u, target);
    c.tolerance = tol;
    c.passed = c.value <= tol;
    c.detail = std::to_string(layout.n_physical) + " qubits, " +
               std::to_string(layout.plaquettes.size()) + " plaquettes";
    out.push_back(c);
  }
  return out;
}

std::vector<QuadratureCase> random_quadrature_cases(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<QuadratureCase> cases;
  while (static_cast<int>(cases.size()) < n) {
    QuadratureCase c;
    c.mean_ev = 40.0 + 210.0 * u01(rng);
    c.std_ev = c.mean_ev * (0.05 + 0.45 * u01(rng));
    c.velocity_m_s = std::pow(10.0, -0.5 + 2.2 * u01(rng));
    c.dx_nm = 10.0 + 30.0 * u01(rng);
    try {
      ValleyDistribution::from_moments(c.mean_ev, c.std_ev);
    } catch (const std::invalid_argument&) {
      continue;
    }
    cases.push_back(c);
  }
  return cases;
}

std::pair<double, double> valley_excitation_monte_carlo(const QuadratureCase& c,
                                                        std::int64_t samples,
                                                        std::uint64_t seed, int workers) {
  const ValleyDistribution d = ValleyDistribution::from_moments(c.mean_ev, c.std_ev);
  constexpr std::int64_t kChunk = 1 << 20;
  const std::int64_t n_chunks = (samples + kChunk - 1) / kChunk;
  std::vector<double> sum(n_chunks, 0.0), sum_sq(n_chunks, 0.0);
  std::atomic<std::int64_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::int64_t k = next.fetch_add(1);
      if (k >= n_chunks) return;
      std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(k)};
      std::mt19937_64 rng(ss);
      std::normal_distribution<double> g(0.0, d.rice_s);
      std::uniform_real_distribution<double> phi(-std::numbers::pi, std::numbers::pi);
      const std::int64_t end = std::min(samples, (k + 1) * kChunk);
      double s = 0.0, ss2 = 0.0;
      for (std::int64_t i = k * kChunk; i < end; ++i) {
        const double e = std::hypot(d.rice_nu + g(rng), g(rng));
        const double p = valley_excitation_prob(e, phi(rng), c.velocity_m_s, c.dx_nm);
        s += p;
        ss2 += p * p;
      }
      sum[k] = s;
      sum_sq[k] = ss2;
    }
  };
  std::vector<std::thread> threads;
  for (int w = 1; w < std::max(1, workers); ++w) threads.emplace_back(work);
  work();
  for (std::thread& t : threads) t.join();
  double s = 0.0, ss2 = 0.0;
  for (std::int64_t k = 0; k < n_chunks; ++k) {
    s += sum[k];
    ss2 += sum_sq[k];
  }
  const double n = static_cast<double>(samples);
  const double mean = s / n;
  const double var = std::max(ss2 / n - mean * mean, 0.0) * n / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

std::vector<CheckResult> check_valley_quadrature(int tuples, std::int64_t samples,
                                                 std::uint64_t seed, int workers) {
  std::vector<CheckResult> out;
  const std::vector<QuadratureCase> cases = random_quadrature_cases(tuples, seed);
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const QuadratureCase& c = cases[i];
    const double quad = mean_valley_excitation(
        ValleyDistribution::from_moments(c.mean_ev, c.std_ev), c.velocity_m_s, c.dx_nm);
    const auto [mc, se] = valley_excitation_monte_carlo(c, samples, seed + 1 + i, workers);
    CheckResult r;
    r.name = "valley-quadrature tuple " + std::to_string(i);
    r.value = std::abs(quad - mc);
    // Tiny floor so an all-zero sample does not demand bit equality.
    r.tolerance = 3.0 * se + 1e-15;
    r.passed = r.value <= r.tolerance;
    char buf[200];
    std::snprintf(buf, sizeof buf, "E=%.1f s=%.1f v=%.3g dx=%.1f quad=%.6g mc=%.6g se=%.2g",
                  c.mean_ev, c.std_ev, c.velocity_m_s, c.dx_nm, quad, mc, se);
    r.detail = buf;
    out.push_back(r);
  }
  return out;
}

namespace {

Schedule reference_schedule(ArchitectureKind kind) {
  const ArchitectureSpec spec = ArchitectureSpec::defaults(kind);
  const ParityLayout cell =
      kind == ArchitectureKind::kSpinBus ? spin_bus_unit_cell() : modular_unit_cell();
  return append_readout(compile(qaoa_round_circuit(cell, 0.3, 0.4, 0.5), spec), spec);
}

TimeExpr core_wall(const Schedule& s) {
  TimeExpr t;
  for (const char* b : {"sqg-manipulation", "constraint", "sqg-home"}) t += schedule_totals(s, b).wall;
  return t;
}

struct FrozenQubit {
  std::int64_t shuttled_nm;
  TimeExpr idle;
};

CheckResult compare_block(const std::string& name, const Schedule& s,
                          const std::vector<FrozenQubit>& want) {
  const ScheduleTotals t = schedule_totals(s, "constraint");
  CheckResult c;
  c.name = name;
  c.tolerance = 0.0;
  int bad = 0;
  std::ostringstream os;
  for (std::size_t q = 0; q < want.size(); ++q) {
    const QubitTotals& got = t.qubits.at(q);
    if (got.shuttled_nm != want[q].shuttled_nm || !(got.idle == want[q].idle)) {
      ++bad;
      os << "q" << q << ": " << got.shuttled_nm << " nm, idle " << got.idle.to_string() << "; ";
    }
  }
  c.value = bad;
  c.passed = bad == 0 && t.qubits.size() == want.size();
  c.detail = c.passed ? "exact per-qubit distance and idle time" : os.str();
  return c;
}

}  // namespace

WallComparison compare_round_walls() {
  const Schedule bus = reference_schedule(ArchitectureKind::kSpinBus);
  const Schedule mod = reference_schedule(ArchitectureKind::kModular);
  return {core_wall(bus), core_wall(mod), schedule_totals(bus).wall, schedule_totals(mod).wall};
}

std::vector<CheckResult> check_schedule_regression() {
  std::vector<CheckResult> out;
  const TimeExpr zz_idle{0, 2, 2, 0, 0};
  // Spin bus constraint block: (42.5, 62.5, 26.25, 61.25) um shuttled.
  const Schedule bus = reference_schedule(ArchitectureKind::kSpinBus);
  out.push_back(compare_block("schedule spin-bus constraint totals", bus,
                              {{42500, TimeExpr{46250, 0, 0, 0, 0} + zz_idle},
                               {62500, TimeExpr{26250, 0, 0, 0, 0} + zz_idle},
                               {26250, TimeExpr{62500, 0, 0, 0, 0} + zz_idle},
                               {61250, TimeExpr{27500, 0, 0, 0, 0} + zz_idle}}));

  // Modular: two shuttle classes, 40 um and 60 um.
  const TimeExpr mod_gates{0, 6, 4, 0, 0};
  const FrozenQubit a{40000, TimeExpr{80000, 0, 0, 0, 0} + mod_gates};
  const FrozenQubit b{60000, TimeExpr{60000, 0, 0, 0, 0} + mod_gates};
  const Schedule mod = reference_schedule(ArchitectureKind::kModular);
  out.push_back(compare_block("schedule modular constraint totals", mod, {a, b, a, b, b, a, b, a}));

  auto count_check = [&](const std::string& name, const Schedule& s, int swaps, int hops) {
    const ScheduleTotals t = schedule_totals(s, "constraint");
    CheckResult c;
    c.name = name;
    int bad = 0;
    for (const QubitTotals& q : t.qubits) bad += q.n_swap != swaps || q.n_hop != hops;
    c.value = bad;
    c.passed = bad == 0;
    c.detail = std::to_string(swaps) + " SWAPs and " + std::to_string(hops) + " hops per qubit";
    return c;
  };
  out.push_back(count_check("schedule modular SWAP count", mod, 10, 0));
  out.push_back(count_check("schedule modular-hop SWAP/hop count",
                            reference_schedule(ArchitectureKind::kModularHop), 2, 8));

  const WallComparison w = compare_round_walls();
  const TimeExpr diff = w.modular_core - w.bus_core;
  CheckResult c;
  c.name = "schedule bus-vs-modular distance term";
  c.value = static_cast<double>(diff.dist_nm) / 1000.0;
  c.tolerance = 0.0;
  c.passed = diff.dist_nm == 10000;
  c.detail = "modular - bus = " + diff.to_string() + " (without init/readout)";
  out.push_back(c);
  return out;
}

CheckResult check_channel_properties(int constructions, std::uint64_t seed, double tol) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> pick_kind(0, 6);
  double worst = 0.0;
  std::string worst_what = "none";
  auto note = [&](double dev, const std::string& what) {
    if (dev > worst) {
      worst = dev;
      worst_what = what;
    }
  };
  for (int i = 0; i < constructions; ++i) {
    KrausChannel ch;
    const int kind = pick_kind(rng);
    const double p = u01(rng);
    switch (kind) {
      case 0: ch = depolarizing_channel(p); break;
      case 1: ch = dephasing_channel(p); break;
      case 2: ch = bit_flip_channel(p); break;
      case 3: ch = phase_damping_channel(p); break;
      case 4: ch = amplitude_damping_channel(p); break;
      case 5: ch = dephasing_channel(p).then(bit_flip_channel(u01(rng))); break;
      default: {
        // Stinespring: columns of a random isometry split into Kraus blocks.
        const int arity = 1 + static_cast<int>(u01(rng) * 2.0);
        const int d = 1 << arity;
        const int r = 1 + static_cast<int>(u01(rng) * 4.0);
        Eigen::HouseholderQR<Matrix> qr(random_gaussian(static_cast<std::int64_t>(r) * d, d, rng));
        const Matrix iso =
            qr.householderQ() * Matrix::Identity(static_cast<std::int64_t>(r) * d, d);
        std::vector<Matrix> ops;
        for (int k = 0; k < r; ++k) ops.push_back(iso.block(k * d, 0, d, d));
        ch = KrausChannel(ops, "random");
        break;
      }
    }
    const int n = ch.arity() + static_cast<int>(u01(rng) * 2.0);
    const std::int64_t dim = std::int64_t{1} << n;
    const Matrix a = random_gaussian(dim, dim, rng);
    Matrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    std::vector<int> qubits(n);
    for (int q = 0; q < n; ++q) qubits[q] = q;
    std::shuffle(qubits.begin(), qubits.end(), rng);
    qubits.resize(ch.arity());

    const DensityMatrix out = apply_channel(DensityMatrix::unchecked(n, rho), ch, qubits);
    const Matrix& m = out.matrix();
    const std::string what = ch.label() + " on " + std::to_string(n) + " qubits";
    note((m - m.adjoint()).cwiseAbs().maxCoeff(), what + " (Hermiticity)");
    note(std::abs(m.trace() - 1.0), what + " (trace)");
    Eigen::SelfAdjointEigenSolver<Matrix> es((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    note(std::max(-es.eigenvalues().minCoeff(), 0.0), what + " (positivity)");
    // The Kraus sum itself is the reference for the superoperator kernel.
    Matrix direct = Matrix::Zero(dim, dim);
    for (const Matrix& k : ch.operators()) {
      const Matrix big = embed_operator(k, qubits, n);
      direct += big * rho * big.adjoint();
    }
    note((direct - m).cwiseAbs().maxCoeff(), what + " (kernel vs Kraus sum)");
  }
  CheckResult c;
  c.name = "channel properties";
  c.value = worst;
  c.tolerance = tol;
  c.passed = worst <= tol;
  c.detail = std::to_string(constructions) + " random channels; worst: " + worst_what;
  return c;
}

}  // namespace pqsim
