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

#include "pqsim/simulation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <iostream>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <tuple>
#include <utility>

#include "pqsim/parity.h"

namespace pqsim {

void NoiseParams::validate() const {
  gate.validate();
  coherence.validate();
  shuttle.validate();
  spam.validate();
  if (!(valley.rice_s > 0.0)) {
    throw std::invalid_argument("valley distribution has no Rice parameters");
  }
}

std::string readout_basis_name(ReadoutBasis b) {
  return b == ReadoutBasis::kZ ? "z" : "full";
}

ReadoutBasis readout_basis_from_name(const std::string& name) {
  if (name == "z") return ReadoutBasis::kZ;
  if (name == "full") return ReadoutBasis::kFull;
  throw std::invalid_argument("unknown readout basis '" + name + "'");
}

void RunConfig::validate() const {
  arch.validate();
  noise.validate();
  if (noise.spam.t_r_ns != arch.t_r_ns) {
    throw std::invalid_argument("spam t_r_ns and architecture t_r_ns disagree");
  }
  for (double a : {beta, gamma, omega}) {
    if (!std::isfinite(a)) throw std::invalid_argument("QAOA angles must be finite");
  }
}

namespace {

Matrix channel_on(const KrausChannel& ch, int local_qubit, int arity) {
  if (arity == 1) return ch.superoperator();
  std::vector<Matrix> ops;
  for (const Matrix& k : ch.operators()) {
    ops.push_back(embed_operator(k, {local_qubit}, arity));
  }
  return KrausChannel(std::move(ops), ch.label()).superoperator();
}

int gate_arity(GateKind kind) {
  switch (kind) {
    case GateKind::kCP:
    case GateKind::kZZ:
    case GateKind::kCNOT:
    case GateKind::kSWAP:
      return 2;
    default:
      return 1;
  }
}

bool noise_only(const PhaseOp& op) {
  return op.kind == EventKind::kGate && op.gate == GateKind::kSWAP &&
         (op.relabel || op.role == "transfer");
}

// Superoperators reused across the phases of one run.
class ChannelBook {
 public:
  ChannelBook(const RunConfig& cfg) : cfg_(cfg) {}

  const Matrix& gate(const PhaseOp& op) {
    const auto key = std::make_tuple(static_cast<int>(op.gate), op.angle, noise_only(op));
    auto it = gates_.find(key);
    if (it != gates_.end()) return it->second;
    GateErrorParams p = cfg_.noise.gate;
    if (!cfg_.noise.gate_noise) p = {0.0, 0.0, 0.0};
    Matrix s = noisy_gate_superop(op.gate, op.angle, p);
    // A relabelling SWAP is undone logically; only its noise survives.
    if (noise_only(op)) s = unitary_superop(build_gate(GateKind::kSWAP).matrix) * s;
    return gates_.emplace(key, std::move(s)).first->second;
  }

  const Matrix& idle(double t_ns) {
    auto it = idles_.find(t_ns);
    if (it != idles_.end()) return it->second;
    return idles_.emplace(t_ns, idle_channel(t_ns, cfg_.noise.coherence).superoperator())
        .first->second;
  }

  const Matrix& shuttle(std::int64_t nm) {
    auto it = shuttles_.find(nm);
    if (it != shuttles_.end()) return it->second;
    const NoiseParams& n = cfg_.noise;
    return shuttles_
        .emplace(nm, shuttle_channel(static_cast<double>(nm), n.shuttle, n.valley,
                                     n.coherence)
                         .superoperator())
        .first->second;
  }

  const Matrix& hop() {
    if (hop_.size() == 0) {
      const double h = cfg_.arch.hop_error / 2.0;
      hop_ = dephasing_channel(h).then(bit_flip_channel(h)).superoperator();
    }
    return hop_;
  }

  const Matrix& init() {
    if (init_.size() == 0) init_ = spam_channels(cfg_.noise.spam).init_error.superoperator();
    return init_;
  }

 private:
  const RunConfig& cfg_;
  std::map<std::tuple<int, double, bool>, Matrix> gates_;
  std::map<double, Matrix> idles_;
  std::map<std::int64_t, Matrix> shuttles_;
  Matrix hop_;
  Matrix init_;
};

// Pending single-qubit superoperators per qubit. Applying them lazily lets
// consecutive 1q channels on a qubit cost one pass over rho.
class Fuser {
 public:
  Fuser(Matrix& rho, int n) : rho_(rho), n_(n), pending_(n), dirty_(n, false) {}

  void push(int q, const Matrix& s) {
    if (!dirty_[q]) {
      pending_[q] = s;
      dirty_[q] = true;
    } else {
      pending_[q] = s * pending_[q];
    }
  }

  void flush(int q) {
    if (!dirty_[q]) return;
    apply_superop_inplace(rho_, n_, pending_[q], {q});
    dirty_[q] = false;
  }

  void flush_all() {
    for (int q = 0; q < n_; ++q) flush(q);
  }

  void apply(const Matrix& s, const std::vector<int>& qubits) {
    if (qubits.size() == 1) return push(qubits.front(), s);
    for (int q : qubits) flush(q);
    apply_superop_inplace(rho_, n_, s, qubits);
  }

 private:
  Matrix& rho_;
  int n_;
  std::vector<Matrix> pending_;
  std::vector<bool> dirty_;
};

// Applies the noisy action of one phase. `on_measure` sees the state before
// the measured qubit's own events in this phase.
template <typename OnMeasure>
void apply_phase(Matrix& rho, int n, const Phase& ph, const RunConfig& cfg,
                 ChannelBook& book, OnMeasure&& on_measure) {
  const double v = cfg.noise.shuttle.velocity_m_s;
  Fuser f(rho, n);
  for (const PhaseOp& op : ph.ops) {
    switch (op.kind) {
      case EventKind::kGate:
        f.apply(book.gate(op), op.qubits);
        break;
      case EventKind::kShuttle:
        if (cfg.noise.shuttle_noise && op.distance_nm > 0) {
          f.apply(book.shuttle(op.distance_nm), op.qubits);
        }
        break;
      case EventKind::kHop:
        if (cfg.noise.gate_noise) f.apply(book.hop(), op.qubits);
        break;
      case EventKind::kInit:
        if (cfg.noise.init_error) f.apply(book.init(), op.qubits);
        break;
      case EventKind::kMeasure:
        f.flush_all();
        on_measure(op.qubits.front(), rho);
        break;
      case EventKind::kIdle:
        break;
    }
  }
  if (cfg.noise.idle_noise) {
    for (int q = 0; q < n; ++q) {
      for (const Event& e : ph.events[q]) {
        if (e.kind != EventKind::kIdle) continue;
        const double t = e.duration.ns(cfg.arch, v);
        if (t > 0.0) f.push(q, book.idle(t));
      }
    }
  }
  f.flush_all();
}

void apply_ideal_phase(Matrix& rho, int n, const Phase& ph) {
  for (const PhaseOp& op : ph.ops) {
    if (op.kind != EventKind::kGate || noise_only(op)) continue;
    apply_superop_inplace(rho, n, unitary_superop(build_gate(op.gate, op.angle).matrix),
                          op.qubits);
  }
}

Matrix marginal(const Matrix& rho, int n, int q) {
  Matrix m = Matrix::Zero(2, 2);
  const std::int64_t bit = std::int64_t{1} << q;
  const std::int64_t dim = std::int64_t{1} << n;
  for (std::int64_t i = 0; i < dim; ++i) {
    if (i & bit) continue;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) m(a, b) += rho(i | (a ? bit : 0), i | (b ? bit : 0));
  }
  return m;
}

double marginal_fidelity(const Matrix& id, const Matrix& err, ReadoutBasis basis) {
  Matrix a = id, b = err;
  if (basis == ReadoutBasis::kZ) {
    a(0, 1) = a(1, 0) = 0.0;
    b(0, 1) = b(1, 0) = 0.0;
  }
  return fidelity(DensityMatrix::unchecked(1, a), DensityMatrix::unchecked(1, b));
}

DensityMatrix zero_state(int n) { return DensityMatrix::basis_state(n, 0); }

}  // namespace

Matrix noisy_gate_superop(GateKind kind, double angle, const GateErrorParams& p) {
  const int arity = gate_arity(kind);
  const std::int64_t d = std::int64_t{1} << arity;
  Matrix s = Matrix::Identity(d * d, d * d);
  const Matrix dep1 = depolarizing_channel(p.p_d).superoperator();
  Matrix cp_noise = Matrix::Identity(16, 16);
  if (arity == 2) {
    const KrausChannel local = dephasing_channel(p.p_phi).then(bit_flip_channel(p.p_b));
    cp_noise = channel_on(local, 1, 2) * channel_on(local, 0, 2);
  }
  for (const Primitive& prim : primitive_sequence(kind, angle)) {
    const Matrix u = build_gate(prim.kind, prim.angle).matrix;
    if (prim.kind == GateKind::kCP) {
      s = cp_noise * unitary_superop(u) * s;
    } else if (arity == 1) {
      s = dep1 * unitary_superop(u) * s;
    } else {
      const int q = prim.operands.front();
      s = channel_on(depolarizing_channel(p.p_d), q, 2) *
          unitary_superop(embed_operator(u, {q}, 2)) * s;
    }
  }
  return s;
}

DensityMatrix run_ideal(const Schedule& s) {
  const int n = s.n_qubits;
  Matrix rho = zero_state(n).matrix();
  for (const Phase& ph : s.phases) {
    if (ph.block == "readout") continue;
    apply_ideal_phase(rho, n, ph);
  }
  return DensityMatrix::unchecked(n, std::move(rho));
}

RunOutput run_schedule(const Schedule& s, const RunConfig& cfg) {
  const int n = s.n_qubits;
  ChannelBook book(cfg);
  Matrix rho = zero_state(n).matrix();
  for (const Phase& ph : s.phases) {
    if (ph.block == "readout") continue;
    apply_phase(rho, n, ph, cfg, book, [](int, const Matrix&) {});
  }
  return {run_ideal(s), DensityMatrix::unchecked(n, std::move(rho))};
}

std::vector<double> readout_fidelities(const Schedule& s, const DensityMatrix& rho_pre,
                                       const RunConfig& cfg) {
  const int n = s.n_qubits;
  ChannelBook book(cfg);
  Matrix rho = rho_pre.matrix();
  std::vector<double> out(n, -1.0);
  auto measure = [&](int q, const Matrix& cur) {
    out[q] = marginal_fidelity(marginal(rho_pre.matrix(), n, q), marginal(cur, n, q),
                               cfg.readout_basis);
  };
  for (const Phase& ph : s.phases) {
    if (ph.block != "readout") continue;
    apply_phase(rho, n, ph, cfg, book, measure);
  }
  for (int q = 0; q < n; ++q) {
    if (out[q] < 0.0) throw std::logic_error("readout block never measures qubit " +
                                             std::to_string(q));
  }
  return out;
}

double epsilon(double p_1q, double f_r, double f_m) {
  return 1.0 - (1.0 - p_1q) * f_r * f_m;
}

double measurement_fidelity(const SpamParams& sp) {
  return sp.f_m * (1.0 - sp.charge_error);
}

Schedule build_round_schedule(const RunConfig& cfg) {
  const ParityLayout layout = cfg.arch.kind == ArchitectureKind::kSpinBus
                                  ? spin_bus_unit_cell()
                                  : modular_unit_cell();
  const AbstractCircuit circ = qaoa_round_circuit(layout, cfg.beta, cfg.gamma, cfg.omega);
  return append_readout(compile(circ, cfg.arch), cfg.arch);
}

RunResult evaluate(const Schedule& full, const RunConfig& cfg, const DensityMatrix* rho_id) {
  cfg.validate();
  const int n = full.n_qubits;
  ChannelBook book(cfg);
  Matrix rho = zero_state(n).matrix();
  for (const Phase& ph : full.phases) {
    if (ph.block == "readout") continue;
    apply_phase(rho, n, ph, cfg, book, [](int, const Matrix&) {});
  }
  const DensityMatrix err = DensityMatrix::unchecked(n, std::move(rho));
  DensityMatrix id_local;
  if (rho_id == nullptr) {
    id_local = run_ideal(full);
    rho_id = &id_local;
  }
  RunResult r;
  r.fidelity = fidelity(*rho_id, err);
  r.p_1q = single_qubit_error_prob(r.fidelity, n);
  r.f_r_per_qubit = readout_fidelities(full, *rho_id, cfg);
  double log_sum = 0.0;
  for (double f : r.f_r_per_qubit) log_sum += std::log(f);
  r.f_r = std::exp(log_sum / n);
  r.f_m = measurement_fidelity(cfg.noise.spam);
  r.epsilon = epsilon(r.p_1q, r.f_r, r.f_m);
  r.wall_ns = schedule_totals(full).wall.ns(cfg.arch, cfg.noise.shuttle.velocity_m_s);
  return r;
}

RunResult evaluate(const RunConfig& cfg) {
  return evaluate(build_round_schedule(cfg), cfg);
}

std::vector<double> log_velocity_grid(double lo, double hi, int per_decade) {
  if (!(lo > 0.0) || !(hi >= lo) || per_decade < 1) {
    throw std::invalid_argument("velocity grid needs 0 < lo <= hi and per_decade >= 1");
  }
  const double x0 = std::log10(lo);
  const int steps = static_cast<int>(std::round((std::log10(hi) - x0) * per_decade));
  std::vector<double> v;
  for (int i = 0; i <= steps; ++i) {
    v.push_back(std::pow(10.0, x0 + static_cast<double>(i) / per_decade));
  }
  return v;
}

SweepGrid default_sweep_grid() {
  SweepGrid g;
  g.velocities = log_velocity_grid(0.1, 100.0, 31);
  for (double m : {50.0, 100.0, 200.0})
    for (double sd : {20.0, 30.0}) g.families.push_back({m, sd});
  g.laws = {DephasingLaw::kLinear, DephasingLaw::kGaussian};
  return g;
}

SweepResult sweep(const RunConfig& base, const SweepGrid& grid, int workers) {
  SweepResult out;
  std::vector<std::pair<Family, ValleyDistribution>> fams;
  for (const Family& f : grid.families) {
    try {
      fams.emplace_back(f, ValleyDistribution::from_moments(f.mean_ev, f.std_ev));
    } catch (const std::invalid_argument& e) {
      std::cerr << "warning: skipping valley family (" << f.mean_ev << ", " << f.std_ev
                << "): " << e.what() << "\n";
      out.skipped.push_back(f);
    }
  }
  for (DephasingLaw law : grid.laws)
    for (const auto& fam : fams)
      for (double v : grid.velocities) {
        SweepPoint p;
        p.velocity = v;
        p.family = fam.first;
        p.law = law;
        out.points.push_back(p);
      }

  const Schedule full = build_round_schedule(base);
  const DensityMatrix rho_id = run_ideal(full);
  std::map<std::pair<double, double>, ValleyDistribution> valley;
  for (const auto& f : fams) valley.emplace(std::make_pair(f.first.mean_ev, f.first.std_ev), f.second);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= out.points.size()) return;
      SweepPoint& p = out.points[i];
      try {
        RunConfig cfg = base;
        cfg.noise.shuttle.velocity_m_s = p.velocity;
        cfg.noise.coherence.law = p.law;
        cfg.noise.valley = valley.at({p.family.mean_ev, p.family.std_ev});
        p.result = evaluate(full, cfg, &rho_id);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next.store(out.points.size());
        return;
      }
    }
  };
  const int n_workers = std::max(1, workers);
  std::vector<std::thread> pool;
  for (int w = 1; w < n_workers; ++w) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

Optimum optimal_velocity(const std::vector<double>& v, const std::vector<double>& eps) {
  if (v.empty() || v.size() != eps.size()) {
    throw std::invalid_argument("optimal_velocity needs equal, non-empty inputs");
  }
  std::size_t k = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (eps[i] < eps[k] || (eps[i] == eps[k] && v[i] < v[k])) k = i;
  }
  Optimum o{v[k], eps[k], k, false};
  if (k == 0 || k + 1 == v.size()) {
    std::cerr << "warning: epsilon minimum lies on the grid boundary at v = " << v[k]
              << " m/s\n";
    return o;
  }
  o.interior = true;
  const double x0 = std::log10(v[k - 1]), x1 = std::log10(v[k]), x2 = std::log10(v[k + 1]);
  const double y0 = eps[k - 1], y1 = eps[k], y2 = eps[k + 1];
  const double den = (x0 - x1) * (x0 - x2) * (x1 - x2);
  const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den;
  const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / den;
  const double c =
      (x1 * x2 * (x1 - x2) * y0 + x2 * x0 * (x2 - x0) * y1 + x0 * x1 * (x0 - x1) * y2) / den;
  if (!(a > 0.0)) return o;
  const double xv = std::clamp(-b / (2.0 * a), x0, x2);
  o.velocity = std::pow(10.0, xv);
  o.epsilon = std::min(y1, a * xv * xv + b * xv + c);
  return o;
}

double max_depth(double f1, double p1, double f2, double p2, double eps_target) {
  const double rate = f1 * p1 + f2 * p2;
  if (!(rate > 0.0)) throw std::invalid_argument("max_depth needs a positive error rate");
  if (!(eps_target > 0.0 && eps_target <= 1.0)) {
    throw std::invalid_argument("eps_target must lie in (0, 1]");
  }
  return std::log(1.0 / eps_target) / (2.0 * rate);
}

LayerAttribution attribute_layers(const Schedule& s, const ArchitectureSpec& spec,
                                  double v_m_s, double p_round, double eps_target,
                                  int layers_1q, int layers_2q) {
  if (layers_1q < 1 || layers_2q < 1) throw std::invalid_argument("layer counts must be positive");
  double w1 = 0.0, w2 = 0.0;
  for (const Phase& ph : s.phases) {
    double w = 0.0;
    for (const auto& evs : ph.events)
      for (const Event& e : evs)
        if (e.kind == EventKind::kShuttle || e.kind == EventKind::kIdle) w += e.duration.ns(spec, v_m_s);
    if (ph.block.rfind("sqg", 0) == 0) w1 += w;
    if (ph.block.rfind("constraint", 0) == 0) w2 += w;
  }
  LayerAttribution a;
  a.layers_1q = layers_1q;
  a.layers_2q = layers_2q;
  const double total = w1 + w2;
  a.share_1q = total > 0.0 ? w1 / total : 0.5;
  a.share_2q = 1.0 - a.share_1q;
  const double layers = layers_1q + layers_2q;
  a.f1 = layers_1q / layers;
  a.f2 = layers_2q / layers;
  a.p1 = p_round * a.share_1q / layers_1q;
  a.p2 = p_round * a.share_2q / layers_2q;
  a.d_max = max_depth(a.f1, a.p1, a.f2, a.p2, eps_target);
  a.rounds = a.d_max / layers;
  return a;
}

}  // namespace pqsim
