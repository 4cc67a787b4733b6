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

#include "pqsim/core.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace pqsim {
namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

bool is_power_of_two(std::int64_t x) { return x > 0 && (x & (x - 1)) == 0; }

int log2_exact(std::int64_t x) {
  int k = 0;
  while ((std::int64_t{1} << k) < x) ++k;
  return k;
}

void check_targets(const std::vector<int>& targets, int n_qubits) {
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= n_qubits) {
      throw std::out_of_range("qubit index " + std::to_string(targets[i]) +
                              " out of range for " + std::to_string(n_qubits) +
                              " qubits");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (targets[i] == targets[j]) {
        throw std::invalid_argument("duplicate target qubit " +
                                    std::to_string(targets[i]));
      }
    }
  }
}

}  // namespace

DensityMatrix::DensityMatrix(int n_qubits, Matrix m)
    : n_qubits_(n_qubits), matrix_(std::move(m)) {
  if (n_qubits < 0 || matrix_.rows() != (std::int64_t{1} << n_qubits) ||
      matrix_.cols() != matrix_.rows()) {
    throw std::invalid_argument("density matrix dimension does not match " +
                                std::to_string(n_qubits) + " qubits");
  }
  std::string err = check();
  if (!err.empty()) throw std::invalid_argument("invalid density matrix: " + err);
}

DensityMatrix DensityMatrix::basis_state(int n_qubits, std::uint64_t index) {
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  if (static_cast<std::int64_t>(index) >= dim) {
    throw std::out_of_range("basis index out of range");
  }
  Matrix m = Matrix::Zero(dim, dim);
  m(index, index) = 1.0;
  return unchecked(n_qubits, std::move(m));
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  if (!is_power_of_two(psi.size())) {
    throw std::invalid_argument("state vector length is not a power of two");
  }
  Vector v = psi / psi.norm();
  return DensityMatrix(log2_exact(psi.size()), v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(int n_qubits) {
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  return unchecked(n_qubits,
                   Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::unchecked(int n_qubits, Matrix m) {
  DensityMatrix d;
  d.n_qubits_ = n_qubits;
  d.matrix_ = std::move(m);
  return d;
}

std::string DensityMatrix::check(double herm_tol, double trace_tol,
                                 double eig_tol) const {
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > herm_tol) {
    std::ostringstream os;
    os << "not Hermitian (max deviation " << herm << ")";
    return os.str();
  }
  const Complex tr = matrix_.trace();
  if (std::abs(tr - 1.0) > trace_tol) {
    std::ostringstream os;
    os << "trace " << tr.real() << " != 1";
    return os.str();
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -eig_tol) {
    std::ostringstream os;
    os << "negative eigenvalue " << es.eigenvalues().minCoeff();
    return os.str();
  }
  return {};
}

std::string gate_kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::kRz: return "rz";
    case GateKind::kRx: return "rx";
    case GateKind::kH: return "h";
    case GateKind::kX: return "x";
    case GateKind::kCP: return "cp";
    case GateKind::kZZ: return "zz";
    case GateKind::kCNOT: return "cnot";
    case GateKind::kSWAP: return "swap";
    case GateKind::kCustom: return "custom";
  }
  return "custom";
}

GateKind gate_kind_from_name(const std::string& name) {
  for (GateKind k : {GateKind::kRz, GateKind::kRx, GateKind::kH, GateKind::kX,
                     GateKind::kCP, GateKind::kZZ, GateKind::kCNOT,
                     GateKind::kSWAP}) {
    if (gate_kind_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown gate name '" + name + "'");
}

UnitaryGate build_gate(GateKind kind, double angle) {
  UnitaryGate g;
  g.kind = kind;
  g.angle = angle;
  g.label = gate_kind_name(kind);
  switch (kind) {
    case GateKind::kRz:
      g.arity = 1;
      g.matrix = Matrix::Zero(2, 2);
      g.matrix(0, 0) = std::exp(-kI * angle / 2.0);
      g.matrix(1, 1) = std::exp(kI * angle / 2.0);
      break;
    case GateKind::kRx: {
      g.arity = 1;
      g.matrix.resize(2, 2);
      const double c = std::cos(angle / 2.0), s = std::sin(angle / 2.0);
      g.matrix << c, -kI * s, -kI * s, c;
      break;
    }
    case GateKind::kH:
      g.arity = 1;
      g.matrix.resize(2, 2);
      g.matrix << 1.0, 1.0, 1.0, -1.0;
      g.matrix /= std::sqrt(2.0);
      break;
    case GateKind::kX:
      g.arity = 1;
      g.matrix.resize(2, 2);
      g.matrix << 0.0, 1.0, 1.0, 0.0;
      break;
    case GateKind::kCP:
      g.arity = 2;
      g.matrix = Matrix::Identity(4, 4);
      g.matrix(3, 3) = std::exp(kI * angle);
      break;
    case GateKind::kZZ:
      g.arity = 2;
      g.matrix = Matrix::Zero(4, 4);
      for (int i = 0; i < 4; ++i) {
        const int parity = (i & 1) ^ ((i >> 1) & 1);
        g.matrix(i, i) = std::exp(kI * (parity ? -angle : angle));
      }
      break;
    case GateKind::kCNOT:
      // Operand 0 (bit 0) controls, operand 1 (bit 1) is the target.
      g.arity = 2;
      g.matrix = Matrix::Zero(4, 4);
      g.matrix(0, 0) = g.matrix(2, 2) = 1.0;
      g.matrix(3, 1) = g.matrix(1, 3) = 1.0;
      break;
    case GateKind::kSWAP:
      g.arity = 2;
      g.matrix = Matrix::Zero(4, 4);
      g.matrix(0, 0) = g.matrix(3, 3) = 1.0;
      g.matrix(1, 2) = g.matrix(2, 1) = 1.0;
      break;
    case GateKind::kCustom:
      throw std::invalid_argument("use custom_gate() for custom unitaries");
  }
  return g;
}

UnitaryGate custom_gate(const Matrix& u, const std::string& label) {
  if (u.rows() != u.cols() || (u.rows() != 2 && u.rows() != 4)) {
    throw std::invalid_argument("custom gate must be 2x2 or 4x4");
  }
  const std::int64_t d = u.rows();
  if ((u.adjoint() * u - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("custom gate '" + label + "' is not unitary");
  }
  UnitaryGate g;
  g.kind = GateKind::kCustom;
  g.arity = d == 2 ? 1 : 2;
  g.matrix = u;
  g.label = label;
  return g;
}

std::vector<Primitive> primitive_sequence(GateKind kind, double angle) {
  switch (kind) {
    case GateKind::kRz:
    case GateKind::kRx:
    case GateKind::kH:
    case GateKind::kX:
      return {{kind, angle, {0}}};
    case GateKind::kCP:
      return {{kind, angle, {0, 1}}};
    case GateKind::kZZ: {
      // exp(i a ZZ) = CP(-2b) Rz(b) Rz(b) with b = -2a, up to global phase.
      const double b = -2.0 * angle;
      return {{GateKind::kRz, b, {0}},
              {GateKind::kRz, b, {1}},
              {GateKind::kCP, -2.0 * b, {0, 1}}};
    }
    case GateKind::kCNOT:
      return {{GateKind::kH, 0.0, {1}},
              {GateKind::kCP, kPi, {0, 1}},
              {GateKind::kH, 0.0, {1}}};
    case GateKind::kSWAP: {
      // CNOT(1->0), CNOT(0->1), CNOT(1->0) in application order.
      std::vector<Primitive> seq;
      for (int target : {0, 1, 0}) {
        seq.push_back({GateKind::kH, 0.0, {target}});
        seq.push_back({GateKind::kCP, kPi, {0, 1}});
        seq.push_back({GateKind::kH, 0.0, {target}});
      }
      return seq;
    }
    case GateKind::kCustom:
      break;
  }
  throw std::invalid_argument("custom gates have no primitive sequence");
}

double completeness_error(const std::vector<Matrix>& ops) {
  if (ops.empty()) return 1.0;
  const std::int64_t d = ops.front().rows();
  Matrix sum = Matrix::Zero(d, d);
  for (const Matrix& k : ops) sum += k.adjoint() * k;
  return (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
}

KrausChannel::KrausChannel(std::vector<Matrix> operators, std::string label)
    : ops_(std::move(operators)), label_(std::move(label)) {
  if (ops_.empty()) throw std::invalid_argument("channel has no operators");
  const std::int64_t d = ops_.front().rows();
  if (!is_power_of_two(d)) {
    throw std::invalid_argument("Kraus dimension is not a power of two");
  }
  for (const Matrix& k : ops_) {
    if (k.rows() != d || k.cols() != d) {
      throw std::invalid_argument("Kraus operators have unequal dimensions");
    }
  }
  const double err = completeness_error(ops_);
  if (err > 1e-10) {
    std::ostringstream os;
    os << "channel '" << label_ << "' violates completeness by " << err;
    throw std::invalid_argument(os.str());
  }
  arity_ = log2_exact(d);
}

KrausChannel KrausChannel::identity(int n_qubits) {
  const std::int64_t d = std::int64_t{1} << n_qubits;
  return KrausChannel({Matrix::Identity(d, d)}, "identity");
}

KrausChannel KrausChannel::then(const KrausChannel& next) const {
  if (next.arity_ != arity_) {
    throw std::invalid_argument("cannot compose channels of different arity");
  }
  std::vector<Matrix> out;
  out.reserve(ops_.size() * next.ops_.size());
  for (const Matrix& b : next.ops_) {
    for (const Matrix& a : ops_) out.push_back(b * a);
  }
  return KrausChannel(std::move(out), label_ + "+" + next.label_);
}

Matrix KrausChannel::superoperator() const {
  const std::int64_t d = ops_.front().rows();
  Matrix s = Matrix::Zero(d * d, d * d);
  for (const Matrix& k : ops_) {
    const Matrix kc = k.conjugate();
    for (std::int64_t a = 0; a < d; ++a)
      for (std::int64_t b = 0; b < d; ++b)
        for (std::int64_t c = 0; c < d; ++c)
          for (std::int64_t e = 0; e < d; ++e)
            s(a * d + b, c * d + e) += k(a, c) * kc(b, e);
  }
  return s;
}

Matrix unitary_superop(const Matrix& u) {
  const std::int64_t d = u.rows();
  const Matrix uc = u.conjugate();
  Matrix s(d * d, d * d);
  for (std::int64_t a = 0; a < d; ++a)
    for (std::int64_t b = 0; b < d; ++b)
      for (std::int64_t c = 0; c < d; ++c)
        for (std::int64_t e = 0; e < d; ++e)
          s(a * d + b, c * d + e) = u(a, c) * uc(b, e);
  return s;
}

namespace {

// Fixed-size inner loop for 1q and 2q superoperators; the generic path below
// handles larger arities.
template <int D>
void apply_fixed(Matrix& rho, const Matrix& superop,
                 const std::vector<std::int64_t>& bases,
                 const std::vector<std::int64_t>& off) {
  using Block = Eigen::Matrix<std::complex<double>, D * D, 1>;
  const Eigen::Matrix<std::complex<double>, D * D, D * D> s = superop;
  Block in, out;
  // Only blocks with r <= c are computed; the rest follow from Hermiticity.
  const std::size_t nb = bases.size();
  for (std::size_t j = 0; j < nb; ++j) {
    const std::int64_t c = bases[j];
    for (std::size_t i = 0; i <= j; ++i) {
      const std::int64_t r = bases[i];
      for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) in[a * D + b] = rho(r + off[a], c + off[b]);
      out.noalias() = s * in;
      for (int a = 0; a < D; ++a)
        for (int b = 0; b < D; ++b) {
          rho(r + off[a], c + off[b]) = out[a * D + b];
          if (i != j) rho(c + off[b], r + off[a]) = std::conj(out[a * D + b]);
        }
    }
  }
}

}  // namespace

void apply_superop_inplace(Matrix& rho, int n_qubits, const Matrix& superop,
                           const std::vector<int>& targets) {
  check_targets(targets, n_qubits);
  const int k = static_cast<int>(targets.size());
  const std::int64_t d = std::int64_t{1} << k;
  if (superop.rows() != d * d || superop.cols() != d * d) {
    throw std::invalid_argument("superoperator arity does not match targets");
  }
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  std::vector<std::int64_t> off(d, 0);
  std::int64_t mask = 0;
  for (int j = 0; j < k; ++j) mask |= std::int64_t{1} << targets[j];
  for (std::int64_t a = 0; a < d; ++a) {
    for (int j = 0; j < k; ++j) {
      if ((a >> j) & 1) off[a] |= std::int64_t{1} << targets[j];
    }
  }
  std::vector<std::int64_t> bases;
  bases.reserve(dim / d);
  for (std::int64_t i = 0; i < dim; ++i) {
    if ((i & mask) == 0) bases.push_back(i);
  }
  if (k == 1) return apply_fixed<2>(rho, superop, bases, off);
  if (k == 2) return apply_fixed<4>(rho, superop, bases, off);
  const std::int64_t dd = d * d;
  Vector in(dd), out(dd);
  for (std::int64_t c : bases) {
    for (std::int64_t r : bases) {
      for (std::int64_t a = 0; a < d; ++a)
        for (std::int64_t b = 0; b < d; ++b)
          in[a * d + b] = rho(r + off[a], c + off[b]);
      out.noalias() = superop * in;
      for (std::int64_t a = 0; a < d; ++a)
        for (std::int64_t b = 0; b < d; ++b)
          rho(r + off[a], c + off[b]) = out[a * d + b];
    }
  }
}

Matrix embed_operator(const Matrix& local, const std::vector<int>& targets,
                      int n_qubits) {
  check_targets(targets, n_qubits);
  const int k = static_cast<int>(targets.size());
  if (local.rows() != (std::int64_t{1} << k)) {
    throw std::invalid_argument("operator arity does not match targets");
  }
  const std::int64_t dim = std::int64_t{1} << n_qubits;
  Matrix full = Matrix::Zero(dim, dim);
  auto local_index = [&](std::int64_t i) {
    std::int64_t a = 0;
    for (int j = 0; j < k; ++j) a |= ((i >> targets[j]) & 1) << j;
    return a;
  };
  std::int64_t mask = 0;
  for (int t : targets) mask |= std::int64_t{1} << t;
  for (std::int64_t r = 0; r < dim; ++r) {
    for (std::int64_t c = 0; c < dim; ++c) {
      if ((r & ~mask) != (c & ~mask)) continue;
      full(r, c) = local(local_index(r), local_index(c));
    }
  }
  return full;
}

DensityMatrix apply_unitary(const DensityMatrix& rho, const UnitaryGate& gate,
                            const std::vector<int>& targets) {
  if (static_cast<int>(targets.size()) != gate.arity) {
    throw std::invalid_argument("gate arity " + std::to_string(gate.arity) +
                                " does not match " +
                                std::to_string(targets.size()) + " targets");
  }
  Matrix m = rho.matrix();
  apply_superop_inplace(m, rho.n_qubits(), unitary_superop(gate.matrix),
                        targets);
  return DensityMatrix::unchecked(rho.n_qubits(), std::move(m));
}

DensityMatrix apply_channel(const DensityMatrix& rho,
                            const KrausChannel& channel,
                            const std::vector<int>& targets) {
  if (static_cast<int>(targets.size()) != channel.arity()) {
    throw std::invalid_argument("channel arity does not match targets");
  }
  Matrix m = rho.matrix();
  apply_superop_inplace(m, rho.n_qubits(), channel.superoperator(), targets);
  return DensityMatrix::unchecked(rho.n_qubits(), std::move(m));
}

Matrix hermitian_sqrt(const Matrix& m) {
  const Matrix h = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Eigen::VectorXd ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < 0.0) {
      if (ev[i] < -1e-10) {
        throw std::domain_error("matrix square root of a non-PSD matrix");
      }
      ev[i] = 0.0;
    }
    ev[i] = std::sqrt(ev[i]);
  }
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() *
         es.eigenvectors().adjoint();
}

double fidelity(const DensityMatrix& rho_id, const DensityMatrix& rho_err) {
  if (rho_id.dim() != rho_err.dim()) {
    throw std::invalid_argument("fidelity of density matrices of different size");
  }
  // Pure reference: F = <psi|rho_err|psi>, with psi read off the column of
  // rho_id that has the largest diagonal entry.
  const Matrix& a = rho_id.matrix();
  if (std::abs(a.squaredNorm() - 1.0) < 1e-12) {
    Eigen::Index k = 0;
    a.diagonal().real().maxCoeff(&k);
    const Vector psi = a.col(k) / std::sqrt(a(k, k).real());
    const double f = (psi.adjoint() * rho_err.matrix() * psi)(0, 0).real();
    return std::clamp(f, 0.0, 1.0);
  }
  const Matrix s = hermitian_sqrt(a);
  const Matrix inner = s * rho_err.matrix() * s;
  Eigen::SelfAdjointEigenSolver<Matrix> es((inner + inner.adjoint()) / 2.0,
                                           Eigen::EigenvaluesOnly);
  double tr = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()[i];
    if (ev < -1e-10) throw std::domain_error("fidelity of a non-PSD operator");
    if (ev > 0.0) tr += std::sqrt(ev);
  }
  return std::clamp(tr * tr, 0.0, 1.0);
}

double single_qubit_error_prob(double f, int n_qubits) {
  if (!(f >= 0.0 && f <= 1.0) || n_qubits < 1) {
    throw std::invalid_argument("need 0 <= F <= 1 and n >= 1");
  }
  return 1.0 - std::pow(f, 1.0 / n_qubits);
}

double phase_insensitive_overlap(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols()) {
    throw std::invalid_argument("unitaries of different size");
  }
  return std::abs((u.adjoint() * v).trace()) / static_cast<double>(u.rows());
}

bool equal_up_to_phase(const Matrix& u, const Matrix& v, double tol) {
  // Align the global phase on the largest entry, then compare elementwise.
  Eigen::Index r = 0, c = 0;
  u.cwiseAbs().maxCoeff(&r, &c);
  if (std::abs(v(r, c)) < 1e-300) return false;
  const Complex phase = u(r, c) / v(r, c);
  if (std::abs(std::abs(phase) - 1.0) > tol) return false;
  return (u - phase * v).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace pqsim
