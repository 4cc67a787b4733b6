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

#ifndef PQSIM_CORE_H_
#define PQSIM_CORE_H_

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace pqsim {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Qubit order is little-endian everywhere: qubit q is bit q of the basis index.

class DensityMatrix {
 public:
  DensityMatrix() = default;
  // Validates Hermiticity (1e-12), unit trace (1e-10) and PSD (-1e-10).
  DensityMatrix(int n_qubits, Matrix m);

  static DensityMatrix basis_state(int n_qubits, std::uint64_t index);
  static DensityMatrix pure(const Vector& psi);
  static DensityMatrix maximally_mixed(int n_qubits);
  // Skips validation. For kernels that already guarantee the invariants.
  static DensityMatrix unchecked(int n_qubits, Matrix m);

  int n_qubits() const { return n_qubits_; }
  std::int64_t dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  Matrix& mutable_matrix() { return matrix_; }

  // Empty string when valid, otherwise the first violated invariant.
  std::string check(double herm_tol = 1e-12, double trace_tol = 1e-10,
                    double eig_tol = 1e-10) const;

 private:
  int n_qubits_ = 0;
  Matrix matrix_;
};

enum class GateKind { kRz, kRx, kH, kX, kCP, kZZ, kCNOT, kSWAP, kCustom };

std::string gate_kind_name(GateKind kind);
GateKind gate_kind_from_name(const std::string& name);

struct UnitaryGate {
  GateKind kind = GateKind::kCustom;
  double angle = 0.0;
  int arity = 1;
  Matrix matrix;
  std::string label;
};

// One native operation of a composite gate. Operands index into the parent
// gate's operand list.
struct Primitive {
  GateKind kind;
  double angle;
  std::vector<int> operands;
};

UnitaryGate build_gate(GateKind kind, double angle = 0.0);
UnitaryGate custom_gate(const Matrix& u, const std::string& label);

// Native decomposition in application order: Rz, Rx, H and X are 1q
// primitives, CP is the only 2q primitive. 1q and CP gates return themselves.
std::vector<Primitive> primitive_sequence(GateKind kind, double angle);

class KrausChannel {
 public:
  KrausChannel() = default;
  // Throws if operators are empty, of unequal size, not a power of two, or
  // fail completeness to 1e-10.
  KrausChannel(std::vector<Matrix> operators, std::string label);

  static KrausChannel identity(int n_qubits);

  const std::vector<Matrix>& operators() const { return ops_; }
  const std::string& label() const { return label_; }
  int arity() const { return arity_; }

  // Channel that applies *this first, then `next`. Arity must match.
  KrausChannel then(const KrausChannel& next) const;

  // Sum_k K_k (x) conj(K_k), acting on row-major vectorised blocks.
  Matrix superoperator() const;

 private:
  std::vector<Matrix> ops_;
  std::string label_;
  int arity_ = 0;
};

double completeness_error(const std::vector<Matrix>& ops);

// Embeds `gate` on `targets` (targets[j] carries local bit j).
DensityMatrix apply_unitary(const DensityMatrix& rho, const UnitaryGate& gate,
                            const std::vector<int>& targets);
DensityMatrix apply_channel(const DensityMatrix& rho,
                            const KrausChannel& channel,
                            const std::vector<int>& targets);

// In-place kernel: applies a 4^k x 4^k superoperator to the k target qubits.
// rho must be Hermitian and the map Hermiticity-preserving (any CP map is).
void apply_superop_inplace(Matrix& rho, int n_qubits, const Matrix& superop,
                           const std::vector<int>& targets);
Matrix unitary_superop(const Matrix& u);

// Full 2^n x 2^n embedding of a local operator; for oracles and small n.
Matrix embed_operator(const Matrix& local, const std::vector<int>& targets,
                      int n_qubits);

Matrix hermitian_sqrt(const Matrix& m);
double fidelity(const DensityMatrix& rho_id, const DensityMatrix& rho_err);
double single_qubit_error_prob(double fidelity, int n_qubits);

// |tr(U^dag V)| / dim; equals 1 iff U and V agree up to a global phase.
double phase_insensitive_overlap(const Matrix& u, const Matrix& v);
bool equal_up_to_phase(const Matrix& u, const Matrix& v, double tol);

}  // namespace pqsim

#endif  // PQSIM_CORE_H_
