// Copyright 2026 The teleportsim developers
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

#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsim/complex_matrix.hpp"
#include "tsim/states.hpp"

namespace tsim {

enum class GateKind {
  Identity,
  PauliX,
  PauliY,
  PauliZ,
  Hadamard,
  Cnot,
  PhaseShift,
};

struct Gate {
  GateKind kind;
  int arity;          // qubits acted on (1 or 2)
  double phi = 0.0;   // PhaseShift angle, radians
  ComplexMatrix matrix;
};

namespace gates {

inline Gate identity() {
  return {GateKind::Identity, 1, 0.0, ComplexMatrix::identity(2)};
}

inline Gate x() {
  return {GateKind::PauliX, 1, 0.0,
          ComplexMatrix(2, 2, {0, 1, 1, 0})};
}

inline Gate y() {
  return {GateKind::PauliY, 1, 0.0,
          ComplexMatrix(2, 2, {0, cplx{0, -1}, cplx{0, 1}, 0})};
}

inline Gate z() {
  return {GateKind::PauliZ, 1, 0.0,
          ComplexMatrix(2, 2, {1, 0, 0, -1})};
}

inline Gate hadamard() {
  const double h = 1.0 / std::numbers::sqrt2;
  return {GateKind::Hadamard, 1, 0.0,
          ComplexMatrix(2, 2, {h, h, h, -h})};
}

/// Controlled-NOT; targets are given as [control, target].
inline Gate cnot() {
  return {GateKind::Cnot, 2, 0.0,
          ComplexMatrix(4, 4,
                        {1, 0, 0, 0,
                         0, 1, 0, 0,
                         0, 0, 0, 1,
                         0, 0, 1, 0})};
}

/// R_phi = diag(1, e^{i phi}).
inline Gate phase_shift(double phi) {
  return {GateKind::PhaseShift, 1, phi,
          ComplexMatrix(2, 2, {1, 0, 0, std::polar(1.0, phi)})};
}

inline Gate from_kind(GateKind kind, double phi = 0.0) {
  switch (kind) {
    case GateKind::Identity: return identity();
    case GateKind::PauliX: return x();
    case GateKind::PauliY: return y();
    case GateKind::PauliZ: return z();
    case GateKind::Hadamard: return hadamard();
    case GateKind::Cnot: return cnot();
    case GateKind::PhaseShift: return phase_shift(phi);
  }
  throw std::invalid_argument("from_kind: unknown gate");
}

}  // namespace gates

namespace detail {

inline void check_targets(int gate_arity, const std::vector<int>& targets,
                          int num_qubits) {
  if (static_cast<int>(targets.size()) != gate_arity) {
    throw std::invalid_argument("apply_gate: target count does not match gate arity");
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= num_qubits) {
      throw std::invalid_argument("apply_gate: target qubit out of range");
    }
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      if (targets[i] == targets[j]) {
        throw std::invalid_argument("apply_gate: duplicate target qubit");
      }
    }
  }
}

}  // namespace detail

/// U embedded at the target positions, identity elsewhere. targets[0] is the
/// most significant index bit of the gate's own basis ordering.
inline ComplexMatrix embed_gate(const ComplexMatrix& u,
                                const std::vector<int>& targets,
                                int num_qubits) {
  const int k = static_cast<int>(targets.size());
  const std::size_t dim = std::size_t{1} << num_qubits;
  ComplexMatrix out(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    std::size_t rt = 0;
    for (int j = 0; j < k; ++j) {
      rt = (rt << 1) | static_cast<std::size_t>(qubit_bit(r, targets[j], num_qubits));
    }
    for (std::size_t c = 0; c < dim; ++c) {
      // non-target bits must agree
      std::size_t rr = r, cc = c;
      for (int j = 0; j < k; ++j) {
        rr &= ~qubit_mask(targets[j], num_qubits);
        cc &= ~qubit_mask(targets[j], num_qubits);
      }
      if (rr != cc) continue;
      std::size_t ct = 0;
      for (int j = 0; j < k; ++j) {
        ct = (ct << 1) | static_cast<std::size_t>(qubit_bit(c, targets[j], num_qubits));
      }
      out(r, c) = u(rt, ct);
    }
  }
  return out;
}

inline QubitRegister apply_gate(const QubitRegister& state, const Gate& g,
                                const std::vector<int>& targets) {
  detail::check_targets(g.arity, targets, state.num_qubits());
  const ComplexMatrix u = embed_gate(g.matrix, targets, state.num_qubits());
  std::vector<cplx> amps(state.dim());
  for (std::size_t r = 0; r < state.dim(); ++r) {
    cplx sum = 0.0;
    for (std::size_t c = 0; c < state.dim(); ++c) {
      sum += u(r, c) * state.amplitude(c);
    }
    amps[r] = sum;
  }
  return QubitRegister(state.num_qubits(), std::move(amps));
}

/// rho -> U rho U^dag with U embedded at the targets.
inline DensityMatrix apply_gate(const DensityMatrix& state, const Gate& g,
                                const std::vector<int>& targets) {
  detail::check_targets(g.arity, targets, state.num_qubits());
  const ComplexMatrix u = embed_gate(g.matrix, targets, state.num_qubits());
  return DensityMatrix(state.num_qubits(), u * state.matrix() * dagger(u));
}

}  // namespace tsim
