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

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tsim/gates.hpp"
#include "tsim/states.hpp"

namespace tsim {

/// Cartesian representation of a single-qubit state. Pure states sit on the
/// unit sphere, mixed states strictly inside. Shot-noise estimates may step
/// outside the ball, so the struct itself carries no norm constraint.
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// rho -> [2 Re rho01, 2 Im rho10, rho00 - rho11].
inline BlochVector density_to_bloch(const DensityMatrix& rho) {
  if (rho.num_qubits() != 1) {
    throw std::invalid_argument("density_to_bloch: expected a single qubit");
  }
  const ComplexMatrix& m = rho.matrix();
  return {2.0 * m(0, 1).real(), 2.0 * m(1, 0).imag(),
          m(0, 0).real() - m(1, 1).real()};
}

/// rho = (I + r_x sigma_x + r_y sigma_y + r_z sigma_z) / 2. Vectors outside
/// the unit ball (beyond tolerance) are rejected, never projected inward.
inline DensityMatrix bloch_to_density(const BlochVector& r) {
  if (r.norm() > 1.0 + kStructuralTol) {
    throw std::domain_error("bloch_to_density: |r| exceeds 1");
  }
  ComplexMatrix m(2, 2);
  m(0, 0) = 0.5 * (1.0 + r.z);
  m(1, 1) = 0.5 * (1.0 - r.z);
  m(0, 1) = 0.5 * cplx{r.x, -r.y};
  m(1, 0) = 0.5 * cplx{r.x, r.y};
  return DensityMatrix(1, std::move(m));
}

/// F = <psi| rho |psi>, clamped to [0, 1] against integrator-level
/// asymmetry in rho.
inline double fidelity(const DensityMatrix& rho, const QubitRegister& psi) {
  if (rho.dim() != psi.dim()) {
    throw std::invalid_argument("fidelity: dimension mismatch");
  }
  cplx f = 0.0;
  for (std::size_t r = 0; r < rho.dim(); ++r) {
    for (std::size_t c = 0; c < rho.dim(); ++c) {
      f += std::conj(psi.amplitude(r)) * rho.matrix()(r, c) * psi.amplitude(c);
    }
  }
  return std::clamp(f.real(), 0.0, 1.0);
}

/// Tr(rho^2); 1 for pure states, 1/2^n for the maximally mixed state.
inline double purity(const DensityMatrix& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

/// Coordinate action of the single-qubit gates on a Bloch vector:
///   I: [ x,  y,  z]    X: [ x, -y, -z]    Y: [-x,  y, -z]
///   Z: [-x, -y,  z]    H: [ z, -y,  x]
inline BlochVector bloch_gate_action(const BlochVector& r, GateKind g) {
  switch (g) {
    case GateKind::Identity: return r;
    case GateKind::PauliX: return {r.x, -r.y, -r.z};
    case GateKind::PauliY: return {-r.x, r.y, -r.z};
    case GateKind::PauliZ: return {-r.x, -r.y, r.z};
    case GateKind::Hadamard: return {r.z, -r.y, r.x};
    default:
      throw std::invalid_argument("bloch_gate_action: unsupported gate");
  }
}

}  // namespace tsim
