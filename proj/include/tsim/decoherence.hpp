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

#include "tsim/bloch.hpp"
#include "tsim/gates.hpp"
#include "tsim/states.hpp"

namespace tsim {

/// Parametrized damping map. The master equation is
///
///   d rho / dt = -i [H, rho] + sum_k ( L_k rho L_k - {L_k L_k, rho} / 2 )
///
/// with L_k = sqrt(gamma_k) sigma_k for k in {x, y, z} and H = (omega/2)
/// sigma_z (hbar = 1, all times dimensionless in units of 1/gamma or
/// 1/omega). The dissipative coupling axes precess together with the
/// Hamiltonian rotation, i.e. the decay rates act in the qubit's rotating
/// frame. Under that coupling the map factors exactly into a diagonal
/// Bloch-coordinate damping followed by a z-rotation by omega * t:
///
///   r_x(t) = r_x(0) exp(-2 (gamma_y + gamma_z) t)
///   r_y(t) = r_y(0) exp(-2 (gamma_x + gamma_z) t)
///   r_z(t) = r_z(0) exp(-2 (gamma_x + gamma_y) t)
///
/// Named channels are parameter specializations of this one formula:
/// phase damping (gamma_z only), y-z damping (gamma_x only), combined
/// y-z-phase damping (gamma_x and gamma_z).
struct NoiseChannel {
  double gamma_x = 0.0;
  double gamma_y = 0.0;
  double gamma_z = 0.0;
  double omega = 0.0;
  double duration = 0.0;

  void validate() const {
    const bool rates_ok =
        std::isfinite(gamma_x) && gamma_x >= 0.0 &&
        std::isfinite(gamma_y) && gamma_y >= 0.0 &&
        std::isfinite(gamma_z) && gamma_z >= 0.0;
    if (!rates_ok || !std::isfinite(omega) || !std::isfinite(duration) ||
        duration < 0.0) {
      throw std::invalid_argument("NoiseChannel: invalid rates or duration");
    }
  }

  bool is_noiseless() const {
    return gamma_x == 0.0 && gamma_y == 0.0 && gamma_z == 0.0 &&
           omega == 0.0;
  }
};

struct Attenuations {
  double x = 1.0;
  double y = 1.0;
  double z = 1.0;
};

inline Attenuations channel_attenuations(const NoiseChannel& ch) {
  const double t = ch.duration;
  return {std::exp(-2.0 * (ch.gamma_y + ch.gamma_z) * t),
          std::exp(-2.0 * (ch.gamma_x + ch.gamma_z) * t),
          std::exp(-2.0 * (ch.gamma_x + ch.gamma_y) * t)};
}

/// Extends the channel to one qubit of a joint state: the map acts on the
/// designated qubit, identity on the rest. With compensate = true only the
/// damping acts; with compensate = false the off-diagonals of the target
/// qubit additionally pick up the e^{-/+ i omega t} rotation factors.
///
/// The action on the target qubit's 2x2 fibers, with attenuations
/// (ax, ay, az) and theta = omega * t:
///   rho00' = ((1+az) rho00 + (1-az) rho11) / 2
///   rho01' = e^{-i theta} ((ax+ay) rho01 + (ax-ay) rho10) / 2
/// (and the Hermitian mirrors).
inline DensityMatrix apply_channel(const DensityMatrix& state, int qubit,
                                   const NoiseChannel& ch, bool compensate) {
  ch.validate();
  const int n = state.num_qubits();
  if (qubit < 0 || qubit >= n) {
    throw std::invalid_argument("apply_channel: qubit out of range");
  }
  const Attenuations a = channel_attenuations(ch);
  const double theta = compensate ? 0.0 : ch.omega * ch.duration;
  const cplx keep = 0.5 * (a.x + a.y) * std::polar(1.0, -theta);
  const cplx swap = 0.5 * (a.x - a.y) * std::polar(1.0, -theta);

  const std::size_t dim = state.dim();
  const std::size_t mask = qubit_mask(qubit, n);
  ComplexMatrix out(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    if (r & mask) continue;
    for (std::size_t c = 0; c < dim; ++c) {
      if (c & mask) continue;
      const cplx m00 = state.matrix()(r, c);
      const cplx m01 = state.matrix()(r, c | mask);
      const cplx m10 = state.matrix()(r | mask, c);
      const cplx m11 = state.matrix()(r | mask, c | mask);
      out(r, c) = 0.5 * ((1.0 + a.z) * m00 + (1.0 - a.z) * m11);
      out(r | mask, c | mask) = 0.5 * ((1.0 - a.z) * m00 + (1.0 + a.z) * m11);
      out(r, c | mask) = keep * m01 + swap * m10;
      out(r | mask, c) = std::conj(swap) * m01 + std::conj(keep) * m10;
    }
  }
  return DensityMatrix(n, std::move(out));
}

/// Closed-form single-qubit evolution; see NoiseChannel for the formulas.
inline DensityMatrix evolve_closed_form(const DensityMatrix& rho0,
                                        const NoiseChannel& ch,
                                        bool compensate) {
  if (rho0.num_qubits() != 1) {
    throw std::invalid_argument("evolve_closed_form: expected a single qubit");
  }
  return apply_channel(rho0, 0, ch, compensate);
}

struct IntegratorConfig {
  double step = 1e-3;  // classical 4th-order Runge-Kutta
};

namespace detail {

/// Right-hand side of the master equation at time t. The Lindblad operators
/// co-rotate with the Hamiltonian's frame:
///   sigma_x(t) =  cos(wt) sigma_x + sin(wt) sigma_y
///   sigma_y(t) = -sin(wt) sigma_x + cos(wt) sigma_y
///   sigma_z(t) =  sigma_z
inline ComplexMatrix lindblad_rhs(const ComplexMatrix& rho, double t,
                                  const NoiseChannel& ch) {
  const double wt = ch.omega * t;
  const double cwt = std::cos(wt);
  const double swt = std::sin(wt);

  const ComplexMatrix sx(2, 2, {0, 1, 1, 0});
  const ComplexMatrix sy(2, 2, {0, cplx{0, -1}, cplx{0, 1}, 0});
  const ComplexMatrix sz(2, 2, {1, 0, 0, -1});

  // unitary part: -i [ (omega/2) sigma_z, rho ]
  ComplexMatrix rhs = (sz * rho - rho * sz) * cplx{0.0, -0.5 * ch.omega};

  const ComplexMatrix sxt = cwt * sx + swt * sy;
  const ComplexMatrix syt = (-swt) * sx + cwt * sy;
  const struct {
    double gamma;
    const ComplexMatrix& op;
  } terms[] = {{ch.gamma_x, sxt}, {ch.gamma_y, syt}, {ch.gamma_z, sz}};
  for (const auto& term : terms) {
    if (term.gamma == 0.0) continue;
    // L rho L - rho, since L^2 = gamma * I for Pauli couplings
    rhs += term.gamma * (term.op * rho * term.op - rho);
  }
  return rhs;
}

}  // namespace detail

/// RK4 integration of the full master equation, unitary term included. The
/// result is re-Hermitized ((rho + rho^dag) / 2) and trace-renormalized;
/// Runge-Kutta does not structurally preserve the density-matrix manifold.
/// Serves as the numerical oracle for evolve_closed_form(compensate=false):
/// at the default step the two agree to better than 1e-6 entrywise for
/// gamma * t <= 5.
inline DensityMatrix evolve_numerical(const DensityMatrix& rho0,
                                      const NoiseChannel& ch,
                                      const IntegratorConfig& cfg = {}) {
  if (rho0.num_qubits() != 1) {
    throw std::invalid_argument("evolve_numerical: expected a single qubit");
  }
  ch.validate();
  if (!(cfg.step > 0.0)) {
    throw std::invalid_argument("evolve_numerical: step must be positive");
  }
  if (ch.duration > 0.0 && cfg.step > ch.duration) {
    throw std::invalid_argument("evolve_numerical: step exceeds duration");
  }

  ComplexMatrix rho = rho0.matrix();
  const std::size_t full_steps =
      static_cast<std::size_t>(std::floor(ch.duration / cfg.step));
  auto rk4_step = [&](double t, double h) {
    const ComplexMatrix k1 = detail::lindblad_rhs(rho, t, ch);
    const ComplexMatrix k2 =
        detail::lindblad_rhs(rho + (0.5 * h) * k1, t + 0.5 * h, ch);
    const ComplexMatrix k3 =
        detail::lindblad_rhs(rho + (0.5 * h) * k2, t + 0.5 * h, ch);
    const ComplexMatrix k4 = detail::lindblad_rhs(rho + h * k3, t + h, ch);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };

  for (std::size_t i = 0; i < full_steps; ++i) {
    rk4_step(static_cast<double>(i) * cfg.step, cfg.step);
  }
  const double done = static_cast<double>(full_steps) * cfg.step;
  const double rest = ch.duration - done;
  if (rest > 1e-15) rk4_step(done, rest);  // endpoint substep

  ComplexMatrix sym = 0.5 * (rho + dagger(rho));
  const double tr = sym.trace().real();
  sym *= 1.0 / tr;
  return DensityMatrix(1, std::move(sym), 1e-8);
}

/// Undoes the z-rotation accumulated by the Hamiltonian over time t:
/// conjugation by the phase-shift gate R_{-omega t}, which restores the
/// off-diagonals of the uncompensated evolution to a purely damped form.
inline DensityMatrix compensate_phase(const DensityMatrix& rho, double omega,
                                      double t) {
  if (rho.num_qubits() != 1) {
    throw std::invalid_argument("compensate_phase: expected a single qubit");
  }
  return apply_gate(rho, gates::phase_shift(-omega * t), {0});
}

/// T2 relaxation time for a pure phase-damping channel:
/// T2 = -(1 / gamma_z) ln((e - 2) / e), taking the qubit flip probability
/// as (1 - e^{-gamma_z t}) / 2.
inline double t2_from_gamma(double gamma_z) {
  if (!(gamma_z > 0.0) || !std::isfinite(gamma_z)) {
    throw std::domain_error("t2_from_gamma: gamma_z must be positive");
  }
  return -std::log((std::numbers::e - 2.0) / std::numbers::e) / gamma_z;
}

}  // namespace tsim
