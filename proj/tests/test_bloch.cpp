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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "test_helpers.hpp"
#include "tsim/bloch.hpp"
#include "tsim/decoherence.hpp"

using namespace tsim;
using test_helpers::random_bloch;
using test_helpers::random_pure;

namespace {

/// The Fig.-6-style reference state with Bloch vector
/// [1/sqrt(2), 1/sqrt(6), 1/sqrt(3)].
QubitRegister reference_state() {
  const double s3 = std::numbers::sqrt3;
  const double alpha = std::sqrt((1.0 + s3) / (2.0 * s3));
  const cplx beta = cplx{s3, 1.0} / (2.0 * std::sqrt(3.0 + s3));
  return QubitRegister::single(alpha, beta);
}

}  // namespace

TEST_CASE("poles and center of the Bloch ball", "[bloch]") {
  const BlochVector north =
      density_to_bloch(DensityMatrix::from_register(QubitRegister::basis(1, 0)));
  CHECK(north.x == Catch::Approx(0.0).margin(1e-14));
  CHECK(north.y == Catch::Approx(0.0).margin(1e-14));
  CHECK(north.z == Catch::Approx(1.0).margin(1e-14));

  const BlochVector center =
      density_to_bloch(DensityMatrix(1, ComplexMatrix(2, 2, {0.5, 0, 0, 0.5})));
  CHECK(center.norm() < 1e-14);
}

TEST_CASE("reference state maps to its known coordinates", "[bloch]") {
  const BlochVector r =
      density_to_bloch(DensityMatrix::from_register(reference_state()));
  CHECK(r.x == Catch::Approx(1.0 / std::numbers::sqrt2).margin(1e-12));
  CHECK(r.y == Catch::Approx(1.0 / std::sqrt(6.0)).margin(1e-12));
  CHECK(r.z == Catch::Approx(1.0 / std::numbers::sqrt3).margin(1e-12));
}

TEST_CASE("bloch_to_density on cardinal points", "[bloch]") {
  const DensityMatrix south = bloch_to_density({0, 0, -1});
  CHECK(std::abs(south.matrix()(1, 1) - cplx{1, 0}) < 1e-14);

  const DensityMatrix plus = bloch_to_density({1, 0, 0});
  CHECK(plus.matrix()(0, 1).real() == Catch::Approx(0.5).margin(1e-14));
  CHECK(plus.matrix()(0, 0).real() == Catch::Approx(0.5).margin(1e-14));

  // Direct evaluation: rho = (I + 0.66 sigma_z) / 2 = diag(0.83, 0.17)
  const DensityMatrix mixed = bloch_to_density({0, 0, 0.66});
  CHECK(mixed.matrix()(0, 0).real() == Catch::Approx(0.83).margin(1e-14));
  CHECK(mixed.matrix()(1, 1).real() == Catch::Approx(0.17).margin(1e-14));
}

TEST_CASE("bloch_to_density rejects vectors beyond the unit ball", "[bloch]") {
  CHECK_THROWS_AS(bloch_to_density({1.1, 0, 0}), std::domain_error);
  CHECK_NOTHROW(bloch_to_density({1.0, 0, 0}));
}

TEST_CASE("density_to_bloch rejects multi-qubit input", "[bloch]") {
  RandomEngine rng(51);
  CHECK_THROWS_AS(
      density_to_bloch(DensityMatrix::from_register(random_pure(2, rng))),
      std::invalid_argument);
}

TEST_CASE("round trip through the Bloch ball", "[bloch]") {
  RandomEngine rng(52);
  for (int rep = 0; rep < 200; ++rep) {
    const BlochVector r = random_bloch(rng);
    const BlochVector back = density_to_bloch(bloch_to_density(r));
    CHECK(std::abs(back.x - r.x) < 1e-12);
    CHECK(std::abs(back.y - r.y) < 1e-12);
    CHECK(std::abs(back.z - r.z) < 1e-12);
  }
}

TEST_CASE("fidelity basics", "[bloch]") {
  RandomEngine rng(53);
  const QubitRegister psi = random_pure(1, rng);
  CHECK(fidelity(DensityMatrix::from_register(psi), psi) ==
        Catch::Approx(1.0).margin(1e-12));

  const DensityMatrix mixed = DensityMatrix(1, ComplexMatrix(2, 2, {0.5, 0, 0, 0.5}));
  CHECK(fidelity(mixed, psi) == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("fidelity of the phase-damped plus state", "[bloch]") {
  // F = (1 + e^{-2 gamma_z t}) / 2 = 0.75 at 2 gamma_z t = ln 2
  const double s = 1.0 / std::numbers::sqrt2;
  const QubitRegister plus = QubitRegister::single(s, s);
  NoiseChannel ch;
  ch.gamma_z = 0.5 * std::numbers::ln2;
  ch.duration = 1.0;
  const DensityMatrix damped =
      evolve_closed_form(DensityMatrix::from_register(plus), ch, true);
  CHECK(fidelity(damped, plus) == Catch::Approx(0.75).margin(1e-12));
}

TEST_CASE("fidelity rejects mismatched dimensions", "[bloch]") {
  RandomEngine rng(54);
  CHECK_THROWS_AS(
      fidelity(DensityMatrix::from_register(random_pure(2, rng)),
               random_pure(1, rng)),
      std::invalid_argument);
}

TEST_CASE("purity of pure, mixed and shrunken states", "[bloch]") {
  CHECK(purity(DensityMatrix::from_register(QubitRegister::basis(1, 0))) ==
        Catch::Approx(1.0).margin(1e-12));
  CHECK(purity(DensityMatrix(1, ComplexMatrix(2, 2, {0.5, 0, 0, 0.5}))) ==
        Catch::Approx(0.5).margin(1e-12));
  // single-qubit identity: purity = (1 + |r|^2) / 2
  CHECK(purity(bloch_to_density({0, 0, 0.66})) ==
        Catch::Approx((1.0 + 0.66 * 0.66) / 2.0).margin(1e-12));
}

TEST_CASE("bloch gate action table", "[bloch]") {
  const BlochVector r{0.3, -0.4, 0.5};
  const BlochVector x = bloch_gate_action(r, GateKind::PauliX);
  CHECK(x.x == r.x);
  CHECK(x.y == -r.y);
  CHECK(x.z == -r.z);

  const BlochVector h = bloch_gate_action({0.1, 0.2, 0.3}, GateKind::Hadamard);
  CHECK(h.x == 0.3);
  CHECK(h.y == -0.2);
  CHECK(h.z == 0.1);

  const BlochVector i = bloch_gate_action(r, GateKind::Identity);
  CHECK(i.x == r.x);
  CHECK(i.y == r.y);
  CHECK(i.z == r.z);

  CHECK_THROWS_AS(bloch_gate_action(r, GateKind::Cnot), std::invalid_argument);
  CHECK_THROWS_AS(bloch_gate_action(r, GateKind::PhaseShift),
                  std::invalid_argument);
}

TEST_CASE("each Pauli leaves its own axis unchanged", "[bloch]") {
  RandomEngine rng(55);
  for (int rep = 0; rep < 50; ++rep) {
    const BlochVector r = random_bloch(rng);
    CHECK(bloch_gate_action(r, GateKind::PauliX).x == r.x);
    CHECK(bloch_gate_action(r, GateKind::PauliY).y == r.y);
    CHECK(bloch_gate_action(r, GateKind::PauliZ).z == r.z);
  }
}

TEST_CASE("bloch action agrees with density conjugation", "[bloch]") {
  RandomEngine rng(56);
  for (int rep = 0; rep < 100; ++rep) {
    const BlochVector r = random_bloch(rng);
    const DensityMatrix rho = bloch_to_density(r);
    for (GateKind g : {GateKind::Identity, GateKind::PauliX, GateKind::PauliY,
                       GateKind::PauliZ, GateKind::Hadamard}) {
      const BlochVector via_table = bloch_gate_action(r, g);
      const BlochVector via_density =
          density_to_bloch(apply_gate(rho, gates::from_kind(g), {0}));
      CHECK(std::abs(via_table.x - via_density.x) < 1e-12);
      CHECK(std::abs(via_table.y - via_density.y) < 1e-12);
      CHECK(std::abs(via_table.z - via_density.z) < 1e-12);
    }
  }
}

TEST_CASE("fidelity equals the Bloch dot-product form", "[bloch]") {
  RandomEngine rng(57);
  for (int rep = 0; rep < 100; ++rep) {
    const QubitRegister psi = random_pure(1, rng);
    const BlochVector rpsi = density_to_bloch(DensityMatrix::from_register(psi));
    const BlochVector r = random_bloch(rng);
    const DensityMatrix rho = bloch_to_density(r);
    const double dot = r.x * rpsi.x + r.y * rpsi.y + r.z * rpsi.z;
    CHECK(fidelity(rho, psi) == Catch::Approx(0.5 * (1.0 + dot)).margin(1e-12));
  }
}

TEST_CASE("pure states have unit Bloch norm, mixtures shorter", "[bloch]") {
  RandomEngine rng(58);
  for (int rep = 0; rep < 50; ++rep) {
    const QubitRegister psi = random_pure(1, rng);
    CHECK(density_to_bloch(DensityMatrix::from_register(psi)).norm() ==
          Catch::Approx(1.0).margin(1e-10));
  }
  const BlochVector r = density_to_bloch(test_helpers::random_density_1q(rng));
  CHECK(r.norm() <= 1.0 + 1e-10);
}
