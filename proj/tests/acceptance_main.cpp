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
//
// Acceptance suite: one criterion per function, one pass/fail line each.
// Exit code is the number of failed criteria.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "tsim/experiment.hpp"

namespace fs = std::filesystem;
using namespace tsim;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void expect(bool condition, const std::string& message) {
    if (!condition && ok) {
      ok = false;
      detail = message;
    }
  }
};

double gaussian(RandomEngine& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * uniform01(rng));
}

QubitRegister haar_random_qubit(RandomEngine& rng) {
  cplx a{gaussian(rng), gaussian(rng)};
  cplx b{gaussian(rng), gaussian(rng)};
  const double inv = 1.0 / std::sqrt(std::norm(a) + std::norm(b));
  return QubitRegister::single(a * inv, b * inv);
}

QubitRegister fig6_state() {
  const double s3 = std::numbers::sqrt3;
  return QubitRegister::single(
      std::sqrt((1.0 + s3) / (2.0 * s3)),
      cplx{s3, 1.0} / (2.0 * std::sqrt(3.0 + s3)));
}

// --------------------------------------------------------------------------
// 1. Noiseless teleportation exactness

Check criterion_noiseless_exactness() {
  Check c;
  RandomEngine rng(1001);
  const std::array<BellState, 4> resources = {
      BellState::PhiPlus, BellState::PhiMinus, BellState::PsiPlus,
      BellState::PsiMinus};
  for (int rep = 0; rep < 100 && c.ok; ++rep) {
    const QubitRegister psi = haar_random_qubit(rng);
    for (BellState resource : resources) {
      TeleportPipeline pipeline;
      pipeline.resource = resource;
      for (const TeleportOutcome& o : teleport_outcomes(psi, pipeline)) {
        c.expect(std::abs(o.probability - 0.25) <= 1e-12,
                 "outcome probability deviates from 0.25");
        c.expect(std::abs(o.result.fidelity_to_input - 1.0) <= 1e-10,
                 "fidelity below 1 - 1e-10");
      }
    }
  }
  return c;
}

// --------------------------------------------------------------------------
// 2. Intermediate-state regression

Check criterion_intermediate_states() {
  Check c;
  RandomEngine rng(1002);
  const double h = 1.0 / std::numbers::sqrt2;
  for (int rep = 0; rep < 50 && c.ok; ++rep) {
    const QubitRegister psi = haar_random_qubit(rng);
    const cplx a = psi.amplitude(0), b = psi.amplitude(1);
    const ProtocolStates st = protocol_states(psi, BellState::PhiPlus);

    // phi2 = (a|000> + a|011> + b|110> + b|101>) / sqrt(2)
    std::array<cplx, 8> phi2{};
    phi2[0b000] = a * h;
    phi2[0b011] = a * h;
    phi2[0b110] = b * h;
    phi2[0b101] = b * h;
    for (std::size_t i = 0; i < 8; ++i) {
      c.expect(std::abs(st.after_cnot.amplitude(i) - phi2[i]) <= 1e-12,
               "state after the CNOT deviates from the step-1 expression");
    }

    // phi3 = (a(|000>+|100>+|011>+|111>) + b(|010>-|110>+|001>-|101>)) / 2
    std::array<cplx, 8> phi3{};
    phi3[0b000] = a * 0.5;
    phi3[0b100] = a * 0.5;
    phi3[0b011] = a * 0.5;
    phi3[0b111] = a * 0.5;
    phi3[0b010] = b * 0.5;
    phi3[0b110] = -b * 0.5;
    phi3[0b001] = b * 0.5;
    phi3[0b101] = -b * 0.5;
    for (std::size_t i = 0; i < 8; ++i) {
      c.expect(std::abs(st.after_hadamard.amplitude(i) - phi3[i]) <= 1e-12,
               "state after the Hadamard deviates from the step-2 expression");
    }
  }
  return c;
}

// --------------------------------------------------------------------------
// 3. Closed form vs ODE oracle

Check criterion_ode_oracle() {
  Check c;
  const DensityMatrix rho0 = DensityMatrix::from_register(fig6_state());
  const double rates[] = {0.0, 0.1, 1.0};
  const double omegas[] = {0.0, 1.0, 10.0};
  const double durations[] = {0.1, 1.0, 5.0};
  double worst = 0.0;
  for (double gx : rates) {
    for (double gy : rates) {
      for (double gz : rates) {
        for (double omega : omegas) {
          for (double t : durations) {
            const NoiseChannel ch{gx, gy, gz, omega, t};
            const DensityMatrix numeric = evolve_numerical(rho0, ch, {1e-3});
            const DensityMatrix closed = evolve_closed_form(rho0, ch, false);
            worst = std::max(worst,
                             max_abs_diff(numeric.matrix(), closed.matrix()));
          }
        }
      }
    }
  }
  c.expect(worst <= 1e-6, "worst entrywise deviation " + std::to_string(worst));
  return c;
}

// --------------------------------------------------------------------------
// 4. Spatial selectivity

Check criterion_spatial_selectivity() {
  Check c;
  RandomEngine rng(1004);
  for (int rep = 0; rep < 200 && c.ok; ++rep) {
    const QubitRegister psi = haar_random_qubit(rng);
    const DensityMatrix rho = DensityMatrix::from_register(psi);
    const BlochVector r0 = density_to_bloch(rho);

    NoiseChannel zch;
    zch.gamma_z = 3.0 * uniform01(rng);
    zch.duration = 2.0 * uniform01(rng);
    const BlochVector rz = density_to_bloch(evolve_closed_form(rho, zch, true));
    c.expect(std::abs(rz.z - r0.z) <= 1e-12, "gamma_z channel moved r_z");

    NoiseChannel xch;
    xch.gamma_x = 3.0 * uniform01(rng);
    xch.duration = 2.0 * uniform01(rng);
    const BlochVector rx = density_to_bloch(evolve_closed_form(rho, xch, true));
    c.expect(std::abs(rx.x - r0.x) <= 1e-12, "gamma_x channel moved r_x");
  }

  // compensated trajectory from the fig-6 state: r_x(t) = e^{-2 t} / sqrt(2)
  const DensityMatrix start = DensityMatrix::from_register(fig6_state());
  for (int i = 0; i <= 100 && c.ok; ++i) {
    NoiseChannel ch;
    ch.gamma_z = 1.0;
    ch.omega = 2.0;  // compensation must remove this entirely
    ch.duration = 2.0 * i / 100.0;
    const BlochVector r = density_to_bloch(evolve_closed_form(start, ch, true));
    const double expected = std::exp(-2.0 * ch.duration) / std::numbers::sqrt2;
    c.expect(std::abs(r.x - expected) <= 1e-9,
             "trajectory r_x off at t = " + std::to_string(ch.duration));
  }
  return c;
}

// --------------------------------------------------------------------------
// 5. Combined-damping product identity

Check criterion_product_identity() {
  Check c;
  RandomEngine rng(1005);
  for (int rep = 0; rep < 1000 && c.ok; ++rep) {
    NoiseChannel ch;
    ch.gamma_x = 3.0 * uniform01(rng);
    ch.gamma_z = 3.0 * uniform01(rng);
    ch.duration = 2.0 * uniform01(rng);
    const Attenuations a = channel_attenuations(ch);
    c.expect(std::abs(a.y - a.x * a.z) <= 1e-12,
             "y attenuation is not the x * z product");
  }
  return c;
}

// --------------------------------------------------------------------------
// 6. Bloch/gate consistency

Check criterion_bloch_gate_consistency() {
  Check c;
  RandomEngine rng(1006);
  const GateKind kinds[] = {GateKind::Identity, GateKind::PauliX,
                            GateKind::PauliY, GateKind::PauliZ,
                            GateKind::Hadamard};
  for (int rep = 0; rep < 1000 && c.ok; ++rep) {
    // mix of pure and interior states
    BlochVector r;
    const double z = 2.0 * uniform01(rng) - 1.0;
    const double phi = 2.0 * std::numbers::pi * uniform01(rng);
    const double radius = (rep % 2 == 0) ? 1.0 : std::cbrt(uniform01(rng));
    const double s = std::sqrt(1.0 - z * z);
    r = {radius * s * std::cos(phi), radius * s * std::sin(phi), radius * z};

    const DensityMatrix rho = bloch_to_density(r);
    for (GateKind g : kinds) {
      const BlochVector via_table = bloch_gate_action(r, g);
      const BlochVector via_density =
          density_to_bloch(apply_gate(rho, gates::from_kind(g), {0}));
      c.expect(std::abs(via_table.x - via_density.x) <= 1e-12 &&
                   std::abs(via_table.y - via_density.y) <= 1e-12 &&
                   std::abs(via_table.z - via_density.z) <= 1e-12,
               "coordinate table disagrees with density conjugation");
    }
  }
  return c;
}

// --------------------------------------------------------------------------
// 7. Monte Carlo emulation envelope

Check criterion_experiment_envelope() {
  Check c;
  const double g = calibrate_gamma(0.67, 1.0);
  TeleportPipeline pipeline;
  pipeline.stage_noise[Stage::PostCorrection] = NoiseChannel{g, 0.0, g, 0.0, 1.0};
  ExperimentConfig cfg{QubitRegister::basis(1, 0), pipeline, 1000, 8192,
                       20260810};
  const auto records = run_experiment(cfg);

  double mean_exact_z = 0.0;
  for (const TrialRecord& r : records) mean_exact_z += r.exact_bloch.z;
  mean_exact_z /= static_cast<double>(records.size());
  c.expect(std::abs(mean_exact_z - 0.67) <= 1e-12,
           "mean exact z deviates from the calibrated 0.67");

  const SummaryStats stats = summarize(records);
  c.expect(stats.mean[2] > 0.605 && stats.mean[2] < 0.712,
           "estimated z mean " + std::to_string(stats.mean[2]) +
               " left the reference envelope (0.605, 0.712)");
  return c;
}

// --------------------------------------------------------------------------
// 8. Entanglement swap

Check criterion_entanglement_swap() {
  Check c;
  const QubitRegister phip = bell_state(BellState::PhiPlus);

  for (const SwapOutcome& o : swap_outcomes(phip, phip)) {
    DensityMatrix fixed = o.state_ad;
    if (o.bits[1]) fixed = apply_gate(fixed, gates::x(), {1});
    if (o.bits[0]) fixed = apply_gate(fixed, gates::z(), {1});
    c.expect(std::abs(o.probability - 0.25) <= 1e-12,
             "swap branch probability deviates from 0.25");
    c.expect(std::abs(fidelity(fixed, phip) - 1.0) <= 1e-12,
             "corrected pair is not Phi+");
  }

  // seeded histogram over 10^4 runs, 3-sigma multinomial bounds
  std::array<int, 4> counts{};
  for (int seed = 0; seed < 10000; ++seed) {
    RandomEngine rng = stream_engine(777, static_cast<std::uint64_t>(seed));
    const SwapResult r = entanglement_swap(phip, phip, rng);
    ++counts[r.bits[0] * 2 + r.bits[1]];
  }
  const double expected = 10000.0 * 0.25;
  const double sigma = std::sqrt(10000.0 * 0.25 * 0.75);
  for (int o = 0; o < 4; ++o) {
    c.expect(std::abs(counts[o] - expected) <= 3.0 * sigma,
             "outcome " + std::to_string(o) + " count " +
                 std::to_string(counts[o]) + " outside 3 sigma");
  }
  return c;
}

// --------------------------------------------------------------------------
// 9. Determinism through the command line

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& env_prefix, const std::string& args) {
  const char* env_bin = std::getenv("TELEPORTSIM_BIN");
  const std::string bin = env_bin ? env_bin : TELEPORTSIM_BIN_PATH;
  const std::string cmd =
      env_prefix + " '" + bin + "' " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Check criterion_cli_determinism() {
  Check c;
  const fs::path base =
      fs::temp_directory_path() / ("tsim_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(base);
  fs::create_directories(base);

  const fs::path cfg = base / "config.json";
  {
    std::ofstream out(cfg);
    out << R"({
      "input_state": "paper-fig6",
      "resource": "phi-plus",
      "trials": 200,
      "shots_per_basis": 256,
      "stages": {"post_correction": {"gamma_x": 0.2, "gamma_z": 0.2, "t": 1.0}}
    })";
  }

  const fs::path d1 = base / "run1";
  const fs::path d2 = base / "run2";
  const fs::path d3 = base / "run3";
  c.expect(run_cli("", "experiment --config '" + cfg.string() +
                           "' --seed 99 --out-dir '" + d1.string() + "'") == 0,
           "first experiment run failed");
  c.expect(run_cli("TELEPORTSIM_THREADS=1",
                   "experiment --config '" + cfg.string() + "' --seed 99 --out-dir '" +
                       d2.string() + "'") == 0,
           "single-threaded run failed");
  // replay from the manifest, different thread cap again
  c.expect(run_cli("TELEPORTSIM_THREADS=7",
                   "experiment --config '" + (d1 / "manifest.json").string() +
                       "' --out-dir '" + d3.string() + "'") == 0,
           "manifest replay failed");
  if (!c.ok) return c;

  for (const char* f : {"trials.csv", "cdf.csv", "summary.json", "manifest.json"}) {
    const std::string a = read_file(d1 / f);
    c.expect(!a.empty(), std::string(f) + " is missing or empty");
    c.expect(a == read_file(d2 / f),
             std::string(f) + " differs across thread caps");
    c.expect(a == read_file(d3 / f),
             std::string(f) + " differs after manifest replay");
  }
  fs::remove_all(base);
  return c;
}

// --------------------------------------------------------------------------
// 10. Structural preservation

Check criterion_structural_preservation() {
  Check c;
  RandomEngine rng(1010);
  auto valid = [&](const DensityMatrix& rho) {
    return validate_density(rho.matrix(), 1e-8);
  };

  for (int rep = 0; rep < 50 && c.ok; ++rep) {
    const QubitRegister psi = haar_random_qubit(rng);
    const NoiseChannel ch{2.0 * uniform01(rng), 2.0 * uniform01(rng),
                          2.0 * uniform01(rng), 10.0 * uniform01(rng),
                          2.0 * uniform01(rng)};

    // channel maps, closed form and integrated
    const DensityMatrix rho = DensityMatrix::from_register(psi);
    c.expect(valid(evolve_closed_form(rho, ch, true)),
             "closed-form output violates the density structure");
    c.expect(valid(evolve_closed_form(rho, ch, false)),
             "uncompensated closed-form output violates the density structure");
    c.expect(valid(evolve_numerical(rho, ch, {1e-3})),
             "integrated output violates the density structure");

    // gates and reductions along a noisy teleport
    TeleportPipeline pipeline;
    pipeline.stage_noise[Stage::EprBob] = ch;
    pipeline.stage_noise[Stage::PostCorrection] = ch;
    for (const TeleportOutcome& o : teleport_outcomes(psi, pipeline)) {
      c.expect(valid(o.result.output_state),
               "teleport output violates the density structure");
    }

    // swap outputs
    for (const SwapOutcome& o :
         swap_outcomes(bell_state(BellState::PhiPlus),
                       bell_state(BellState::PsiMinus))) {
      c.expect(valid(o.state_ad), "swap output violates the density structure");
    }
  }

  // |r(t)| never grows under any compensated damping channel
  for (int rep = 0; rep < 50 && c.ok; ++rep) {
    const QubitRegister psi = haar_random_qubit(rng);
    const DensityMatrix rho = DensityMatrix::from_register(psi);
    NoiseChannel ch{2.0 * uniform01(rng), 2.0 * uniform01(rng),
                    2.0 * uniform01(rng), 0.0, 0.0};
    double prev = density_to_bloch(rho).norm() + 1e-13;
    for (int i = 1; i <= 20; ++i) {
      ch.duration = 0.1 * i;
      const double n =
          density_to_bloch(evolve_closed_form(rho, ch, true)).norm();
      c.expect(n <= prev + 1e-13, "Bloch norm grew under damping");
      prev = n;
    }
  }
  return c;
}

struct Criterion {
  int number;
  const char* name;
  double time_limit_s;
  std::function<Check()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "noiseless teleportation exactness", 5.0, criterion_noiseless_exactness},
      {2, "intermediate-state regression", 0.0, criterion_intermediate_states},
      {3, "closed form vs ODE oracle", 30.0, criterion_ode_oracle},
      {4, "spatial selectivity", 0.0, criterion_spatial_selectivity},
      {5, "combined-damping product identity", 0.0, criterion_product_identity},
      {6, "Bloch/gate consistency", 0.0, criterion_bloch_gate_consistency},
      {7, "Monte Carlo emulation envelope", 120.0, criterion_experiment_envelope},
      {8, "entanglement swap", 0.0, criterion_entanglement_swap},
      {9, "determinism through the CLI", 0.0, criterion_cli_determinism},
      {10, "structural preservation", 0.0, criterion_structural_preservation},
  };

  int only = 0;
  if (argc > 1) only = std::atoi(argv[1]);

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    if (only != 0 && criterion.number != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (criterion.time_limit_s > 0.0 && elapsed > criterion.time_limit_s) {
      result.ok = false;
      result.detail = "exceeded the " + std::to_string(criterion.time_limit_s) +
                      " s runtime limit";
    }
    std::printf("[%s] criterion %d: %s (%.2f s)%s%s\n",
                result.ok ? "PASS" : "FAIL", criterion.number, criterion.name,
                elapsed, result.ok ? "" : " -- ",
                result.ok ? "" : result.detail.c_str());
    if (!result.ok) ++failures;
  }
  return failures;
}
