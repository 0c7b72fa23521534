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
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "tsim/bloch.hpp"
#include "tsim/decoherence.hpp"
#include "tsim/rng.hpp"
#include "tsim/teleport.hpp"

namespace tsim {

struct ExperimentConfig {
  QubitRegister input_state;
  TeleportPipeline pipeline;
  int trials = 1;
  int shots_per_basis = 1;
  std::uint64_t master_seed = 0;
  // Optional per-trial decay-rate spread: each configured stage channel has
  // its rates perturbed by N(0, gamma_jitter) and clipped at zero. Off by
  // default; the modeled trial-to-trial variability then comes from shot
  // noise alone.
  double gamma_jitter = 0.0;

  void validate() const {
    if (input_state.num_qubits() != 1) {
      throw std::invalid_argument("ExperimentConfig: input must be one qubit");
    }
    if (trials < 1 || shots_per_basis < 1) {
      throw std::invalid_argument(
          "ExperimentConfig: trials and shots_per_basis must be >= 1");
    }
    if (!(gamma_jitter >= 0.0) || !std::isfinite(gamma_jitter)) {
      throw std::invalid_argument("ExperimentConfig: gamma_jitter must be >= 0");
    }
  }
};

/// One Monte Carlo teleportation outcome. estimated_bloch components each
/// lie in [-1, 1] but the vector may leave the unit ball under shot noise.
struct TrialRecord {
  int trial_index;
  std::array<int, 2> classical_bits;
  BlochVector estimated_bloch;
  BlochVector exact_bloch;
  double fidelity;
  double classical_latency = 0.0;
};

struct SummaryStats {
  std::array<double, 3> mean;    // x, y, z of the estimated coordinates
  std::array<double, 3> stddev;  // sample standard deviation (n-1)
  double corr_xy;
  double corr_xz;
  double corr_yz;
  // Sorted estimated coordinate samples; the empirical CDF at sample k of n
  // is (k + 1) / n. No binning.
  std::array<std::vector<double>, 3> cdf_samples;
};

/// Tomography-style Bloch estimate: each coordinate is the mean of +-1
/// outcomes of shots projective measurements in the matching Pauli basis.
/// Basis changes: H for x, PhaseShift(-pi/2) then H for y, none for z;
/// after the rotation, outcome 0 is the +1 eigenvalue. Each shot is a fresh
/// collapse of an identical copy.
inline BlochVector estimate_bloch_by_shots(const DensityMatrix& rho,
                                           int shots, RandomEngine& rng) {
  if (rho.num_qubits() != 1) {
    throw std::invalid_argument("estimate_bloch_by_shots: expected one qubit");
  }
  if (shots < 1) {
    throw std::invalid_argument("estimate_bloch_by_shots: shots must be >= 1");
  }

  auto estimate_axis = [&](const DensityMatrix& rotated) {
    const double p0 = rotated.matrix()(0, 0).real();
    int plus = 0;
    for (int s = 0; s < shots; ++s) {
      if (uniform01(rng) < p0) ++plus;
    }
    return static_cast<double>(2 * plus - shots) / shots;
  };

  const Gate h = gates::hadamard();
  const DensityMatrix for_x = apply_gate(rho, h, {0});
  const DensityMatrix for_y =
      apply_gate(apply_gate(rho, gates::phase_shift(-std::numbers::pi / 2), {0}),
                 h, {0});

  BlochVector r;
  r.x = estimate_axis(for_x);
  r.y = estimate_axis(for_y);
  r.z = estimate_axis(rho);
  return r;
}

namespace detail {

inline TrialRecord run_trial(const ExperimentConfig& cfg, int index) {
  RandomEngine rng = stream_engine(cfg.master_seed, static_cast<std::uint64_t>(index));
  TeleportPipeline pipeline = cfg.pipeline;
  if (cfg.gamma_jitter > 0.0) {
    // jitter draws precede the protocol so the stream layout is stable
    for (auto& [stage, ch] : pipeline.stage_noise) {
      for (double* rate : {&ch.gamma_x, &ch.gamma_y, &ch.gamma_z}) {
        *rate = std::max(0.0, *rate + cfg.gamma_jitter * normal01(rng));
      }
    }
  }
  TeleportResult tr = teleport(cfg.input_state, pipeline, rng);
  TrialRecord rec;
  rec.trial_index = index;
  rec.classical_bits = tr.classical_bits;
  rec.exact_bloch = density_to_bloch(tr.output_state);
  rec.estimated_bloch =
      estimate_bloch_by_shots(tr.output_state, cfg.shots_per_basis, rng);
  rec.fidelity = tr.fidelity_to_input;
  rec.classical_latency = cfg.pipeline.classical_latency;
  return rec;
}

}  // namespace detail

/// Runs the Monte Carlo campaign. Each trial draws from its own generator
/// stream derived from (master_seed, trial_index), so the records are
/// bit-identical for a fixed seed regardless of how many worker threads
/// execute them; the list is assembled in trial order.
inline std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg,
                                               unsigned num_threads = 0) {
  cfg.validate();
  const int n = cfg.trials;
  std::vector<TrialRecord> records(n);

  unsigned workers = num_threads;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n));

  if (workers <= 1) {
    for (int i = 0; i < n; ++i) records[i] = detail::run_trial(cfg, i);
    return records;
  }

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = static_cast<int>(w); i < n; i += static_cast<int>(workers)) {
        records[i] = detail::run_trial(cfg, i);
      }
    });
  }
  for (std::thread& t : pool) t.join();
  return records;
}

/// Sample statistics of the estimated coordinates: means, (n-1) standard
/// deviations, Pearson correlations of the coordinate pairs, and sorted
/// per-coordinate samples for the empirical CDFs.
inline SummaryStats summarize(const std::vector<TrialRecord>& records) {
  if (records.empty()) {
    throw std::invalid_argument("summarize: no records");
  }
  const double n = static_cast<double>(records.size());

  std::array<std::vector<double>, 3> coords;
  for (auto& c : coords) c.reserve(records.size());
  for (const TrialRecord& r : records) {
    coords[0].push_back(r.estimated_bloch.x);
    coords[1].push_back(r.estimated_bloch.y);
    coords[2].push_back(r.estimated_bloch.z);
  }

  SummaryStats s;
  for (int k = 0; k < 3; ++k) {
    double sum = 0.0;
    for (double v : coords[k]) sum += v;
    s.mean[k] = sum / n;
  }
  for (int k = 0; k < 3; ++k) {
    double ss = 0.0;
    for (double v : coords[k]) ss += (v - s.mean[k]) * (v - s.mean[k]);
    s.stddev[k] = records.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  }

  auto pearson = [&](int a, int b) {
    double cov = 0.0;
    for (std::size_t i = 0; i < records.size(); ++i) {
      cov += (coords[a][i] - s.mean[a]) * (coords[b][i] - s.mean[b]);
    }
    const double denom = s.stddev[a] * s.stddev[b] * (n - 1.0);
    return denom > 0.0 ? cov / denom : 0.0;
  };
  s.corr_xy = pearson(0, 1);
  s.corr_xz = pearson(0, 2);
  s.corr_yz = pearson(1, 2);

  for (int k = 0; k < 3; ++k) {
    s.cdf_samples[k] = coords[k];
    std::sort(s.cdf_samples[k].begin(), s.cdf_samples[k].end());
  }
  return s;
}

struct HistogramBin {
  int ix;
  int iy;
  int iz;
  int count;
};

/// Joint PDF of the estimated coordinates as a sparse 3-D histogram. Bin i
/// covers [i * width, (i + 1) * width); bins are listed in index order.
struct JointHistogram {
  double bin_width;
  std::vector<HistogramBin> bins;
};

inline JointHistogram joint_histogram(const std::vector<TrialRecord>& records,
                                      double bin_width = 0.01) {
  if (records.empty()) {
    throw std::invalid_argument("joint_histogram: no records");
  }
  if (!(bin_width > 0.0)) {
    throw std::invalid_argument("joint_histogram: bin width must be positive");
  }
  std::map<std::array<int, 3>, int> counts;
  for (const TrialRecord& r : records) {
    const std::array<int, 3> key = {
        static_cast<int>(std::floor(r.estimated_bloch.x / bin_width)),
        static_cast<int>(std::floor(r.estimated_bloch.y / bin_width)),
        static_cast<int>(std::floor(r.estimated_bloch.z / bin_width))};
    ++counts[key];
  }
  JointHistogram h{bin_width, {}};
  h.bins.reserve(counts.size());
  for (const auto& [key, count] : counts) {
    h.bins.push_back({key[0], key[1], key[2], count});
  }
  return h;
}

/// The unique rate with e^{-2 gamma t} equal to the observed attenuation.
inline double calibrate_gamma(double attenuation, double t) {
  if (!(attenuation > 0.0) || attenuation > 1.0 || !std::isfinite(attenuation)) {
    throw std::domain_error("calibrate_gamma: attenuation must be in (0, 1]");
  }
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::domain_error("calibrate_gamma: t must be positive");
  }
  return -std::log(attenuation) / (2.0 * t);
}

struct RateCalibration {
  double gamma_x;
  double gamma_y;
  double gamma_z;
  // Model attenuation minus target, per axis.
  std::array<double, 3> residuals;
};

/// Solves for the three decay rates given target attenuations per Bloch
/// axis at time t. With u_k = -ln(a_k)/(2t) the model reads
///   u_x = gamma_y + gamma_z,  u_y = gamma_x + gamma_z,  u_z = gamma_x + gamma_y,
/// which is solved exactly when the unconstrained solution is non-negative
/// and by least squares over the non-negative orthant otherwise (small
/// enough to solve by enumerating active sets).
inline RateCalibration calibrate_gamma_axes(double att_x, double att_y,
                                            double att_z, double t) {
  for (double a : {att_x, att_y, att_z}) {
    if (!(a > 0.0) || a > 1.0 || !std::isfinite(a)) {
      throw std::domain_error("calibrate_gamma_axes: attenuation must be in (0, 1]");
    }
  }
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw std::domain_error("calibrate_gamma_axes: t must be positive");
  }

  const std::array<double, 3> u = {-std::log(att_x) / (2.0 * t),
                                   -std::log(att_y) / (2.0 * t),
                                   -std::log(att_z) / (2.0 * t)};
  // Row k of the model matrix picks the two rates feeding axis k.
  const int model[3][2] = {{1, 2}, {0, 2}, {0, 1}};

  auto residual2 = [&](const std::array<double, 3>& g) {
    double rr = 0.0;
    for (int k = 0; k < 3; ++k) {
      const double d = u[k] - g[model[k][0]] - g[model[k][1]];
      rr += d * d;
    }
    return rr;
  };

  std::array<double, 3> best{};
  double best_rr = residual2(best);
  for (int mask = 1; mask < 8; ++mask) {
    // Least squares with the rates outside `mask` pinned to zero: solve the
    // normal equations of the 3x3 system restricted to the free rates.
    std::vector<int> free;
    for (int j = 0; j < 3; ++j) {
      if (mask & (1 << j)) free.push_back(j);
    }
    const std::size_t m = free.size();
    double ata[3][3] = {};
    double atb[3] = {};
    for (int k = 0; k < 3; ++k) {
      double row[3] = {};
      row[model[k][0]] = 1.0;
      row[model[k][1]] = 1.0;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          ata[i][j] += row[free[i]] * row[free[j]];
        }
        atb[i] += row[free[i]] * u[k];
      }
    }
    // Gaussian elimination on the m x m system.
    for (std::size_t col = 0; col < m; ++col) {
      std::size_t piv = col;
      for (std::size_t r = col + 1; r < m; ++r) {
        if (std::abs(ata[r][col]) > std::abs(ata[piv][col])) piv = r;
      }
      if (std::abs(ata[piv][col]) < 1e-14) goto next_mask;
      std::swap(ata[piv], ata[col]);
      std::swap(atb[piv], atb[col]);
      for (std::size_t r = 0; r < m; ++r) {
        if (r == col) continue;
        const double f = ata[r][col] / ata[col][col];
        for (std::size_t c = 0; c < m; ++c) ata[r][c] -= f * ata[col][c];
        atb[r] -= f * atb[col];
      }
    }
    {
      std::array<double, 3> g{};
      bool feasible = true;
      for (std::size_t i = 0; i < m; ++i) {
        g[free[i]] = atb[i] / ata[i][i];
        if (g[free[i]] < 0.0) feasible = false;
      }
      if (feasible) {
        const double rr = residual2(g);
        if (rr < best_rr - 1e-18) {
          best_rr = rr;
          best = g;
        }
      }
    }
  next_mask:;
  }

  RateCalibration cal{best[0], best[1], best[2], {}};
  const NoiseChannel ch{best[0], best[1], best[2], 0.0, t};
  const Attenuations a = channel_attenuations(ch);
  cal.residuals = {a.x - att_x, a.y - att_y, a.z - att_z};
  return cal;
}

}  // namespace tsim
