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
#include <stdexcept>
#include <vector>

#include "tsim/gates.hpp"
#include "tsim/rng.hpp"
#include "tsim/states.hpp"

namespace tsim {

struct Outcome {
  std::vector<int> bits;  // one entry per target, in target order
  double probability;
};

namespace detail {

inline void check_measure_targets(const std::vector<int>& targets,
                                  int num_qubits) {
  if (targets.empty()) {
    throw std::invalid_argument("measure: no target qubits");
  }
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= num_qubits) {
      throw std::invalid_argument("measure: target qubit out of range");
    }
    for (std::size_t j = i + 1; j < targets.size(); ++j) {
      if (targets[i] == targets[j]) {
        throw std::invalid_argument("measure: duplicate target qubit");
      }
    }
  }
}

/// Packs the target bits of a basis index, first target at the most
/// significant position. This defines the lexicographic outcome order
/// 00, 01, 10, 11 used everywhere.
inline std::size_t outcome_of_index(std::size_t index,
                                    const std::vector<int>& targets,
                                    int num_qubits) {
  std::size_t o = 0;
  for (int t : targets) {
    o = (o << 1) | static_cast<std::size_t>(qubit_bit(index, t, num_qubits));
  }
  return o;
}

inline std::vector<int> unpack_outcome(std::size_t o, std::size_t k) {
  std::vector<int> bits(k);
  for (std::size_t j = 0; j < k; ++j) {
    bits[j] = static_cast<int>((o >> (k - 1 - j)) & 1u);
  }
  return bits;
}

}  // namespace detail

/// Exact outcome probabilities, lexicographically ordered.
inline std::vector<Outcome> outcome_distribution(const QubitRegister& state,
                                                 const std::vector<int>& targets) {
  detail::check_measure_targets(targets, state.num_qubits());
  const std::size_t k = targets.size();
  std::vector<double> probs(std::size_t{1} << k, 0.0);
  for (std::size_t i = 0; i < state.dim(); ++i) {
    probs[detail::outcome_of_index(i, targets, state.num_qubits())] +=
        std::norm(state.amplitude(i));
  }
  std::vector<Outcome> out;
  out.reserve(probs.size());
  for (std::size_t o = 0; o < probs.size(); ++o) {
    out.push_back({detail::unpack_outcome(o, k), probs[o]});
  }
  return out;
}

inline std::vector<Outcome> outcome_distribution(const DensityMatrix& state,
                                                 const std::vector<int>& targets) {
  detail::check_measure_targets(targets, state.num_qubits());
  const std::size_t k = targets.size();
  std::vector<double> probs(std::size_t{1} << k, 0.0);
  for (std::size_t i = 0; i < state.dim(); ++i) {
    probs[detail::outcome_of_index(i, targets, state.num_qubits())] +=
        state.matrix()(i, i).real();
  }
  std::vector<Outcome> out;
  out.reserve(probs.size());
  for (std::size_t o = 0; o < probs.size(); ++o) {
    out.push_back({detail::unpack_outcome(o, k), probs[o]});
  }
  return out;
}

struct RegisterMeasurement {
  std::vector<int> bits;
  double probability;
  QubitRegister post_state;
};

struct DensityMeasurement {
  std::vector<int> bits;
  double probability;
  DensityMatrix post_state;
};

/// Collapse onto a specific outcome. Throws if that outcome has zero
/// probability.
inline RegisterMeasurement collapse(const QubitRegister& state,
                                    const std::vector<int>& targets,
                                    const std::vector<int>& bits) {
  detail::check_measure_targets(targets, state.num_qubits());
  if (bits.size() != targets.size()) {
    throw std::invalid_argument("collapse: bit count mismatch");
  }
  std::size_t want = 0;
  for (int b : bits) want = (want << 1) | static_cast<std::size_t>(b & 1);

  double p = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (detail::outcome_of_index(i, targets, state.num_qubits()) == want) {
      p += std::norm(state.amplitude(i));
    }
  }
  if (p <= 0.0) {
    throw std::domain_error("collapse: outcome has zero probability");
  }
  const double scale = 1.0 / std::sqrt(p);
  std::vector<cplx> amps(state.dim());
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (detail::outcome_of_index(i, targets, state.num_qubits()) == want) {
      amps[i] = state.amplitude(i) * scale;
    }
  }
  return {bits, p, QubitRegister(state.num_qubits(), std::move(amps))};
}

inline DensityMeasurement collapse(const DensityMatrix& state,
                                   const std::vector<int>& targets,
                                   const std::vector<int>& bits) {
  detail::check_measure_targets(targets, state.num_qubits());
  if (bits.size() != targets.size()) {
    throw std::invalid_argument("collapse: bit count mismatch");
  }
  std::size_t want = 0;
  for (int b : bits) want = (want << 1) | static_cast<std::size_t>(b & 1);

  const int n = state.num_qubits();
  double p = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    if (detail::outcome_of_index(i, targets, n) == want) {
      p += state.matrix()(i, i).real();
    }
  }
  if (p <= 0.0) {
    throw std::domain_error("collapse: outcome has zero probability");
  }
  ComplexMatrix m(state.dim(), state.dim());
  for (std::size_t r = 0; r < state.dim(); ++r) {
    if (detail::outcome_of_index(r, targets, n) != want) continue;
    for (std::size_t c = 0; c < state.dim(); ++c) {
      if (detail::outcome_of_index(c, targets, n) != want) continue;
      m(r, c) = state.matrix()(r, c) / p;
    }
  }
  return {bits, p, DensityMatrix(n, std::move(m))};
}

namespace detail {

/// One uniform draw, inverse-CDF walk over the lexicographically ordered
/// outcomes. Deterministic replay given a seed.
inline std::size_t sample_outcome(const std::vector<Outcome>& dist,
                                  RandomEngine& rng) {
  const double u = uniform01(rng);
  double cum = 0.0;
  for (std::size_t o = 0; o < dist.size(); ++o) {
    cum += dist[o].probability;
    if (u < cum && dist[o].probability > 0.0) return o;
  }
  // Rounding can leave cum marginally below 1; take the last outcome with
  // nonzero probability.
  for (std::size_t o = dist.size(); o-- > 0;) {
    if (dist[o].probability > 0.0) return o;
  }
  throw std::domain_error("sample_outcome: all outcomes have zero probability");
}

}  // namespace detail

/// Projective measurement with collapse; the outcome is sampled by the
/// exact computed probabilities.
inline RegisterMeasurement measure(const QubitRegister& state,
                                   const std::vector<int>& targets,
                                   RandomEngine& rng) {
  const auto dist = outcome_distribution(state, targets);
  const std::size_t o = detail::sample_outcome(dist, rng);
  auto result = collapse(state, targets, dist[o].bits);
  result.probability = dist[o].probability;
  return result;
}

inline DensityMeasurement measure(const DensityMatrix& state,
                                  const std::vector<int>& targets,
                                  RandomEngine& rng) {
  const auto dist = outcome_distribution(state, targets);
  const std::size_t o = detail::sample_outcome(dist, rng);
  auto result = collapse(state, targets, dist[o].bits);
  result.probability = dist[o].probability;
  return result;
}

}  // namespace tsim
