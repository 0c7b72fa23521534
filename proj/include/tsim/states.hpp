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
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "tsim/complex_matrix.hpp"

namespace tsim {

inline constexpr double kStructuralTol = 1e-10;

/// Qubit 0 is the leftmost symbol in ket notation and therefore the most
/// significant bit of an amplitude index: |q0 q1 ... q(n-1)>.
inline int qubit_bit(std::size_t index, int qubit, int num_qubits) {
  return static_cast<int>((index >> (num_qubits - 1 - qubit)) & 1u);
}

inline std::size_t qubit_mask(int qubit, int num_qubits) {
  return std::size_t{1} << (num_qubits - 1 - qubit);
}

/// Pure n-qubit state: a normalized vector of 2^n complex amplitudes.
class QubitRegister {
 public:
  QubitRegister(int num_qubits, std::vector<cplx> amplitudes)
      : num_qubits_(num_qubits), amps_(std::move(amplitudes)) {
    if (num_qubits_ < 1 ||
        amps_.size() != (std::size_t{1} << num_qubits_)) {
      throw std::invalid_argument("QubitRegister: amplitude count mismatch");
    }
    double norm2 = 0.0;
    for (const cplx& a : amps_) {
      if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
        throw std::invalid_argument("QubitRegister: non-finite amplitude");
      }
      norm2 += std::norm(a);
    }
    if (std::abs(norm2 - 1.0) > kStructuralTol) {
      throw std::invalid_argument("QubitRegister: state is not normalized");
    }
  }

  static QubitRegister basis(int num_qubits, std::size_t index) {
    std::vector<cplx> amps(std::size_t{1} << num_qubits);
    amps.at(index) = 1.0;
    return QubitRegister(num_qubits, std::move(amps));
  }

  static QubitRegister single(cplx alpha, cplx beta) {
    return QubitRegister(1, {alpha, beta});
  }

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return amps_.size(); }
  const std::vector<cplx>& amplitudes() const { return amps_; }
  cplx amplitude(std::size_t i) const { return amps_[i]; }

 private:
  int num_qubits_;
  std::vector<cplx> amps_;
};

inline QubitRegister tensor_product(const QubitRegister& a,
                                    const QubitRegister& b) {
  std::vector<cplx> amps(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < b.dim(); ++j) {
      amps[i * b.dim() + j] = a.amplitude(i) * b.amplitude(j);
    }
  }
  return QubitRegister(a.num_qubits() + b.num_qubits(), std::move(amps));
}

/// General (pure or mixed) n-qubit state: trace-one Hermitian PSD matrix.
/// Construction validates the structure; pass a looser tolerance for states
/// coming out of a numerical integrator.
class DensityMatrix {
 public:
  DensityMatrix(int num_qubits, ComplexMatrix matrix,
                double tol = kStructuralTol)
      : num_qubits_(num_qubits), m_(std::move(matrix)) {
    const std::size_t d = std::size_t{1} << num_qubits_;
    if (num_qubits_ < 1 || m_.rows() != d || m_.cols() != d) {
      throw std::invalid_argument("DensityMatrix: dimension mismatch");
    }
    if (!validate_density(m_, tol)) {
      throw std::invalid_argument(
          "DensityMatrix: not a valid density matrix (Hermitian/trace/PSD)");
    }
  }

  static DensityMatrix from_register(const QubitRegister& psi) {
    ComplexMatrix m(psi.dim(), psi.dim());
    for (std::size_t r = 0; r < psi.dim(); ++r) {
      for (std::size_t c = 0; c < psi.dim(); ++c) {
        m(r, c) = psi.amplitude(r) * std::conj(psi.amplitude(c));
      }
    }
    return DensityMatrix(psi.num_qubits(), std::move(m));
  }

  int num_qubits() const { return num_qubits_; }
  std::size_t dim() const { return m_.rows(); }
  const ComplexMatrix& matrix() const { return m_; }

 private:
  int num_qubits_;
  ComplexMatrix m_;
};

inline DensityMatrix tensor_product(const DensityMatrix& a,
                                    const DensityMatrix& b) {
  return DensityMatrix(a.num_qubits() + b.num_qubits(),
                       tensor_product(a.matrix(), b.matrix()));
}

/// Reduced density matrix over the kept qubits; everything else is traced
/// out. `keep` must be non-empty, strictly increasing and in range, and the
/// kept qubits preserve their relative order.
inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   const std::vector<int>& keep) {
  const int n = rho.num_qubits();
  if (keep.empty()) {
    throw std::invalid_argument("partial_trace: keep set is empty");
  }
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= n) {
      throw std::invalid_argument("partial_trace: qubit index out of range");
    }
    if (i > 0 && keep[i] <= keep[i - 1]) {
      throw std::invalid_argument("partial_trace: keep must be increasing");
    }
  }

  std::vector<int> traced;
  for (int q = 0; q < n; ++q) {
    if (!std::binary_search(keep.begin(), keep.end(), q)) traced.push_back(q);
  }

  const int nk = static_cast<int>(keep.size());
  const int nt = static_cast<int>(traced.size());
  const std::size_t dk = std::size_t{1} << nk;
  const std::size_t dt = std::size_t{1} << nt;

  // Scatter the bits of a reduced index and an environment index back into
  // a full 2^n index. Bit j of `sub` (MSB-first) goes to qubit slot qs[j].
  auto scatter = [n](std::size_t sub, const std::vector<int>& qs) {
    std::size_t full = 0;
    for (std::size_t j = 0; j < qs.size(); ++j) {
      const int bit = static_cast<int>(
          (sub >> (qs.size() - 1 - j)) & 1u);
      if (bit) full |= qubit_mask(qs[j], n);
    }
    return full;
  };

  ComplexMatrix out(dk, dk);
  for (std::size_t r = 0; r < dk; ++r) {
    const std::size_t rbase = scatter(r, keep);
    for (std::size_t c = 0; c < dk; ++c) {
      const std::size_t cbase = scatter(c, keep);
      cplx sum = 0.0;
      for (std::size_t e = 0; e < dt; ++e) {
        const std::size_t env = scatter(e, traced);
        sum += rho.matrix()(rbase | env, cbase | env);
      }
      out(r, c) = sum;
    }
  }
  return DensityMatrix(nk, std::move(out));
}

}  // namespace tsim
