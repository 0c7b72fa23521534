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
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace tsim {

using cplx = std::complex<double>;

/// Dense row-major complex matrix. Everything in this library lives on
/// registers of at most four qubits, so matrices never exceed 16x16.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols) {}

  ComplexMatrix(std::size_t rows, std::size_t cols,
                std::initializer_list<cplx> entries)
      : rows_(rows), cols_(cols), data_(entries) {
    if (data_.size() != rows * cols) {
      throw std::invalid_argument("ComplexMatrix: entry count mismatch");
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  const std::vector<cplx>& data() const { return data_; }

  bool is_finite() const {
    for (const cplx& z : data_) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
  }

  cplx trace() const {
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows_ && i < cols_; ++i) t += (*this)(i, i);
    return t;
  }

  ComplexMatrix& operator+=(const ComplexMatrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  ComplexMatrix& operator-=(const ComplexMatrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }

  ComplexMatrix& operator*=(cplx s) {
    for (cplx& z : data_) z *= s;
    return *this;
  }

  friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) {
    a += b;
    return a;
  }
  friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) {
    a -= b;
    return a;
  }
  friend ComplexMatrix operator*(ComplexMatrix a, cplx s) {
    a *= s;
    return a;
  }
  friend ComplexMatrix operator*(cplx s, ComplexMatrix a) {
    a *= s;
    return a;
  }

  friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols_ != b.rows_) {
      throw std::invalid_argument("ComplexMatrix: product shape mismatch");
    }
    ComplexMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const cplx aik = a(i, k);
        if (aik == cplx{}) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) {
          out(i, j) += aik * b(k, j);
        }
      }
    }
    return out;
  }

 private:
  void check_same_shape(const ComplexMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw std::invalid_argument("ComplexMatrix: shape mismatch");
    }
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cplx> data_;
};

/// Kronecker product. Dimensions multiply; the left operand supplies the
/// most significant index block, matching the leftmost-qubit-first ket
/// ordering used throughout.
inline ComplexMatrix tensor_product(const ComplexMatrix& a,
                                    const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t ar = 0; ar < a.rows(); ++ar) {
    for (std::size_t ac = 0; ac < a.cols(); ++ac) {
      const cplx w = a(ar, ac);
      if (w == cplx{}) continue;
      for (std::size_t br = 0; br < b.rows(); ++br) {
        for (std::size_t bc = 0; bc < b.cols(); ++bc) {
          out(ar * b.rows() + br, ac * b.cols() + bc) = w * b(br, bc);
        }
      }
    }
  }
  return out;
}

/// Conjugate transpose.
inline ComplexMatrix dagger(const ComplexMatrix& m) {
  ComplexMatrix out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      out(c, r) = std::conj(m(r, c));
    }
  }
  return out;
}

inline double max_abs(const ComplexMatrix& m) {
  double v = 0.0;
  for (const cplx& z : m.data()) v = std::max(v, std::abs(z));
  return v;
}

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("max_abs_diff: shape mismatch");
  }
  double v = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    v = std::max(v, std::abs(a.data()[i] - b.data()[i]));
  }
  return v;
}

inline bool is_hermitian(const ComplexMatrix& m, double tol) {
  if (!m.square()) return false;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = r; c < m.cols(); ++c) {
      if (std::abs(m(r, c) - std::conj(m(c, r))) > tol) return false;
    }
  }
  return true;
}

/// True iff max |(U^dag U - I)| entry <= tol.
inline bool is_unitary(const ComplexMatrix& m, double tol) {
  if (!m.square()) {
    throw std::invalid_argument("is_unitary: matrix must be square");
  }
  return max_abs_diff(dagger(m) * m, ComplexMatrix::identity(m.rows())) <= tol;
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input is symmetrized first so callers may pass matrices carrying
/// integrator-level asymmetry. Returns the (real) diagonal after
/// convergence, unsorted.
inline std::vector<double> hermitian_eigenvalues(ComplexMatrix a) {
  if (!a.square()) {
    throw std::invalid_argument("hermitian_eigenvalues: matrix must be square");
  }
  const std::size_t n = a.rows();
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      a(r, c) = 0.5 * (a(r, c) + std::conj(a(c, r)));
    }
  }

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    }
    if (std::sqrt(off) < 1e-15 * std::max(1.0, max_abs(a))) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cplx apq = a(p, q);
        const double aabs = std::abs(apq);
        if (aabs < 1e-300) continue;
        const cplx w = apq / aabs;  // phase of the pivot
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (app - aqq) / (2.0 * aabs);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // A <- A J with J = [[c, -s w], [s conj(w), c]] on columns (p, q)
        for (std::size_t k = 0; k < n; ++k) {
          const cplx akp = a(k, p);
          const cplx akq = a(k, q);
          a(k, p) = c * akp + s * std::conj(w) * akq;
          a(k, q) = -s * w * akp + c * akq;
        }
        // A <- J^dag A on rows (p, q)
        for (std::size_t k = 0; k < n; ++k) {
          const cplx apk = a(p, k);
          const cplx aqk = a(q, k);
          a(p, k) = c * apk + s * w * aqk;
          a(q, k) = -s * std::conj(w) * apk + c * aqk;
        }
      }
    }
  }

  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i).real();
  return eig;
}

/// True iff rho is Hermitian, has unit trace and is positive semidefinite,
/// all within tol. Eigenvalues are allowed to dip to -tol so that states
/// carrying numerical-integration drift do not hard-fail.
inline bool validate_density(const ComplexMatrix& rho, double tol) {
  if (!rho.square() || !rho.is_finite()) return false;
  if (!is_hermitian(rho, tol)) return false;
  if (std::abs(rho.trace() - cplx{1.0, 0.0}) > tol) return false;
  for (double e : hermitian_eigenvalues(rho)) {
    if (e < -tol) return false;
  }
  return true;
}

}  // namespace tsim
