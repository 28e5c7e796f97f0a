#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "psc/errors.hpp"

namespace psc {

using cdouble = std::complex<double>;

// Tolerance used by matrix predicates unless the caller overrides it.
inline constexpr double kDefaultTol = 1e-9;
// Tolerance for self-consistency identities (round trips, exact algebra).
inline constexpr double kSelfCheckTol = 1e-12;

/// Dense row-major complex matrix for Hilbert-space dimensions up to 81.
///
/// Values are immutable by convention: operations return new matrices
/// instead of mutating their inputs, so instances can be shared freely
/// across threads.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols, cdouble{0.0, 0.0}) {}

  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cdouble> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (entries_.size() != rows_ * cols_)
      throw ShapeError("ComplexMatrix: entry count " + std::to_string(entries_.size()) +
                       " does not match " + std::to_string(rows_) + "x" + std::to_string(cols_));
    for (const auto& z : entries_)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw ValidationError("ComplexMatrix: non-finite entry");
  }

  static ComplexMatrix identity(std::size_t dim) {
    ComplexMatrix m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }
  bool empty() const { return entries_.empty(); }

  cdouble& operator()(std::size_t r, std::size_t c) { return entries_[r * cols_ + c]; }
  const cdouble& operator()(std::size_t r, std::size_t c) const { return entries_[r * cols_ + c]; }

  const std::vector<cdouble>& entries() const { return entries_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<cdouble> entries_;
};

inline bool same_shape(const ComplexMatrix& a, const ComplexMatrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols();
}

inline ComplexMatrix operator+(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!same_shape(a, b)) throw ShapeError("matrix add: shape mismatch");
  ComplexMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

inline ComplexMatrix operator-(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!same_shape(a, b)) throw ShapeError("matrix subtract: shape mismatch");
  ComplexMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

inline ComplexMatrix operator*(const cdouble& s, const ComplexMatrix& a) {
  ComplexMatrix out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = s * a(i, j);
  return out;
}

inline ComplexMatrix operator*(double s, const ComplexMatrix& a) { return cdouble(s, 0.0) * a; }

/// Standard matrix product; throws ShapeError when inner dimensions differ.
inline ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " times " + std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const cdouble aik = a(i, k);
      if (aik == cdouble{0.0, 0.0}) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

inline ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  return matmul(a, b);
}

/// Kronecker product with row-major block layout.
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) {
      const cdouble aij = a(i, j);
      if (aij == cdouble{0.0, 0.0}) continue;
      for (std::size_t k = 0; k < b.rows(); ++k)
        for (std::size_t l = 0; l < b.cols(); ++l)
          out(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
    }
  return out;
}

/// Conjugate transpose.
inline ComplexMatrix dagger(const ComplexMatrix& a) {
  ComplexMatrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = std::conj(a(i, j));
  return out;
}

inline cdouble trace(const ComplexMatrix& a) {
  if (!a.is_square()) throw ShapeError("trace: matrix not square");
  cdouble t{0.0, 0.0};
  for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
  return t;
}

/// Hilbert-Schmidt inner product Tr[a^dag b], computed without forming a^dag.
inline cdouble hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!same_shape(a, b)) throw ShapeError("hs_inner: shape mismatch");
  cdouble t{0.0, 0.0};
  const auto& ae = a.entries();
  const auto& be = b.entries();
  for (std::size_t i = 0; i < ae.size(); ++i) t += std::conj(ae[i]) * be[i];
  return t;
}

inline double frob_norm(const ComplexMatrix& a) {
  double s = 0.0;
  for (const auto& z : a.entries()) s += std::norm(z);
  return std::sqrt(s);
}

inline double frob_dist(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (!same_shape(a, b)) throw ShapeError("frob_dist: shape mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i)
    s += std::norm(a.entries()[i] - b.entries()[i]);
  return std::sqrt(s);
}

inline bool approx_equal(const ComplexMatrix& a, const ComplexMatrix& b,
                         double tol = kDefaultTol) {
  return same_shape(a, b) && frob_dist(a, b) <= tol;
}

inline bool is_hermitian(const ComplexMatrix& a, double tol = kDefaultTol) {
  if (!a.is_square()) throw ShapeError("is_hermitian: matrix not square");
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = i; j < a.cols(); ++j)
      if (std::abs(a(i, j) - std::conj(a(j, i))) > tol) return false;
  return true;
}

inline bool is_unitary(const ComplexMatrix& a, double tol = kDefaultTol) {
  if (!a.is_square()) throw ShapeError("is_unitary: matrix not square");
  return frob_dist(matmul(dagger(a), a), ComplexMatrix::identity(a.rows())) <= tol;
}

struct EigenSystem {
  std::vector<double> values;  // ascending
  ComplexMatrix vectors;       // eigenvectors as columns, same order
};

/// Full eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
/// Adequate and dependency-free at dimensions <= 81.
inline EigenSystem hermitian_eigensystem(const ComplexMatrix& input) {
  if (!input.is_square()) throw ShapeError("hermitian_eigensystem: matrix not square");
  const std::size_t n = input.rows();
  ComplexMatrix a = input;
  // Symmetrize first so that tiny Hermiticity violations cannot stall sweeps.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const cdouble m = 0.5 * (a(i, j) + std::conj(a(j, i)));
      a(i, j) = m;
      a(j, i) = std::conj(m);
    }
  ComplexMatrix v = ComplexMatrix::identity(n);

  const double scale = std::max(frob_norm(a), 1.0);
  const double stop = 1e-14 * scale;
  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    if (std::sqrt(2.0 * off) <= stop) break;

    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const cdouble g = a(p, q);
        const double mag = std::abs(g);
        if (mag <= 1e-300) continue;
        const cdouble u = g / mag;  // phase of the pivot
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double tau = (aqq - app) / (2.0 * mag);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        // Plane rotation J with J(p,p)=c, J(p,q)=s, J(q,p)=-s*conj(u),
        // J(q,q)=c*conj(u); apply A <- J^dag A J and V <- V J.
        const cdouble ubar = std::conj(u);
        for (std::size_t k = 0; k < n; ++k) {  // columns: A <- A J
          const cdouble akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * ubar * akq;
          a(k, q) = s * akp + c * ubar * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {  // rows: A <- J^dag A
          const cdouble apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * u * aqk;
          a(q, k) = s * apk + c * u * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {  // accumulate eigenvectors
          const cdouble vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * ubar * vkq;
          v(k, q) = s * vkp + c * ubar * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });
  EigenSystem out;
  out.values.resize(n);
  out.vectors = ComplexMatrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    out.values[j] = a(order[j], order[j]).real();
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
  }
  return out;
}

inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& a) {
  return hermitian_eigensystem(a).values;
}

/// Positive semidefiniteness within tolerance: all eigenvalues >= -tol.
inline bool is_psd(const ComplexMatrix& a, double tol = kDefaultTol) {
  if (!a.is_square()) throw ShapeError("is_psd: matrix not square");
  if (!is_hermitian(a, std::max(tol, kDefaultTol))) return false;
  const auto evals = hermitian_eigenvalues(a);
  return evals.empty() || evals.front() >= -tol;
}

/// Haar-like random unitary from Gram-Schmidt on a Gaussian matrix.
inline ComplexMatrix random_unitary(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) m(i, j) = cdouble(gauss(rng), gauss(rng));
  // Modified Gram-Schmidt over columns.
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      cdouble proj{0.0, 0.0};
      for (std::size_t i = 0; i < dim; ++i) proj += std::conj(m(i, k)) * m(i, j);
      for (std::size_t i = 0; i < dim; ++i) m(i, j) -= proj * m(i, k);
    }
    double nrm = 0.0;
    for (std::size_t i = 0; i < dim; ++i) nrm += std::norm(m(i, j));
    nrm = std::sqrt(nrm);
    if (nrm < 1e-12) throw ValidationError("random_unitary: degenerate draw");
    for (std::size_t i = 0; i < dim; ++i) m(i, j) /= nrm;
  }
  return m;
}

inline ComplexMatrix random_hermitian(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix m(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    m(i, i) = gauss(rng);
    for (std::size_t j = i + 1; j < dim; ++j) {
      const cdouble z(gauss(rng), gauss(rng));
      m(i, j) = z;
      m(j, i) = std::conj(z);
    }
  }
  return m;
}

inline ComplexMatrix random_density(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  ComplexMatrix g(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) g(i, j) = cdouble(gauss(rng), gauss(rng));
  ComplexMatrix rho = matmul(g, dagger(g));
  const double t = trace(rho).real();
  return (1.0 / t) * rho;
}

}  // namespace psc
