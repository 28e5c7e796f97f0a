#pragma once

#include <cmath>
#include <numbers>

#include "psc/complex_matrix.hpp"
#include "psc/phase_space.hpp"

namespace psc {

/// d-th root of unity character chi(a) = exp(2*pi*i*a/d); (-1)^a for d=2.
inline cdouble chi(int a, int d) {
  return std::polar(1.0, 2.0 * std::numbers::pi * imod(a, d) / d);
}

/// Generalized Pauli shift X(x) = sum_{x'} |x'-x><x'|.
inline ComplexMatrix pauli_x(int d, int x) {
  ComplexMatrix m(d, d);
  for (int col = 0; col < d; ++col) m(imod(col - x, d), col) = 1.0;
  return m;
}

/// Generalized Pauli clock Z(p) = sum_x chi(p x) |x><x|.
inline ComplexMatrix pauli_z(int d, int p) {
  ComplexMatrix m(d, d);
  for (int x = 0; x < d; ++x) m(x, x) = chi(p * x, d);
  return m;
}

inline ComplexMatrix sigma_x() { return pauli_x(2, 1); }

inline ComplexMatrix sigma_y() {
  return ComplexMatrix(2, 2, {0.0, cdouble(0.0, -1.0), cdouble(0.0, 1.0), 0.0});
}

inline ComplexMatrix sigma_z() { return pauli_z(2, 1); }

inline ComplexMatrix hadamard() {
  const double r = 1.0 / std::sqrt(2.0);
  return ComplexMatrix(2, 2, {r, r, r, -r});
}

/// Qubit phase gate diag(1, i).
inline ComplexMatrix phase_gate() {
  return ComplexMatrix(2, 2, {1.0, 0.0, 0.0, cdouble(0.0, 1.0)});
}

/// Non-Clifford pi/8 gate diag(1, e^{i pi/4}).
inline ComplexMatrix t_gate() {
  return ComplexMatrix(2, 2, {1.0, 0.0, 0.0, std::polar(1.0, std::numbers::pi / 4.0)});
}

/// Discrete Fourier transform F_{jk} = chi(jk)/sqrt(d).
inline ComplexMatrix fourier(int d) {
  ComplexMatrix m(d, d);
  const double r = 1.0 / std::sqrt(static_cast<double>(d));
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) m(j, k) = r * chi(j * k, d);
  return m;
}

/// Qutrit phase gate diag(1, 1, omega).
inline ComplexMatrix qutrit_phase() {
  ComplexMatrix m = ComplexMatrix::identity(3);
  m(2, 2) = chi(1, 3);
  return m;
}

inline ComplexMatrix cnot() {
  ComplexMatrix m(4, 4);
  m(0, 0) = 1.0;
  m(1, 1) = 1.0;
  m(2, 3) = 1.0;
  m(3, 2) = 1.0;
  return m;
}

/// Computational basis projector |k><k|.
inline ComplexMatrix basis_projector(int d, int k) {
  ComplexMatrix m(d, d);
  m(k, k) = 1.0;
  return m;
}

inline ComplexMatrix ket_density(const std::vector<cdouble>& amplitudes) {
  const std::size_t d = amplitudes.size();
  ComplexMatrix m(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m(i, j) = amplitudes[i] * std::conj(amplitudes[j]);
  return m;
}

}  // namespace psc
