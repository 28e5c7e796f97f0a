#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "psc/complex_matrix.hpp"
#include "psc/gates.hpp"

namespace psc {

/// A CPTP map held as an explicit Kraus decomposition. The decomposition is
/// part of the identity of a transformation *procedure*; two procedures with
/// different operator lists can still be the same channel (see choi()).
class KrausChannel {
 public:
  KrausChannel(std::vector<ComplexMatrix> ops, std::string label, double tol = kDefaultTol)
      : ops_(std::move(ops)), label_(std::move(label)) {
    if (ops_.empty()) throw ValidationError("KrausChannel '" + label_ + "': empty operator list");
    dim_ = ops_.front().rows();
    ComplexMatrix sum(dim_, dim_);
    for (const auto& e : ops_) {
      if (e.rows() != dim_ || e.cols() != dim_)
        throw ShapeError("KrausChannel '" + label_ + "': operator shape mismatch");
      sum = sum + matmul(dagger(e), e);
    }
    if (frob_dist(sum, ComplexMatrix::identity(dim_)) > tol)
      throw ValidationError("KrausChannel '" + label_ +
                            "': Kraus operators do not satisfy the completeness relation");
  }

  std::size_t dim() const { return dim_; }
  const std::string& label() const { return label_; }
  const std::vector<ComplexMatrix>& kraus_ops() const { return ops_; }

 private:
  std::size_t dim_ = 0;
  std::vector<ComplexMatrix> ops_;
  std::string label_;
};

inline ComplexMatrix apply(const KrausChannel& channel, const ComplexMatrix& rho) {
  if (rho.rows() != channel.dim() || rho.cols() != channel.dim())
    throw ShapeError("apply: state dimension does not match channel");
  ComplexMatrix out(channel.dim(), channel.dim());
  for (const auto& e : channel.kraus_ops()) out = out + matmul(matmul(e, rho), dagger(e));
  return out;
}

/// Decomposition-independent fingerprint of a channel:
/// C[(i,k),(j,l)] = <k| eps(|i><j|) |l>.
struct ChoiMatrix {
  std::size_t dim = 0;   // Hilbert dimension of the channel
  ComplexMatrix matrix;  // dim^2 x dim^2
};

inline ChoiMatrix choi(const KrausChannel& channel) {
  const std::size_t d = channel.dim();
  ChoiMatrix out{d, ComplexMatrix(d * d, d * d)};
  for (const auto& e : channel.kraus_ops()) {
    // eps(|i><j|) = E |i><j| E^dag has (k,l) entry E(k,i) * conj(E(l,j)).
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t k = 0; k < d; ++k) {
        const cdouble eki = e(k, i);
        if (eki == cdouble{0.0, 0.0}) continue;
        for (std::size_t j = 0; j < d; ++j)
          for (std::size_t l = 0; l < d; ++l)
            out.matrix(i * d + k, j * d + l) += eki * std::conj(e(l, j));
      }
  }
  return out;
}

/// Trace-preservation residual: || Tr_out C - I ||_F.
inline double choi_trace_defect(const ChoiMatrix& c) {
  const std::size_t d = c.dim;
  ComplexMatrix tr(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      for (std::size_t k = 0; k < d; ++k) tr(i, j) += c.matrix(i * d + k, j * d + k);
  return frob_dist(tr, ComplexMatrix::identity(d));
}

inline void validate_choi(const ChoiMatrix& c, double tol = kDefaultTol) {
  if (choi_trace_defect(c) > tol) throw ValidationError("Choi matrix is not trace preserving");
  if (!is_psd(c.matrix, tol)) throw ValidationError("Choi matrix is not positive semidefinite");
}

/// Reconstructs the channel action from the Choi fingerprint.
inline ComplexMatrix apply_via_choi(const ChoiMatrix& c, const ComplexMatrix& rho) {
  const std::size_t d = c.dim;
  if (rho.rows() != d || rho.cols() != d) throw ShapeError("apply_via_choi: dimension mismatch");
  ComplexMatrix out(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      const cdouble rij = rho(i, j);
      if (rij == cdouble{0.0, 0.0}) continue;
      for (std::size_t k = 0; k < d; ++k)
        for (std::size_t l = 0; l < d; ++l) out(k, l) += rij * c.matrix(i * d + k, j * d + l);
    }
  return out;
}

/// Operational equivalence: equal Choi matrices within tol.
inline bool channels_equal(const KrausChannel& a, const KrausChannel& b,
                           double tol = kDefaultTol) {
  if (a.dim() != b.dim()) throw ShapeError("channels_equal: dimension mismatch");
  return frob_dist(choi(a).matrix, choi(b).matrix) <= tol;
}

/// New decomposition F_j = sum_k V_{jk} E_k of the same channel. The operator
/// list is zero-padded up to the mixing dimension; all-zero results are
/// dropped (Frobenius norm below 1e-12).
inline KrausChannel remix_kraus(const KrausChannel& channel, const ComplexMatrix& mixing,
                                double tol = kDefaultTol) {
  if (!mixing.is_square() || !is_unitary(mixing, tol))
    throw ValidationError("remix_kraus: mixing matrix is not unitary");
  const std::size_t m = mixing.rows();
  if (m < channel.kraus_ops().size())
    throw ShapeError("remix_kraus: mixing matrix smaller than the operator list");
  const std::size_t d = channel.dim();
  std::vector<ComplexMatrix> padded = channel.kraus_ops();
  padded.resize(m, ComplexMatrix(d, d));
  std::vector<ComplexMatrix> out;
  for (std::size_t j = 0; j < m; ++j) {
    ComplexMatrix f(d, d);
    for (std::size_t k = 0; k < m; ++k) {
      const cdouble v = mixing(j, k);
      if (v == cdouble{0.0, 0.0}) continue;
      f = f + v * padded[k];
    }
    if (frob_norm(f) > 1e-12) out.push_back(std::move(f));
  }
  return KrausChannel(std::move(out), channel.label() + "/remixed");
}

inline KrausChannel unitary_channel(const ComplexMatrix& u, std::string label,
                                    double tol = kDefaultTol) {
  if (!u.is_square() || !is_unitary(u, tol))
    throw ValidationError("unitary_channel '" + label + "': matrix is not unitary");
  return KrausChannel({u}, std::move(label));
}

inline KrausChannel identity_channel(std::size_t dim) {
  return unitary_channel(ComplexMatrix::identity(dim), "id");
}

/// Mixture of the d^2 phase-free Weyl unitaries Z(p)X(x), weights indexed in
/// lexicographic (x, p) order.
inline KrausChannel weyl_mixture(int d, const std::vector<double>& weights, std::string label) {
  if (weights.size() != static_cast<std::size_t>(d) * d)
    throw ValidationError("weyl_mixture: expected d^2 weights");
  double sum = 0.0;
  for (double w : weights) {
    if (w < -1e-12) throw ValidationError("weyl_mixture: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kDefaultTol) throw ValidationError("weyl_mixture: weights must sum to 1");
  std::vector<ComplexMatrix> ops;
  for (int x = 0; x < d; ++x)
    for (int p = 0; p < d; ++p) {
      const double w = weights[static_cast<std::size_t>(x) * d + p];
      if (w <= 0.0) continue;
      ops.push_back(std::sqrt(w) * matmul(pauli_z(d, p), pauli_x(d, x)));
    }
  return KrausChannel(std::move(ops), std::move(label));
}

/// Qubit Pauli mixture with weights over {I, X, Y, Z}.
inline KrausChannel pauli_mixture(const std::array<double, 4>& weights,
                                  std::string label = "pauli-mix") {
  double sum = 0.0;
  for (double w : weights) {
    if (w < -1e-12) throw ValidationError("pauli_mixture: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kDefaultTol)
    throw ValidationError("pauli_mixture: weights must sum to 1");
  const std::array<ComplexMatrix, 4> paulis = {ComplexMatrix::identity(2), sigma_x(), sigma_y(),
                                               sigma_z()};
  std::vector<ComplexMatrix> ops;
  for (std::size_t k = 0; k < 4; ++k)
    if (weights[k] > 0.0) ops.push_back(std::sqrt(weights[k]) * paulis[k]);
  return KrausChannel(std::move(ops), std::move(label));
}

/// Completely depolarizing channel written with Pauli Kraus operators R/2.
inline KrausChannel depolarizing_eps1() {
  return pauli_mixture({0.25, 0.25, 0.25, 0.25}, "depol-eps1");
}

/// Operationally equivalent decomposition with Kraus operators (H R)/2.
inline KrausChannel depolarizing_eps2() {
  const std::array<ComplexMatrix, 4> paulis = {ComplexMatrix::identity(2), sigma_x(), sigma_y(),
                                               sigma_z()};
  const ComplexMatrix h = hadamard();
  std::vector<ComplexMatrix> ops;
  for (const auto& r : paulis) ops.push_back(0.5 * matmul(h, r));
  return KrausChannel(std::move(ops), "depol-eps2");
}

/// Channel composition a after b: (a o b)(rho) = a(b(rho)).
inline KrausChannel compose(const KrausChannel& a, const KrausChannel& b) {
  if (a.dim() != b.dim()) throw ShapeError("compose: dimension mismatch");
  std::vector<ComplexMatrix> ops;
  for (const auto& ea : a.kraus_ops())
    for (const auto& eb : b.kraus_ops()) ops.push_back(matmul(ea, eb));
  return KrausChannel(std::move(ops), a.label() + "*" + b.label());
}

/// Result of testing whether the *given* decomposition consists of operators
/// proportional to unitaries, E_k = c_k U_k with c_k > 0.
struct UnitaryKrausReport {
  bool proportional_unitary = false;
  std::vector<double> scales;            // c_k
  std::vector<ComplexMatrix> unitaries;  // U_k
  std::optional<std::size_t> counterexample_index;
};

inline UnitaryKrausReport unitary_kraus_decomposition(const KrausChannel& channel,
                                                      double tol = kDefaultTol) {
  UnitaryKrausReport report;
  const std::size_t d = channel.dim();
  for (std::size_t k = 0; k < channel.kraus_ops().size(); ++k) {
    const ComplexMatrix& e = channel.kraus_ops()[k];
    const ComplexMatrix gram = matmul(dagger(e), e);
    const double c2 = trace(gram).real() / static_cast<double>(d);
    if (c2 <= tol || frob_dist(gram, c2 * ComplexMatrix::identity(d)) > tol * std::max(1.0, c2)) {
      report.proportional_unitary = false;
      report.counterexample_index = k;
      report.scales.clear();
      report.unitaries.clear();
      return report;
    }
    const double c = std::sqrt(c2);
    report.scales.push_back(c);
    report.unitaries.push_back((1.0 / c) * e);
  }
  report.proportional_unitary = true;
  return report;
}

}  // namespace psc
