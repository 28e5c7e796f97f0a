#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "psc/channels.hpp"
#include "psc/complex_matrix.hpp"
#include "psc/gates.hpp"
#include "psc/parallel.hpp"
#include "psc/phase_space.hpp"

namespace psc {

/// Phase-convention function gamma: Lambda -> Z_q selecting which Wigner
/// function a frame realizes. q is 4 for qubits and d for odd d.
struct GammaFunction {
  PhaseSpace space;
  int q = 4;
  std::vector<int> table;  // indexed by point_index
  std::string label;

  GammaFunction() = default;
  GammaFunction(PhaseSpace sp, std::vector<int> values, std::string name)
      : space(sp), q(sp.d == 2 ? 4 : sp.d), table(std::move(values)), label(std::move(name)) {
    if (table.size() != space.size())
      throw ValidationError("GammaFunction '" + label + "': table must cover the phase space");
    for (auto& v : table) v = imod(v, q);
  }

  int operator()(const PhasePoint& pt) const { return table[point_index(space, pt)]; }
};

/// gamma(lambda) = sum_i x_i p_i mod q. Gives the odd-dimension Wigner
/// function for q = d and the Gibbons-Wootters multi-qubit one for q = 4.
inline GammaFunction gamma_xp(const PhaseSpace& space, std::string label) {
  const int q = space.d == 2 ? 4 : space.d;
  std::vector<int> table(space.size());
  for (std::size_t idx = 0; idx < space.size(); ++idx) {
    const PhasePoint pt = point_at(space, idx);
    long long acc = 0;
    for (int i = 0; i < space.n; ++i) acc += static_cast<long long>(pt.x(i)) * pt.p(i);
    table[idx] = imod(acc, q);
  }
  return GammaFunction(space, std::move(table), std::move(label));
}

/// One of the eight single-qubit Wigner functions, identified by the signs of
/// the X, Y, Z components of A(0,0) = (I + sx X + sy Y + sz Z)/2.
inline GammaFunction gamma_qubit_signs(int sx, int sy, int sz, std::string label) {
  std::vector<int> table(4);
  const PhaseSpace space(2, 1);
  table[point_index(space, PhasePoint(0, 0))] = 0;
  table[point_index(space, PhasePoint(1, 0))] = sx > 0 ? 0 : 2;
  table[point_index(space, PhasePoint(0, 1))] = sz > 0 ? 0 : 2;
  table[point_index(space, PhasePoint(1, 1))] = sy > 0 ? 3 : 1;
  return GammaFunction(space, std::move(table), std::move(label));
}

/// Phase-free Weyl word D(lambda) = Z(p_0)X(x_0) (x) ... (x) Z(p_{n-1})X(x_{n-1}).
inline ComplexMatrix weyl_word(const PhaseSpace& space, const PhasePoint& pt) {
  check_point(space, pt);
  ComplexMatrix out = matmul(pauli_z(space.d, pt.p(0)), pauli_x(space.d, pt.x(0)));
  for (int i = 1; i < space.n; ++i)
    out = tensor(out, matmul(pauli_z(space.d, pt.p(i)), pauli_x(space.d, pt.x(i))));
  return out;
}

/// Weyl operator W(lambda) = w^{gamma(lambda)} D(lambda), with w = i for
/// qubits and w^{gamma} = chi(2^{-1} gamma) for odd d.
inline ComplexMatrix weyl_operator(const GammaFunction& gamma, const PhasePoint& pt) {
  const PhaseSpace& space = gamma.space;
  int phase_num;  // w^{gamma} = exp(2 pi i phase_num / q_eff)
  int q_eff;
  if (space.d == 2) {
    phase_num = gamma(pt);
    q_eff = 4;
  } else {
    phase_num = imod(static_cast<long long>(inv_mod(2, space.d)) * gamma(pt), space.d);
    q_eff = space.d;
  }
  const cdouble w = std::polar(1.0, 2.0 * std::numbers::pi * phase_num / q_eff);
  return w * weyl_word(space, pt);
}

struct WignerState {
  std::string frame;
  std::vector<double> values;  // indexed by point_index, sums to 1
};

struct WignerEffect {
  std::string frame;
  std::vector<double> values;  // indexed by point_index
};

/// Phase-space matrix of a channel: entry (row lambda', column lambda) is
/// W(lambda'|lambda); every column sums to 1.
struct WignerChannelMatrix {
  std::string frame;
  std::size_t size = 0;
  std::vector<double> values;  // row-major, size x size

  double operator()(std::size_t to, std::size_t from) const { return values[to * size + from]; }
  double& at(std::size_t to, std::size_t from) { return values[to * size + from]; }
};

/// A complete operator basis {A(lambda)} over a finite phase space.
///
/// The frame convention is fixed so that all of the following hold at once
/// (they pin the normalization N_Lambda = d^n):
///   Tr A(lambda) = 1,   A = A^dag,
///   Tr[A(lambda) A(lambda')] = d^n delta,   sum_lambda A(lambda) = d^n I.
/// Phase-point operators are cached eagerly; frames are immutable.
class WignerFrame {
 public:
  WignerFrame(GammaFunction gamma, std::string label, double tol = kDefaultTol)
      : space_(gamma.space), gamma_(std::move(gamma)), label_(std::move(label)) {
    build();
    validate(tol);
  }

  const PhaseSpace& space() const { return space_; }
  const GammaFunction& gamma() const { return gamma_; }
  const std::string& label() const { return label_; }
  std::size_t dim() const { return space_.hilbert_dim(); }
  double norm() const { return static_cast<double>(space_.hilbert_dim()); }
  std::size_t point_count() const { return points_.size(); }

  const ComplexMatrix& phase_point(std::size_t index) const { return points_[index]; }
  const ComplexMatrix& phase_point(const PhasePoint& pt) const {
    return points_[point_index(space_, pt)];
  }

  ComplexMatrix weyl(const PhasePoint& pt) const { return weyl_operator(gamma_, pt); }

 private:
  void build() {
    const std::size_t count = space_.size();
    std::vector<ComplexMatrix> weyls(count);
    for (std::size_t i = 0; i < count; ++i) weyls[i] = weyl_operator(gamma_, point_at(space_, i));

    points_.assign(count, ComplexMatrix());
    const double inv_norm = 1.0 / norm();
    parallel_for(count, [&](std::size_t target) {
      const PhasePoint lam = point_at(space_, target);
      ComplexMatrix acc(dim(), dim());
      for (std::size_t source = 0; source < count; ++source) {
        const PhasePoint mu = point_at(space_, source);
        acc = acc + chi(symplectic_form(space_, mu, lam), space_.d) * weyls[source];
      }
      points_[target] = inv_norm * acc;
    });
  }

  void validate(double tol) const {
    const std::size_t count = points_.size();
    ComplexMatrix sum(dim(), dim());
    for (std::size_t i = 0; i < count; ++i) {
      const ComplexMatrix& a = points_[i];
      if (!is_hermitian(a, tol))
        throw ValidationError("frame '" + label_ + "': A" +
                              format_point(point_at(space_, i)) + " is not Hermitian");
      if (std::abs(trace(a) - cdouble{1.0, 0.0}) > tol)
        throw ValidationError("frame '" + label_ + "': A" +
                              format_point(point_at(space_, i)) + " does not have unit trace");
      sum = sum + a;
    }
    if (frob_dist(sum, norm() * ComplexMatrix::identity(dim())) > tol * count)
      throw ValidationError("frame '" + label_ + "': completeness sum_lambda A != d^n I");
    for (std::size_t i = 0; i < count; ++i)
      for (std::size_t j = i; j < count; ++j) {
        const double expected = i == j ? norm() : 0.0;
        const cdouble overlap = hs_inner(points_[i], points_[j]);
        if (std::abs(overlap - cdouble{expected, 0.0}) > tol * norm())
          throw ValidationError("frame '" + label_ + "': orthogonality failure at pair " +
                                format_point(point_at(space_, i)) + ", " +
                                format_point(point_at(space_, j)));
      }
  }

  PhaseSpace space_;
  GammaFunction gamma_;
  std::string label_;
  std::vector<ComplexMatrix> points_;
};

//------------------------------------------------------------------------
// Built-in frame catalog
//------------------------------------------------------------------------

inline WignerFrame wootters_qubit_frame(int sx, int sy, int sz) {
  std::string label;
  if (sx > 0 && sy > 0 && sz > 0)
    label = "wg-plus";
  else if (sx > 0 && sy > 0 && sz < 0)
    label = "wg-minus";
  else
    label = std::string("wg:") + (sx > 0 ? "+" : "-") + (sy > 0 ? "+" : "-") + (sz > 0 ? "+" : "-");
  return WignerFrame(gamma_qubit_signs(sx, sy, sz, label), label);
}

inline WignerFrame wg_plus() { return wootters_qubit_frame(+1, +1, +1); }
inline WignerFrame wg_minus() { return wootters_qubit_frame(+1, +1, -1); }

/// Odd-dimension Wigner frame from gamma = x.p; d=3 is the qutrit case.
inline WignerFrame gross_frame(int d = 3, int n = 1) {
  if (d % 2 == 0) throw ValidationError("gross_frame: requires odd prime d");
  std::string label = n == 1 ? "gross" : "gross-" + std::to_string(n);
  if (d != 3) label += "@d" + std::to_string(d);
  return WignerFrame(gamma_xp(PhaseSpace(d, n), label), label);
}

/// Multi-qubit Gibbons-Wootters frame from gamma = sum x_i p_i mod 4.
inline WignerFrame wg_multi_frame(int n = 2) {
  const std::string label = n == 2 ? "wg-multi" : "wg-multi-" + std::to_string(n);
  return WignerFrame(gamma_xp(PhaseSpace(2, n), label), label);
}

inline WignerFrame custom_frame(GammaFunction gamma, std::string label) {
  return WignerFrame(std::move(gamma), std::move(label));
}

//------------------------------------------------------------------------
// Wigner representations
//------------------------------------------------------------------------

/// Expansion coefficients of an arbitrary operator M in the A-basis:
/// c(lambda) = Tr[A(lambda) M] / d^n, so that M = sum c(lambda) A(lambda).
inline std::vector<double> wigner_coefficients(const WignerFrame& frame, const ComplexMatrix& m) {
  if (m.rows() != frame.dim() || m.cols() != frame.dim())
    throw ShapeError("wigner_coefficients: operator dimension does not match frame");
  std::vector<double> out(frame.point_count());
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = trace(matmul(frame.phase_point(i), m)).real() / frame.norm();
  return out;
}

/// W_rho(lambda) = Tr[A(lambda) rho] / d^n; sums to 1 over the phase space.
inline WignerState wigner_of_state(const WignerFrame& frame, const ComplexMatrix& rho,
                                   double tol = kDefaultTol) {
  if (rho.rows() != frame.dim() || rho.cols() != frame.dim())
    throw ShapeError("wigner_of_state: state dimension does not match frame");
  if (std::abs(trace(rho) - cdouble{1.0, 0.0}) > tol)
    throw ValidationError("wigner_of_state: state must have unit trace");
  return WignerState{frame.label(), wigner_coefficients(frame, rho)};
}

/// xi_Pi(lambda) = Tr[A(lambda) Pi]; a complete POVM sums pointwise to 1.
inline WignerEffect wigner_of_effect(const WignerFrame& frame, const ComplexMatrix& effect) {
  if (effect.rows() != frame.dim() || effect.cols() != frame.dim())
    throw ShapeError("wigner_of_effect: effect dimension does not match frame");
  std::vector<double> values(frame.point_count());
  for (std::size_t i = 0; i < values.size(); ++i)
    values[i] = trace(matmul(frame.phase_point(i), effect)).real();
  return WignerEffect{frame.label(), std::move(values)};
}

/// W(lambda'|lambda) = Tr[eps(A(lambda)) A(lambda')] / d^n.
inline WignerChannelMatrix wigner_of_channel(const WignerFrame& frame,
                                             const KrausChannel& channel) {
  if (channel.dim() != frame.dim())
    throw ShapeError("wigner_of_channel: channel dimension does not match frame");
  const std::size_t count = frame.point_count();
  WignerChannelMatrix out{frame.label(), count, std::vector<double>(count * count, 0.0)};
  for (std::size_t from = 0; from < count; ++from) {
    const ComplexMatrix image = apply(channel, frame.phase_point(from));
    const std::vector<double> column = wigner_coefficients(frame, image);
    for (std::size_t to = 0; to < count; ++to) out.at(to, from) = column[to];
  }
  return out;
}

/// rho = sum_lambda W(lambda) A(lambda).
inline ComplexMatrix reconstruct_state(const WignerFrame& frame,
                                       const std::vector<double>& values) {
  if (values.size() != frame.point_count())
    throw ShapeError("reconstruct_state: value table must cover the phase space");
  ComplexMatrix out(frame.dim(), frame.dim());
  for (std::size_t i = 0; i < values.size(); ++i)
    out = out + values[i] * frame.phase_point(i);
  return out;
}

inline ComplexMatrix reconstruct_state(const WignerFrame& frame, const WignerState& state) {
  return reconstruct_state(frame, state.values);
}

/// Total weight of negative entries, sum of max(0, -value).
inline double negativity(const std::vector<double>& values) {
  double total = 0.0;
  for (double v : values)
    if (v < 0.0) total -= v;
  return total;
}

inline double negativity(const WignerState& s) { return negativity(s.values); }
inline double negativity(const WignerEffect& e) { return negativity(e.values); }
inline double negativity(const WignerChannelMatrix& m) { return negativity(m.values); }

inline double min_entry(const std::vector<double>& values) {
  double m = values.empty() ? 0.0 : values.front();
  for (double v : values) m = std::min(m, v);
  return m;
}

}  // namespace psc
