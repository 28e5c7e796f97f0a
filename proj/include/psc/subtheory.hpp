#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "psc/channels.hpp"
#include "psc/complex_matrix.hpp"
#include "psc/gates.hpp"
#include "psc/weyl_frame.hpp"

namespace psc {

namespace detail {

// Canonical representative modulo global phase: divide by the phase of the
// first entry whose magnitude exceeds 1e-6. Group elements here have entry
// magnitudes either ~0 or >= 1/4, so the threshold is safe.
inline ComplexMatrix phase_canonical(const ComplexMatrix& m) {
  for (const auto& z : m.entries()) {
    if (std::abs(z) > 1e-6) {
      const cdouble u = std::conj(z) / std::abs(z);
      return u * m;
    }
  }
  return m;
}

// Dedup key: entries rounded to a 1e-6 grid. Distinct group elements are
// separated by far more than numerical drift at these sizes.
inline std::string rounding_key(const ComplexMatrix& m) {
  std::string key;
  key.reserve(m.entries().size() * 16);
  for (const auto& z : m.entries()) {
    key += std::to_string(std::llround(z.real() * 1e6));
    key += ',';
    key += std::to_string(std::llround(z.imag() * 1e6));
    key += ';';
  }
  return key;
}

}  // namespace detail

inline bool equal_mod_phase(const ComplexMatrix& a, const ComplexMatrix& b,
                            double tol = kDefaultTol) {
  if (!same_shape(a, b)) return false;
  return frob_dist(detail::phase_canonical(a), detail::phase_canonical(b)) <= tol;
}

/// Closure of the standard generating set under multiplication, deduplicated
/// modulo global phase, in deterministic breadth-first order.
///   (2,1): {H, P}            -> 24 elements
///   (3,1): {F, S}            -> 216 elements
///   (2,2): {H, P per qubit, CNOT} -> 11520 elements
inline std::vector<ComplexMatrix> generate_clifford(int d, int n) {
  std::vector<ComplexMatrix> generators;
  if (d == 2 && n == 1) {
    generators = {hadamard(), phase_gate()};
  } else if (d == 3 && n == 1) {
    generators = {fourier(3), qutrit_phase()};
  } else if (d == 2 && n == 2) {
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    generators = {tensor(hadamard(), i2), tensor(i2, hadamard()), tensor(phase_gate(), i2),
                  tensor(i2, phase_gate()), cnot()};
  } else {
    throw CapabilityError("generate_clifford: supported for (d,n) in {(2,1),(3,1),(2,2)} only");
  }

  std::vector<ComplexMatrix> closure;
  std::unordered_set<std::string> seen;
  std::deque<ComplexMatrix> frontier;

  const auto push = [&](const ComplexMatrix& m) {
    ComplexMatrix canon = detail::phase_canonical(m);
    const std::string key = detail::rounding_key(canon);
    if (seen.insert(key).second) {
      closure.push_back(canon);
      frontier.push_back(std::move(canon));
    }
  };

  push(ComplexMatrix::identity(generators.front().rows()));
  while (!frontier.empty()) {
    const ComplexMatrix current = std::move(frontier.front());
    frontier.pop_front();
    for (const auto& g : generators) push(matmul(g, current));
  }
  return closure;
}

struct LabeledState {
  std::string label;
  ComplexMatrix rho;
};

/// A POVM as a labeled list of effect operators summing to the identity.
struct Povm {
  std::string label;
  std::vector<ComplexMatrix> effects;

  Povm(std::string name, std::vector<ComplexMatrix> ops, double tol = kDefaultTol)
      : label(std::move(name)), effects(std::move(ops)) {
    if (effects.empty()) throw ValidationError("Povm '" + label + "': no effects");
    ComplexMatrix sum(effects.front().rows(), effects.front().cols());
    for (const auto& e : effects) sum = sum + e;
    if (frob_dist(sum, ComplexMatrix::identity(sum.rows())) > tol)
      throw ValidationError("Povm '" + label + "': effects do not sum to the identity");
  }
};

namespace detail {

// Eigenprojectors of a non-degenerate unitary with M^d proportional to I:
// Pi_k = (1/d) sum_m (mu w^k)^{-m} M^m, mu a d-th root of the proportionality
// phase. Covers the generalized Pauli observables used below.
inline std::vector<ComplexMatrix> unitary_eigenprojectors(const ComplexMatrix& m, int d) {
  ComplexMatrix power = ComplexMatrix::identity(m.rows());
  std::vector<ComplexMatrix> powers = {power};
  for (int k = 1; k < d; ++k) {
    power = matmul(m, power);
    powers.push_back(power);
  }
  const cdouble eta = matmul(m, powers.back())(0, 0);  // M^d = eta I
  const cdouble mu = std::polar(1.0, std::arg(eta) / d);
  std::vector<ComplexMatrix> projectors;
  for (int k = 0; k < d; ++k) {
    ComplexMatrix acc(m.rows(), m.cols());
    for (int p = 0; p < d; ++p) {
      const cdouble eig = mu * chi(k, d);
      acc = acc + (std::pow(eig, -p) / static_cast<double>(d)) * powers[p];
    }
    projectors.push_back(std::move(acc));
  }
  return projectors;
}

inline std::string state_key(const ComplexMatrix& rho) { return rounding_key(rho); }

}  // namespace detail

/// All pure stabilizer states for the supported desk-scale cases, in
/// deterministic label order.
inline std::vector<LabeledState> enumerate_stabilizer_states(int d, int n) {
  std::vector<LabeledState> out;
  if (d == 2 && n == 1) {
    const std::array<std::pair<std::string, ComplexMatrix>, 3> axes = {
        std::make_pair("X", sigma_x()), std::make_pair("Y", sigma_y()),
        std::make_pair("Z", sigma_z())};
    for (const auto& [name, pauli] : axes) {
      out.push_back({name + "+", 0.5 * (ComplexMatrix::identity(2) + pauli)});
      out.push_back({name + "-", 0.5 * (ComplexMatrix::identity(2) - pauli)});
    }
  } else if (d == 3 && n == 1) {
    const ComplexMatrix x = pauli_x(3, 1), z = pauli_z(3, 1);
    const std::array<std::pair<std::string, ComplexMatrix>, 4> bases = {
        std::make_pair("X", x), std::make_pair("Z", z), std::make_pair("XZ", matmul(x, z)),
        std::make_pair("XZ2", matmul(x, matmul(z, z)))};
    for (const auto& [name, obs] : bases) {
      const auto projectors = detail::unitary_eigenprojectors(obs, 3);
      for (int k = 0; k < 3; ++k)
        out.push_back({name + ":" + std::to_string(k), projectors[k]});
    }
  } else if (d == 2 && n == 2) {
    // Orbit of |00><00| under the two-qubit Clifford group.
    const auto cliffords = generate_clifford(2, 2);
    const ComplexMatrix seed = tensor(basis_projector(2, 0), basis_projector(2, 0));
    std::unordered_set<std::string> seen;
    for (const auto& u : cliffords) {
      ComplexMatrix img = matmul(matmul(u, seed), dagger(u));
      const std::string key = detail::state_key(img);
      if (seen.insert(key).second) {
        char label[8];
        std::snprintf(label, sizeof(label), "s%02zu", seen.size() - 1);
        out.push_back({label, std::move(img)});
      }
    }
  } else {
    throw CapabilityError(
        "enumerate_stabilizer_states: supported for (d,n) in {(2,1),(3,1),(2,2)} only");
  }
  return out;
}

/// Partition of candidate states or effects by non-negativity of their
/// Wigner representation in the given frame.
struct FilterEntry {
  std::string label;
  double min_entry = 0.0;
  bool nonnegative = false;
};

struct NonnegativityPartition {
  std::vector<FilterEntry> entries;
  std::vector<std::string> nonnegative;
  std::vector<std::string> negative;
};

enum class RepKind { State, Effect };

inline NonnegativityPartition filter_nonnegative(const WignerFrame& frame,
                                                 const std::vector<LabeledState>& candidates,
                                                 RepKind kind = RepKind::State,
                                                 double tol = kDefaultTol) {
  NonnegativityPartition out;
  for (const auto& c : candidates) {
    const std::vector<double> values = kind == RepKind::State
                                           ? wigner_of_state(frame, c.rho).values
                                           : wigner_of_effect(frame, c.rho).values;
    FilterEntry entry{c.label, min_entry(values), min_entry(values) >= -tol};
    if (entry.nonnegative)
      out.nonnegative.push_back(c.label);
    else
      out.negative.push_back(c.label);
    out.entries.push_back(std::move(entry));
  }
  return out;
}

/// A finite subtheory (S, T, M): states, transformations and measurements,
/// with transformations expected to map states into the convex hull of S.
struct Subtheory {
  std::size_t dim = 0;
  std::string label;
  std::vector<LabeledState> states;
  std::vector<KrausChannel> transformations;
  std::vector<Povm> povms;
  std::optional<std::string> frame_tag;  // set when defined as (S,T,M)_gamma
};

namespace detail {

// Least-squares solve of (A^T A + ridge I) z = A^T b restricted to the
// column subset `support`, by Gaussian elimination with partial pivoting.
inline std::vector<double> ls_on_support(const std::vector<std::vector<double>>& cols,
                                         const std::vector<double>& b,
                                         const std::vector<std::size_t>& support) {
  const std::size_t m = support.size();
  std::vector<std::vector<double>> g(m, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double dot = 0.0;
      const auto& ci = cols[support[i]];
      const auto& cj = cols[support[j]];
      for (std::size_t r = 0; r < ci.size(); ++r) dot += ci[r] * cj[r];
      g[i][j] = dot + (i == j ? 1e-12 : 0.0);
    }
    double rhs = 0.0;
    for (std::size_t r = 0; r < b.size(); ++r) rhs += cols[support[i]][r] * b[r];
    g[i][m] = rhs;
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(g[r][col]) > std::abs(g[pivot][col])) pivot = r;
    std::swap(g[col], g[pivot]);
    if (std::abs(g[col][col]) < 1e-300) continue;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == col) continue;
      const double f = g[r][col] / g[col][col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c <= m; ++c) g[r][c] -= f * g[col][c];
    }
  }
  std::vector<double> z(m, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    if (std::abs(g[i][i]) > 1e-300) z[i] = g[i][m] / g[i][i];
  return z;
}

// Lawson-Hanson nonnegative least squares; returns the final residual
// 2-norm of A w - b with w >= 0.
inline double nnls_residual(const std::vector<std::vector<double>>& cols,
                            const std::vector<double>& b, std::vector<double>* weights_out) {
  const std::size_t m = cols.size();
  std::vector<double> x(m, 0.0);
  std::vector<bool> passive(m, false);
  std::vector<double> residual = b;

  const auto refresh_residual = [&]() {
    residual = b;
    for (std::size_t j = 0; j < m; ++j) {
      if (x[j] == 0.0) continue;
      for (std::size_t r = 0; r < b.size(); ++r) residual[r] -= x[j] * cols[j][r];
    }
  };

  const std::size_t max_outer = 3 * m + 10;
  for (std::size_t outer = 0; outer < max_outer; ++outer) {
    double best = 1e-11;
    std::size_t best_j = m;
    for (std::size_t j = 0; j < m; ++j) {
      if (passive[j]) continue;
      double grad = 0.0;
      for (std::size_t r = 0; r < b.size(); ++r) grad += cols[j][r] * residual[r];
      if (grad > best) {
        best = grad;
        best_j = j;
      }
    }
    if (best_j == m) break;
    passive[best_j] = true;

    for (std::size_t inner = 0; inner < max_outer; ++inner) {
      std::vector<std::size_t> support;
      for (std::size_t j = 0; j < m; ++j)
        if (passive[j]) support.push_back(j);
      const std::vector<double> z = ls_on_support(cols, b, support);
      bool all_positive = true;
      for (double v : z)
        if (v <= 1e-13) all_positive = false;
      if (all_positive) {
        for (std::size_t k = 0; k < support.size(); ++k) x[support[k]] = z[k];
        break;
      }
      double alpha = 1.0;
      for (std::size_t k = 0; k < support.size(); ++k) {
        if (z[k] <= 1e-13) {
          const double xi = x[support[k]];
          if (xi - z[k] > 1e-300) alpha = std::min(alpha, xi / (xi - z[k]));
        }
      }
      for (std::size_t k = 0; k < support.size(); ++k) {
        x[support[k]] += alpha * (z[k] - x[support[k]]);
        if (x[support[k]] <= 1e-13) {
          x[support[k]] = 0.0;
          passive[support[k]] = false;
        }
      }
    }
    refresh_residual();
  }

  if (weights_out) *weights_out = x;
  double norm2 = 0.0;
  for (double r : residual) norm2 += r * r;
  return std::sqrt(norm2);
}

inline std::vector<double> realify_hermitian(const ComplexMatrix& m) {
  std::vector<double> v;
  v.reserve(m.rows() * m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) v.push_back(m(i, i).real());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j) {
      v.push_back(m(i, j).real());
      v.push_back(m(i, j).imag());
    }
  return v;
}

}  // namespace detail

/// Distance-like residual of `target` from the convex hull of `states`,
/// decided by a small nonnegative least-squares feasibility solve with the
/// weight normalization folded in as an extra row.
inline double convex_hull_residual(const std::vector<LabeledState>& states,
                                   const ComplexMatrix& target,
                                   std::vector<double>* weights = nullptr) {
  std::vector<std::vector<double>> cols;
  cols.reserve(states.size());
  for (const auto& s : states) {
    std::vector<double> col = detail::realify_hermitian(s.rho);
    col.push_back(1.0);  // sum-to-one row
    cols.push_back(std::move(col));
  }
  std::vector<double> b = detail::realify_hermitian(target);
  b.push_back(1.0);
  return detail::nnls_residual(cols, b, weights);
}

inline bool in_convex_hull(const std::vector<LabeledState>& states, const ComplexMatrix& target,
                           double tol = 1e-7) {
  return convex_hull_residual(states, target) <= tol;
}

struct ClosureViolation {
  std::string transformation;
  std::string state;
  double residual = 0.0;
};

struct ClosureReport {
  std::vector<ClosureViolation> violations;
  double worst_residual = 0.0;
  bool valid() const { return violations.empty(); }
};

/// Checks that every transformation maps every state into the convex hull
/// of the subtheory's state set.
inline ClosureReport validate_closure(const Subtheory& sub, double tol = 1e-7) {
  ClosureReport report;
  for (const auto& channel : sub.transformations) {
    for (const auto& state : sub.states) {
      const double residual = convex_hull_residual(sub.states, apply(channel, state.rho));
      report.worst_residual = std::max(report.worst_residual, residual);
      if (residual > tol) report.violations.push_back({channel.label(), state.label, residual});
    }
  }
  return report;
}

namespace detail {

inline std::string clifford_label(std::size_t index, std::size_t total) {
  int width = 2;
  for (std::size_t v = total; v > 100; v /= 10) ++width;
  char buf[16];
  std::snprintf(buf, sizeof(buf), "C%0*zu", width, index);
  return buf;
}

}  // namespace detail

/// The single-qubit stabilizer theory: 6 states, the 24 Clifford channels,
/// and the X, Y, Z measurements.
inline Subtheory build_single_qubit_stabilizer() {
  Subtheory sub;
  sub.dim = 2;
  sub.label = "qubit-stab";
  sub.states = enumerate_stabilizer_states(2, 1);
  const auto cliffords = generate_clifford(2, 1);
  for (std::size_t i = 0; i < cliffords.size(); ++i)
    sub.transformations.push_back(
        unitary_channel(cliffords[i], detail::clifford_label(i, cliffords.size())));
  const std::array<std::pair<std::string, ComplexMatrix>, 3> axes = {
      std::make_pair("X", sigma_x()), std::make_pair("Y", sigma_y()),
      std::make_pair("Z", sigma_z())};
  for (const auto& [name, pauli] : axes)
    sub.povms.emplace_back(name,
                           std::vector<ComplexMatrix>{0.5 * (ComplexMatrix::identity(2) + pauli),
                                                      0.5 * (ComplexMatrix::identity(2) - pauli)});
  return sub;
}

/// The single-qutrit stabilizer theory: 12 states, the 216 Clifford
/// channels, and the X, Z, XZ, XZ^2 measurements.
inline Subtheory build_qutrit_stabilizer() {
  Subtheory sub;
  sub.dim = 3;
  sub.label = "qutrit-stab";
  sub.states = enumerate_stabilizer_states(3, 1);
  const auto cliffords = generate_clifford(3, 1);
  for (std::size_t i = 0; i < cliffords.size(); ++i)
    sub.transformations.push_back(
        unitary_channel(cliffords[i], detail::clifford_label(i, cliffords.size())));
  const ComplexMatrix x = pauli_x(3, 1), z = pauli_z(3, 1);
  const std::array<std::pair<std::string, ComplexMatrix>, 4> bases = {
      std::make_pair("X", x), std::make_pair("Z", z), std::make_pair("XZ", matmul(x, z)),
      std::make_pair("XZ2", matmul(x, matmul(z, z)))};
  for (const auto& [name, obs] : bases)
    sub.povms.emplace_back(name, detail::unitary_eigenprojectors(obs, 3));
  return sub;
}

/// The two-qubit stabilizer theory: 60 states, the 11520 Clifford channels,
/// and the 15 two-qubit Pauli product measurements.
inline Subtheory build_two_qubit_stabilizer() {
  Subtheory sub;
  sub.dim = 4;
  sub.label = "2qubit-stab";
  sub.states = enumerate_stabilizer_states(2, 2);
  const auto cliffords = generate_clifford(2, 2);
  for (std::size_t i = 0; i < cliffords.size(); ++i)
    sub.transformations.push_back(
        unitary_channel(cliffords[i], detail::clifford_label(i, cliffords.size())));
  const std::array<std::pair<std::string, ComplexMatrix>, 4> singles = {
      std::make_pair("I", ComplexMatrix::identity(2)), std::make_pair("X", sigma_x()),
      std::make_pair("Y", sigma_y()), std::make_pair("Z", sigma_z())};
  for (const auto& [na, a] : singles)
    for (const auto& [nb, b] : singles) {
      if (na == "I" && nb == "I") continue;
      const ComplexMatrix obs = tensor(a, b);
      sub.povms.emplace_back(na + nb, std::vector<ComplexMatrix>{
                                          0.5 * (ComplexMatrix::identity(4) + obs),
                                          0.5 * (ComplexMatrix::identity(4) - obs)});
    }
  return sub;
}

}  // namespace psc
