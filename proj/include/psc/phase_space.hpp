#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "psc/errors.hpp"

namespace psc {

namespace detail {
inline bool is_prime(int d) {
  if (d < 2) return false;
  for (int k = 2; k * k <= d; ++k)
    if (d % k == 0) return false;
  return true;
}
}  // namespace detail

/// Least nonnegative residue of v mod d.
inline int imod(long long v, int d) {
  const long long r = v % d;
  return static_cast<int>(r < 0 ? r + d : r);
}

/// Modular inverse for prime modulus (Fermat).
inline int inv_mod(int v, int d) {
  v = imod(v, d);
  if (v == 0) throw ValidationError("inv_mod: zero has no inverse");
  int result = 1, base = v, e = d - 2;
  while (e > 0) {
    if (e & 1) result = imod(static_cast<long long>(result) * base, d);
    base = imod(static_cast<long long>(base) * base, d);
    e >>= 1;
  }
  return result;
}

/// The finite phase space Z_d^{2n} for prime d.
struct PhaseSpace {
  int d = 2;  // prime dimension per system
  int n = 1;  // number of systems

  PhaseSpace() = default;
  PhaseSpace(int d_, int n_) : d(d_), n(n_) {
    if (!detail::is_prime(d)) throw ValidationError("PhaseSpace: d must be prime, got " + std::to_string(d));
    if (n < 1) throw ValidationError("PhaseSpace: n must be positive");
    if (n > 3 || (d > 7 && n > 1)) throw CapabilityError("PhaseSpace: beyond desk scale");
  }

  std::size_t size() const {  // |Lambda| = d^{2n}
    std::size_t s = 1;
    for (int i = 0; i < 2 * n; ++i) s *= static_cast<std::size_t>(d);
    return s;
  }

  std::size_t hilbert_dim() const {  // d^n
    std::size_t s = 1;
    for (int i = 0; i < n; ++i) s *= static_cast<std::size_t>(d);
    return s;
  }

  friend bool operator==(const PhaseSpace& a, const PhaseSpace& b) {
    return a.d == b.d && a.n == b.n;
  }
};

/// A point of Z_d^{2n}, coordinates interleaved (x0, p0, x1, p1, ...),
/// each reduced mod d.
struct PhasePoint {
  std::vector<int> coords;

  PhasePoint() = default;
  explicit PhasePoint(std::vector<int> c) : coords(std::move(c)) {}
  PhasePoint(int x, int p) : coords{x, p} {}

  int x(int system) const { return coords[2 * system]; }
  int p(int system) const { return coords[2 * system + 1]; }
  std::size_t systems() const { return coords.size() / 2; }

  friend bool operator==(const PhasePoint& a, const PhasePoint& b) { return a.coords == b.coords; }
  friend bool operator!=(const PhasePoint& a, const PhasePoint& b) { return !(a == b); }
};

inline PhasePoint reduce(const PhaseSpace& space, const PhasePoint& pt) {
  PhasePoint out = pt;
  for (auto& c : out.coords) c = imod(c, space.d);
  return out;
}

inline void check_point(const PhaseSpace& space, const PhasePoint& pt) {
  if (pt.coords.size() != static_cast<std::size_t>(2 * space.n))
    throw ShapeError("phase point has wrong coordinate count");
}

// Lexicographic index over interleaved coordinates, last coordinate fastest:
// for (d=2, n=1) the order is (0,0), (0,1), (1,0), (1,1).
inline std::size_t point_index(const PhaseSpace& space, const PhasePoint& pt) {
  check_point(space, pt);
  std::size_t idx = 0;
  for (int c : pt.coords) idx = idx * space.d + static_cast<std::size_t>(imod(c, space.d));
  return idx;
}

inline PhasePoint point_at(const PhaseSpace& space, std::size_t index) {
  std::vector<int> coords(2 * space.n);
  for (int i = 2 * space.n - 1; i >= 0; --i) {
    coords[i] = static_cast<int>(index % space.d);
    index /= space.d;
  }
  return PhasePoint(std::move(coords));
}

inline std::vector<PhasePoint> enumerate_points(const PhaseSpace& space) {
  std::vector<PhasePoint> pts;
  pts.reserve(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) pts.push_back(point_at(space, i));
  return pts;
}

/// Symplectic form [a,b] = a^T J b mod d with J = block-diag of [[0,1],[-1,0]].
inline int symplectic_form(const PhaseSpace& space, const PhasePoint& a, const PhasePoint& b) {
  check_point(space, a);
  check_point(space, b);
  long long s = 0;
  for (int i = 0; i < space.n; ++i)
    s += static_cast<long long>(a.x(i)) * b.p(i) - static_cast<long long>(a.p(i)) * b.x(i);
  return imod(s, space.d);
}

/// Small integer matrix with entries mod d.
struct IntMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<int> entries;

  IntMatrix() = default;
  IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), entries(r * c, 0) {}
  IntMatrix(std::size_t r, std::size_t c, std::vector<int> e)
      : rows(r), cols(c), entries(std::move(e)) {
    if (entries.size() != rows * cols) throw ShapeError("IntMatrix: bad entry count");
  }

  static IntMatrix identity(std::size_t dim) {
    IntMatrix m(dim, dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1;
    return m;
  }

  int& operator()(std::size_t r, std::size_t c) { return entries[r * cols + c]; }
  int operator()(std::size_t r, std::size_t c) const { return entries[r * cols + c]; }

  friend bool operator==(const IntMatrix& a, const IntMatrix& b) {
    return a.rows == b.rows && a.cols == b.cols && a.entries == b.entries;
  }
};

inline IntMatrix mod_reduce(const IntMatrix& m, int d) {
  IntMatrix out = m;
  for (auto& e : out.entries) e = imod(e, d);
  return out;
}

inline IntMatrix mod_matmul(const IntMatrix& a, const IntMatrix& b, int d) {
  if (a.cols != b.rows) throw ShapeError("mod_matmul: shape mismatch");
  IntMatrix out(a.rows, b.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t k = 0; k < a.cols; ++k) {
      if (a(i, k) == 0) continue;
      for (std::size_t j = 0; j < b.cols; ++j)
        out(i, j) = imod(out(i, j) + static_cast<long long>(a(i, k)) * b(k, j), d);
    }
  return out;
}

inline IntMatrix standard_j(int n) {
  IntMatrix j(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    j(2 * i, 2 * i + 1) = 1;
    j(2 * i + 1, 2 * i) = -1;  // reduced by callers mod d
  }
  return j;
}

/// True iff S^T J S == J mod d.
inline bool is_symplectic(const PhaseSpace& space, const IntMatrix& s) {
  const std::size_t m = 2 * static_cast<std::size_t>(space.n);
  if (s.rows != m || s.cols != m) return false;
  IntMatrix st(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) st(i, j) = s(j, i);
  const IntMatrix j = mod_reduce(standard_j(space.n), space.d);
  return mod_matmul(mod_matmul(st, j, space.d), mod_reduce(s, space.d), space.d) == j;
}

/// All symplectic matrices over Z_d^{2n}, in lexicographic entry order.
/// Brute force; feasible only for the enumerated desk-scale spaces.
inline std::vector<IntMatrix> enumerate_symplectic(const PhaseSpace& space) {
  const bool supported = (space.d == 2 && space.n == 1) || (space.d == 3 && space.n == 1) ||
                         (space.d == 2 && space.n == 2);
  if (!supported)
    throw CapabilityError("enumerate_symplectic: supported for (d,n) in {(2,1),(3,1),(2,2)} only");
  const std::size_t m = 2 * static_cast<std::size_t>(space.n);
  const std::size_t cells = m * m;
  std::size_t total = 1;
  for (std::size_t i = 0; i < cells; ++i) total *= static_cast<std::size_t>(space.d);

  std::vector<IntMatrix> out;
  IntMatrix cand(m, m);
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t v = code;
    for (std::size_t i = cells; i-- > 0;) {
      cand.entries[i] = static_cast<int>(v % space.d);
      v /= space.d;
    }
    if (is_symplectic(space, cand)) out.push_back(cand);
  }
  return out;
}

/// Affine symplectic motion lambda -> S lambda + a mod d.
struct AffineSymplectic {
  IntMatrix linear;
  PhasePoint shift;

  AffineSymplectic() = default;
  AffineSymplectic(IntMatrix s, PhasePoint a) : linear(std::move(s)), shift(std::move(a)) {}
};

inline AffineSymplectic make_affine(const PhaseSpace& space, IntMatrix s, PhasePoint a) {
  if (!is_symplectic(space, s)) throw ValidationError("make_affine: matrix is not symplectic");
  check_point(space, a);
  return AffineSymplectic(mod_reduce(std::move(s), space.d), reduce(space, a));
}

inline PhasePoint apply_affine(const PhaseSpace& space, const AffineSymplectic& m,
                               const PhasePoint& pt) {
  check_point(space, pt);
  if (m.linear.rows != pt.coords.size()) throw ShapeError("apply_affine: dimension mismatch");
  std::vector<int> out(pt.coords.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    long long acc = m.shift.coords.empty() ? 0 : m.shift.coords[i];
    for (std::size_t j = 0; j < out.size(); ++j)
      acc += static_cast<long long>(m.linear(i, j)) * pt.coords[j];
    out[i] = imod(acc, space.d);
  }
  return PhasePoint(std::move(out));
}

inline std::string format_point(const PhasePoint& pt) {
  std::string s = "(";
  for (std::size_t i = 0; i < pt.coords.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(pt.coords[i]);
  }
  return s + ")";
}

}  // namespace psc
