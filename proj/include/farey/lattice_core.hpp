#pragma once

// Integer primitives, the horosphere/torus matrix families, unimodular
// completion and the scaled regions used by the counting statistics.
//
// Convention: vectors are rows and matrices act on the right, so a lattice
// point (p, q) is mapped to (p, q) * h(x) * a(Q).

#include <algorithm>
#include <cmath>
#include <numbers>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "farey/checked.hpp"

namespace farey {

using IntRow = std::vector<std::int64_t>;

/// gcd of all entries; 0 for an empty or all-zero row.
inline std::int64_t gcd_all(std::span<const std::int64_t> v) {
  std::int64_t g = 0;
  for (auto x : v) {
    g = std::gcd(g, x);
    if (g == 1) break;
  }
  return g;
}

inline bool is_primitive(std::span<const std::int64_t> v) { return gcd_all(v) == 1; }

/// (p, q) with gcd(p_1, ..., p_n, q) = 1 and q >= 1.
struct PrimitivePoint {
  IntRow p;
  std::int64_t q = 1;

  static PrimitivePoint make(IntRow p, std::int64_t q) {
    if (q < 1) throw ValidationError("q", "denominator must be >= 1");
    IntRow full = p;
    full.push_back(q);
    if (!is_primitive(full)) throw ValidationError("p", "point is not primitive");
    return PrimitivePoint{std::move(p), q};
  }

  std::size_t dim() const { return p.size(); }
  IntRow row() const {
    IntRow r = p;
    r.push_back(q);
    return r;
  }
};

// ---------------------------------------------------------------------------
// Dense matrices

template <class T>
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}

  static DenseMatrix identity(int order) {
    DenseMatrix m(order, order);
    for (int i = 0; i < order; ++i) m(i, i) = T{1};
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const T& operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  std::span<const T> row(int r) const {
    return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
  }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

using Matrix = DenseMatrix<double>;
using IntMatrix = DenseMatrix<std::int64_t>;

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw ValidationError("matrix", "shape mismatch in product");
  Matrix r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

/// Row vector times matrix.
inline std::vector<double> operator*(std::span<const double> v, const Matrix& m) {
  if (static_cast<int>(v.size()) != m.rows())
    throw ValidationError("vector", "shape mismatch in row-vector product");
  std::vector<double> r(m.cols(), 0.0);
  for (int k = 0; k < m.rows(); ++k)
    for (int j = 0; j < m.cols(); ++j) r[j] += v[k] * m(k, j);
  return r;
}

inline IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) {
  if (a.cols() != b.rows()) throw ValidationError("matrix", "shape mismatch in product");
  IntMatrix r(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      __int128 s = 0;
      for (int k = 0; k < a.cols(); ++k) s += static_cast<__int128>(a(i, k)) * b(k, j);
      r(i, j) = checked::narrow(s);
    }
  return r;
}

inline Matrix to_real(const IntMatrix& m) {
  Matrix r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = static_cast<double>(m(i, j));
  return r;
}

/// Determinant by partial-pivot elimination.
inline double determinant(Matrix m) {
  if (m.rows() != m.cols()) throw ValidationError("matrix", "determinant of non-square matrix");
  const int n = m.rows();
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
    if (m(piv, c) == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < n; ++j) std::swap(m(piv, j), m(c, j));
      det = -det;
    }
    det *= m(c, c);
    for (int r = c + 1; r < n; ++r) {
      const double f = m(r, c) / m(c, c);
      for (int j = c; j < n; ++j) m(r, j) -= f * m(c, j);
    }
  }
  return det;
}

/// Exact determinant of an integer matrix (Bareiss fraction-free elimination).
inline std::int64_t determinant(const IntMatrix& in) {
  if (in.rows() != in.cols()) throw ValidationError("matrix", "determinant of non-square matrix");
  const int n = in.rows();
  if (n == 0) return 1;
  std::vector<__int128> m(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m[i * n + j] = in(i, j);
  int sign = 1;
  __int128 prev = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m[k * n + k] == 0) {
      int swap_row = -1;
      for (int r = k + 1; r < n; ++r)
        if (m[r * n + k] != 0) {
          swap_row = r;
          break;
        }
      if (swap_row < 0) return 0;
      for (int j = 0; j < n; ++j) std::swap(m[k * n + j], m[swap_row * n + j]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) {
        const __int128 num = checked::mul128(m[i * n + j], m[k * n + k]) -
                             checked::mul128(m[i * n + k], m[k * n + j]);
        m[i * n + j] = num / prev;
      }
    prev = m[k * n + k];
  }
  return checked::narrow(sign * m[(n - 1) * n + (n - 1)]);
}

inline Matrix inverse(const Matrix& in) {
  if (in.rows() != in.cols()) throw ValidationError("matrix", "inverse of non-square matrix");
  const int n = in.rows();
  Matrix a = in;
  Matrix inv = Matrix::identity(n);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(piv, c))) piv = r;
    if (a(piv, c) == 0.0) throw ValidationError("matrix", "singular matrix");
    for (int j = 0; j < n; ++j) {
      std::swap(a(piv, j), a(c, j));
      std::swap(inv(piv, j), inv(c, j));
    }
    const double d = a(c, c);
    for (int j = 0; j < n; ++j) {
      a(c, j) /= d;
      inv(c, j) /= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = a(r, c);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        a(r, j) -= f * a(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

// ---------------------------------------------------------------------------
// Matrix families

/// h(x): identity with bottom row (-x, 1).
inline Matrix h_matrix(std::span<const double> x) {
  const int n = static_cast<int>(x.size());
  Matrix m = Matrix::identity(n + 1);
  for (int j = 0; j < n; ++j) m(n, j) = -x[j];
  return m;
}

/// a(y) = diag(y^{1/n} I_n, 1/y).
inline Matrix a_matrix(int n, double y) {
  if (n < 1) throw ValidationError("n", "dimension must be >= 1");
  if (!(y > 0.0)) throw ValidationError("y", "a(y) requires y > 0");
  Matrix m(n + 1, n + 1);
  const double s = std::pow(y, 1.0 / n);
  for (int i = 0; i < n; ++i) m(i, i) = s;
  m(n, n) = 1.0 / y;
  return m;
}

/// m(y) = diag((y_1...y_n)^{-1/n} diag(y), 1).
inline Matrix m_matrix(std::span<const double> y) {
  const int n = static_cast<int>(y.size());
  if (n < 1) throw ValidationError("y", "m(y) requires a nonempty vector");
  double log_prod = 0.0;
  for (double v : y) {
    if (!(v > 0.0)) throw ValidationError("y", "m(y) requires all components > 0");
    log_prod += std::log(v);
  }
  const double scale = std::exp(-log_prod / n);
  Matrix m(n + 1, n + 1);
  for (int i = 0; i < n; ++i) m(i, i) = scale * y[i];
  m(n, n) = 1.0;
  return m;
}

/// h^dagger(y): identity with last column (y, 1); the inverse transpose of h(y).
inline Matrix h_dagger(std::span<const double> y) {
  const int n = static_cast<int>(y.size());
  Matrix m = Matrix::identity(n + 1);
  for (int i = 0; i < n; ++i) m(i, n) = y[i];
  return m;
}

/// The row (p, q) h(x) a(Q) = (Q^{1/n}(p - q x), q / Q), formed by matrix products.
inline std::vector<double> horosphere_image(std::span<const std::int64_t> p, std::int64_t q,
                                            std::span<const double> x, double Q) {
  const int n = static_cast<int>(p.size());
  std::vector<double> row(n + 1);
  for (int i = 0; i < n; ++i) row[i] = static_cast<double>(p[i]);
  row[n] = static_cast<double>(q);
  return std::span<const double>(row) * (h_matrix(x) * a_matrix(n, Q));
}

namespace detail {

// Returns (g, s, t) with s a + t b = g = gcd(a, b) >= 0.
inline void ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& g, std::int64_t& s,
                    std::int64_t& t) {
  std::int64_t old_r = a, r = b, old_s = 1, cur_s = 0, old_t = 0, cur_t = 1;
  while (r != 0) {
    const std::int64_t quo = old_r / r;
    std::int64_t tmp = checked::sub(old_r, checked::mul(quo, r));
    old_r = r;
    r = tmp;
    tmp = checked::sub(old_s, checked::mul(quo, cur_s));
    old_s = cur_s;
    cur_s = tmp;
    tmp = checked::sub(old_t, checked::mul(quo, cur_t));
    old_t = cur_t;
    cur_t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  g = old_r;
  s = old_s;
  t = old_t;
}

}  // namespace detail

/// gamma in SL(n+1, Z) with gamma * a^t = e_{n+1}^t.
///
/// Row operations with determinant-one 2x2 extended-gcd blocks fold every
/// entry into the last position; accumulated on the identity they give gamma.
inline IntMatrix complete_to_unimodular(std::span<const std::int64_t> a) {
  const int k = static_cast<int>(a.size());
  if (k < 1) throw ValidationError("a", "empty row");
  if (gcd_all(a) != 1) throw ValidationError("a", "row is not primitive");
  IntRow v(a.begin(), a.end());
  IntMatrix gamma = IntMatrix::identity(k);
  const int last = k - 1;
  for (int j = 0; j < last; ++j) {
    if (v[j] == 0) continue;
    std::int64_t g, s, t;
    detail::ext_gcd(v[last], v[j], g, s, t);
    const std::int64_t u = v[j] / g;     // coefficient of old row `last` in new row j (negated)
    const std::int64_t w = v[last] / g;  // coefficient of old row j in new row j
    for (int c = 0; c < k; ++c) {
      const std::int64_t rl = gamma(last, c), rj = gamma(j, c);
      gamma(last, c) = checked::add(checked::mul(s, rl), checked::mul(t, rj));
      gamma(j, c) = checked::sub(checked::mul(w, rj), checked::mul(u, rl));
    }
    v[last] = g;
    v[j] = 0;
  }
  // gcd is 1, so v[last] == 1 here.
  return gamma;
}

// ---------------------------------------------------------------------------
// Test sets and regions

/// A bounded box or Euclidean ball in R^n.
struct TestSet {
  enum class Shape { Box, Ball };
  Shape shape = Shape::Box;
  std::vector<double> lo, hi;  // box bounds
  std::vector<double> center;  // ball
  double radius = 0.0;

  static TestSet box(std::vector<double> lo, std::vector<double> hi) {
    if (lo.size() != hi.size() || lo.empty())
      throw ValidationError("box", "box bounds must have equal nonzero length");
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (!(hi[i] > lo[i])) throw ValidationError("box", "box must have nonempty interior");
    TestSet t;
    t.shape = Shape::Box;
    t.lo = std::move(lo);
    t.hi = std::move(hi);
    return t;
  }

  static TestSet ball(std::vector<double> center, double radius) {
    if (center.empty()) throw ValidationError("ball", "ball center must be nonempty");
    if (!(radius > 0.0)) throw ValidationError("ball", "ball radius must be > 0");
    TestSet t;
    t.shape = Shape::Ball;
    t.center = std::move(center);
    t.radius = radius;
    return t;
  }

  int dim() const { return static_cast<int>(shape == Shape::Box ? lo.size() : center.size()); }

  bool contains(std::span<const double> v) const {
    if (shape == Shape::Box) {
      for (std::size_t i = 0; i < lo.size(); ++i)
        if (v[i] < lo[i] || v[i] > hi[i]) return false;
      return true;
    }
    double s = 0.0;
    for (std::size_t i = 0; i < center.size(); ++i) s += (v[i] - center[i]) * (v[i] - center[i]);
    return s <= radius * radius;
  }

  double volume() const {
    if (shape == Shape::Box) {
      double v = 1.0;
      for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
      return v;
    }
    const int n = dim();
    return std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0 + 1.0) * std::pow(radius, n);
  }

  double diameter() const {
    if (shape == Shape::Ball) return 2.0 * radius;
    double s = 0.0;
    for (std::size_t i = 0; i < lo.size(); ++i) s += (hi[i] - lo[i]) * (hi[i] - lo[i]);
    return std::sqrt(s);
  }

  std::vector<double> bbox_lo() const {
    if (shape == Shape::Box) return lo;
    std::vector<double> r = center;
    for (auto& x : r) x -= radius;
    return r;
  }

  std::vector<double> bbox_hi() const {
    if (shape == Shape::Box) return hi;
    std::vector<double> r = center;
    for (auto& x : r) x += radius;
    return r;
  }
};

/// The regions C(A), E_{alpha,c} and K_alpha in R^{n+1} = R^n x R.
struct Region {
  enum class Kind { C, E, K };
  Kind kind = Kind::K;
  int n = 1;
  double alpha = 0.0;  // E, K
  double c = 0.0;      // E
  double scale = 0.0;  // C: sigma_{A,1}^{-1/n}
  TestSet test_set;    // C

  static Region cone(TestSet a, double scale) {
    if (!(scale > 0.0)) throw ValidationError("scale", "scale must be > 0");
    Region r;
    r.kind = Kind::C;
    r.n = a.dim();
    r.scale = scale;
    r.test_set = std::move(a);
    return r;
  }

  static Region est(int n, double alpha, double c) {
    if (!(alpha > 0.0)) throw ValidationError("alpha", "alpha must be > 0");
    if (!(c > 1.0)) throw ValidationError("c", "c must be > 1");
    Region r;
    r.kind = Kind::E;
    r.n = n;
    r.alpha = alpha;
    r.c = c;
    return r;
  }

  static Region kesten(int n, double alpha) {
    if (!(alpha > 0.0)) throw ValidationError("alpha", "alpha must be > 0");
    Region r;
    r.kind = Kind::K;
    r.n = n;
    r.alpha = alpha;
    return r;
  }
};

/// Indicator of the region at `point` = (x, y). `tol` relaxes every defining
/// inequality by that amount (0 gives the exact closed region).
inline bool region_contains(const Region& r, std::span<const double> point, double tol = 0.0) {
  if (static_cast<int>(point.size()) != r.n + 1)
    throw ValidationError("point", "point dimension does not match region");
  const double y = point[r.n];
  const auto x = point.first(r.n);
  auto norm = [&] {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
  };
  switch (r.kind) {
    case Region::Kind::C: {
      if (!(y > -tol) || y > 1.0 + tol) return false;
      if (y <= 0.0) return false;
      std::vector<double> u(x.begin(), x.end());
      for (auto& v : u) v /= r.scale * y;
      return r.test_set.contains(u);
    }
    case Region::Kind::E:
      if (y < 1.0 - tol || y > r.c + tol) return false;
      return std::pow(std::abs(y), 1.0 / r.n) * norm() <= r.alpha + tol;
    case Region::Kind::K:
      if (y < -tol || y > 1.0 + tol) return false;
      return norm() <= r.alpha + tol;
  }
  return false;
}

}  // namespace farey
