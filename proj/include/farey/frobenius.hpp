#pragma once

// Frobenius numbers, the unimodular lattice attached to a primitive vector,
// covering radii of the standard simplex, and ensemble censuses of
// normalized Frobenius numbers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "farey/checked.hpp"
#include "farey/congruence.hpp"
#include "farey/lattice_core.hpp"
#include "farey/parallel.hpp"

namespace farey {

namespace detail {

inline void check_frobenius_input(std::span<const std::int64_t> a) {
  if (a.size() < 2) throw ValidationError("--a", "need at least two entries");
  for (auto v : a)
    if (v < 2) throw ValidationError("--a", "entries must be >= 2");
  if (gcd_all(a) != 1) throw ValidationError("--a", "entries are not coprime");
}

// Round-robin shortest-path table (Apery set with respect to a[0], the
// smallest entry). `table` is scratch storage reused across calls.
inline std::int64_t frobenius_round_robin(std::span<const std::int64_t> sorted,
                                          std::vector<std::int64_t>& table) {
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();
  const std::int64_t base = sorted[0];
  table.assign(static_cast<std::size_t>(base), kInf);
  table[0] = 0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const std::int64_t ai = sorted[i];
    const std::int64_t d = std::gcd(base, ai);
    const std::int64_t step = ai % base;
    for (std::int64_t r = 0; r < d; ++r) {
      // Minimum over the residue class r mod d.
      std::int64_t best = kInf, at = -1;
      for (std::int64_t q = r; q < base; q += d)
        if (table[q] < best) {
          best = table[q];
          at = q;
        }
      if (best == kInf) continue;
      std::int64_t pos = at;
      for (std::int64_t k = 0; k < base / d; ++k) {
        best = checked::add(best, ai);
        pos += step;
        if (pos >= base) pos -= base;
        if (table[pos] < best) best = table[pos];
        table[pos] = best;
      }
    }
  }
  std::int64_t top = 0;
  for (auto v : table) top = std::max(top, v);
  return top - base;
}

}  // namespace detail

/// Largest integer not representable as a nonnegative integer combination
/// of the entries. Entries must be >= 2 and coprime.
inline std::int64_t frobenius_number(std::span<const std::int64_t> a) {
  detail::check_frobenius_input(a);
  IntRow sorted(a.begin(), a.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::int64_t> table;
  return detail::frobenius_round_robin(sorted, table);
}

/// Basis rows of a unimodular lattice in R^n, with the vector it came from.
struct LatticeBasis {
  Matrix rows;
  IntRow source;

  int dim() const { return rows.rows(); }
};

/// (a_1 ... a_{n+1})^{1/n}, in floating point.
inline double product_root(std::span<const std::int64_t> a) {
  const int n = static_cast<int>(a.size()) - 1;
  long double log_prod = 0.0L;
  for (auto v : a) log_prod += std::log(static_cast<long double>(v));
  return static_cast<double>(std::exp(log_prod / n));
}

/// B = (a_1...a_{n+1})^{-1/n} G diag(a_1, ..., a_n), where G is the top-left
/// n x n block of a completion gamma with gamma a^t = e_{n+1}. The rows of G
/// span {z in Z^n : a' . z = 0 mod a_{n+1}}, and det G = a_{n+1}.
inline LatticeBasis associated_lattice(std::span<const std::int64_t> a) {
  if (a.size() < 2) throw ValidationError("--a", "need at least two entries");
  for (auto v : a)
    if (v < 1) throw ValidationError("--a", "entries must be positive");
  const IntMatrix gamma = complete_to_unimodular(a);
  const int n = static_cast<int>(a.size()) - 1;
  const double c = 1.0 / product_root(a);
  LatticeBasis b{Matrix(n, n), IntRow(a.begin(), a.end())};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      b.rows(i, j) = c * static_cast<double>(gamma(i, j)) * static_cast<double>(a[j]);
  return b;
}

struct CoveringRadius {
  double value = 0.0;        // grid estimate, a lower bound
  double upper_bound = 0.0;  // certified: true radius lies in [value, upper_bound]
  std::int64_t grid = 0;     // points per basis direction (0 for exact results)
};

namespace detail {

struct Window {
  std::vector<double> l1, l2, sum;  // sorted by sum, descending
};

// Lattice points l with l <= x and e.(x - l) <= rho_up for some x in the
// fundamental parallelogram spanned by b1, b2.
inline Window covering_window(const double b1[2], const double b2[2], double rho_up) {
  const double vx[4] = {0.0, b1[0], b2[0], b1[0] + b2[0]};
  const double vy[4] = {0.0, b1[1], b2[1], b1[1] + b2[1]};
  const double pad = 1e-9 * (1.0 + rho_up);
  const double lo0 = *std::min_element(vx, vx + 4) - rho_up - pad;
  const double hi0 = *std::max_element(vx, vx + 4) + pad;
  const double lo1 = *std::min_element(vy, vy + 4) - rho_up - pad;
  const double hi1 = *std::max_element(vy, vy + 4) + pad;

  Matrix basis(2, 2);
  basis(0, 0) = b1[0];
  basis(0, 1) = b1[1];
  basis(1, 0) = b2[0];
  basis(1, 1) = b2[1];
  const Matrix inv = inverse(basis);
  double zmin[2] = {1e300, 1e300}, zmax[2] = {-1e300, -1e300};
  for (double cx : {lo0, hi0})
    for (double cy : {lo1, hi1})
      for (int k = 0; k < 2; ++k) {
        const double z = cx * inv(0, k) + cy * inv(1, k);
        zmin[k] = std::min(zmin[k], z);
        zmax[k] = std::max(zmax[k], z);
      }
  struct P {
    double x, y, s;
  };
  std::vector<P> pts;
  for (auto i = static_cast<std::int64_t>(std::floor(zmin[0])) - 1;
       i <= static_cast<std::int64_t>(std::ceil(zmax[0])) + 1; ++i)
    for (auto j = static_cast<std::int64_t>(std::floor(zmin[1])) - 1;
         j <= static_cast<std::int64_t>(std::ceil(zmax[1])) + 1; ++j) {
      const double x = i * b1[0] + j * b2[0];
      const double y = i * b1[1] + j * b2[1];
      if (x >= lo0 && x <= hi0 && y >= lo1 && y <= hi1) pts.push_back({x, y, x + y});
    }
  std::sort(pts.begin(), pts.end(), [](const P& a, const P& b) { return a.s > b.s; });
  Window w;
  for (const auto& p : pts) {
    w.l1.push_back(p.x);
    w.l2.push_back(p.y);
    w.sum.push_back(p.s);
  }
  return w;
}

// max over the grid {(i/N) b1 + (j/N) b2} of min_{l < x} e.(x - l), the
// left limit of the gauge distance. It is never below the gauge distance
// itself and never above its supremum, so the certified bounds still hold.
inline double covering_grid_pass(const double b1[2], const double b2[2], std::int64_t N,
                                 double rho_up, unsigned threads) {
  const Window w = covering_window(b1, b2, rho_up);
  const double eps = 1e-12 * (1.0 + std::abs(b1[0]) + std::abs(b1[1]) + std::abs(b2[0]) +
                              std::abs(b2[1]));
  std::vector<double> row_max(static_cast<std::size_t>(N), 0.0);
  parallel_for(static_cast<std::size_t>(N), threads, [&](std::size_t i) {
    const double u = static_cast<double>(i) / N;
    double best = 0.0;
    for (std::int64_t j = 0; j < N; ++j) {
      const double v = static_cast<double>(j) / N;
      const double x = u * b1[0] + v * b2[0];
      const double y = u * b1[1] + v * b2[1];
      const double s = x + y;
      // First candidate with e.l < e.x.
      auto it = std::lower_bound(w.sum.begin(), w.sum.end(), s - eps,
                                 [](double a, double b) { return a > b; });
      std::size_t k = static_cast<std::size_t>(it - w.sum.begin());
      double f = -1.0;
      for (; k < w.sum.size(); ++k) {
        if (w.l1[k] < x - eps && w.l2[k] < y - eps) {
          f = s - w.sum[k];
          break;
        }
      }
      if (f < 0.0) throw std::logic_error("covering radius window does not cover a grid point");
      best = std::max(best, f);
    }
    row_max[i] = best;
  });
  return *std::max_element(row_max.begin(), row_max.end());
}

// Lagrange-Gauss reduction of a 2D basis.
inline void reduce_2d(double b1[2], double b2[2]) {
  auto dot = [](const double a[2], const double b[2]) { return a[0] * b[0] + a[1] * b[1]; };
  if (dot(b1, b1) > dot(b2, b2)) std::swap_ranges(b1, b1 + 2, b2);
  for (int iter = 0; iter < 200; ++iter) {
    const double mu = std::round(dot(b1, b2) / dot(b1, b1));
    b2[0] -= mu * b1[0];
    b2[1] -= mu * b1[1];
    if (dot(b2, b2) >= dot(b1, b1)) return;
    std::swap_ranges(b1, b1 + 2, b2);
  }
}

}  // namespace detail

/// Covering radius of the simplex {x >= 0, sum x <= 1} with respect to the
/// lattice Z^n B (rows of B are basis vectors).
///
/// n = 1 is exact. For n = 2 the gauge distance f(x) = min over lattice
/// points l <= x of sum(x - l) is maximized over a grid with spacing h in the
/// coordinates of a reduced basis. Because the grid is itself the lattice
/// scaled by 1/N (N = ceil(1/h)), every x has a grid point s <= x with
/// sum(x - s) <= rho/N, so the estimate lies in [rho (1 - 1/N), rho].
inline CoveringRadius covering_radius(const LatticeBasis& basis, double h = 1e-3,
                                      unsigned threads = 0) {
  const int n = basis.dim();
  if (n < 1 || basis.rows.cols() != n) throw ValidationError("basis", "basis must be square");
  if (n > 2) throw ValidationError("basis", "covering radius is implemented for n <= 2");
  if (!(h > 0.0) || h >= 1.0) throw ValidationError("--h", "grid spacing must be in (0, 1)");
  const double det = determinant(basis.rows);
  if (!(std::abs(det) > 1e-12)) throw ValidationError("basis", "degenerate basis");
  if (n == 1) {
    const double v = std::abs(basis.rows(0, 0));
    return {v, v, 0};
  }
  double b1[2] = {basis.rows(0, 0), basis.rows(0, 1)};
  double b2[2] = {basis.rows(1, 0), basis.rows(1, 1)};
  detail::reduce_2d(b1, b2);

  // A fundamental parallelogram translated into the positive quadrant sits
  // inside (width_x + width_y) times the simplex, which bounds the radius.
  const double xs[4] = {0.0, b1[0], b2[0], b1[0] + b2[0]};
  const double ys[4] = {0.0, b1[1], b2[1], b1[1] + b2[1]};
  double a_priori = 0.0;
  const double mx = *std::min_element(xs, xs + 4), my = *std::min_element(ys, ys + 4);
  for (int k = 0; k < 4; ++k) a_priori = std::max(a_priori, xs[k] - mx + ys[k] - my);

  constexpr std::int64_t kCoarse = 24;
  const double coarse = detail::covering_grid_pass(b1, b2, kCoarse, a_priori, threads);
  const double rho_up = std::min(a_priori, coarse * kCoarse / (kCoarse - 1.0)) * (1.0 + 1e-9);
  const auto N = static_cast<std::int64_t>(std::ceil(1.0 / h - 1e-9));
  const double value = detail::covering_grid_pass(b1, b2, N, rho_up, threads);
  return {value, value * N / (N - 1.0), N};
}

struct IdentityCheck {
  std::int64_t frobenius = 0;
  std::int64_t entry_sum = 0;
  double lhs = 0.0;        // F(a) + sum a
  double rhs = 0.0;        // (prod a)^{1/n} * covering radius estimate
  double residual = 0.0;   // |lhs - rhs|
  double relative = 0.0;   // residual / lhs
  double rhs_upper = 0.0;  // rhs from the certified upper bound
};

/// Compares F(a) + sum a with the scaled covering radius of the associated lattice.
inline IdentityCheck identity_check(std::span<const std::int64_t> a, double h = 1e-3,
                                    unsigned threads = 0) {
  detail::check_frobenius_input(a);
  if (a.size() > 3) throw ValidationError("--a", "identity check supports n <= 2");
  IdentityCheck r;
  r.frobenius = frobenius_number(a);
  for (auto v : a) r.entry_sum = checked::add(r.entry_sum, v);
  const auto rho = covering_radius(associated_lattice(a), h, threads);
  const double scale = product_root(a);
  r.lhs = static_cast<double>(r.frobenius + r.entry_sum);
  r.rhs = scale * rho.value;
  r.rhs_upper = scale * rho.upper_bound;
  r.residual = std::abs(r.lhs - r.rhs);
  r.relative = r.residual / r.lhs;
  return r;
}

// ---------------------------------------------------------------------------
// Census

struct CensusConfig {
  int n = 2;
  std::int64_t T = 100;
  std::vector<double> lo, hi;  // the box D, n+1 coordinates
  ResidueSystem sys = ResidueSystem::full(2);
  std::vector<double> r_grid;
  unsigned threads = 0;
};

/// Tail frequencies #{normalized F > R} on a grid of R.
struct PsiEstimate {
  std::vector<double> r;
  std::vector<std::int64_t> tail;
  std::vector<double> tail_norm;  // tail / T^{n+1}
  std::int64_t total = 0;
};

struct CensusResult {
  CensusConfig config;
  std::vector<double> restricted;  // sorted normalized F(a)/(prod a)^{1/n}
  std::vector<double> full;
  PsiEstimate restricted_psi;
  PsiEstimate full_psi;
};

inline PsiEstimate tail_profile(const std::vector<double>& sorted, const std::vector<double>& grid,
                                int n, std::int64_t T) {
  PsiEstimate p;
  p.total = static_cast<std::int64_t>(sorted.size());
  const double volume = std::pow(static_cast<double>(T), n + 1);
  for (double R : grid) {
    const auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), R);
    p.r.push_back(R);
    p.tail.push_back(static_cast<std::int64_t>(above));
    p.tail_norm.push_back(static_cast<double>(above) / volume);
  }
  return p;
}

/// Two-sample Kolmogorov-Smirnov statistic of sorted samples.
inline double ks_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.empty() || b.empty()) throw ValidationError("samples", "empty sample");
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  return d;
}

/// Computes normalized Frobenius numbers over primitive a with entries >= 2
/// in T*D, for the full ensemble and the residue-restricted one. Work is
/// split by the first coordinate; partitions are merged in order.
inline CensusResult frobenius_census(const CensusConfig& cfg) {
  const int n = cfg.n;
  const int k = n + 1;
  if (n < 2) throw ValidationError("--n", "the census requires n >= 2");
  if (cfg.T < 1) throw ValidationError("--t", "T must be >= 1");
  if (static_cast<int>(cfg.lo.size()) != k || static_cast<int>(cfg.hi.size()) != k)
    throw ValidationError("--domain", "domain must have n+1 coordinate ranges");
  if (cfg.sys.n() != n) throw ValidationError("--class", "class rows must have n+1 entries");
  std::vector<std::int64_t> first(k), last(k);
  for (int i = 0; i < k; ++i) {
    if (cfg.lo[i] < 0.0 || !(cfg.hi[i] >= cfg.lo[i]))
      throw ValidationError("--domain", "domain must be a box in the nonnegative orthant");
    first[i] = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::ceil(cfg.T * cfg.lo[i])));
    last[i] = static_cast<std::int64_t>(std::floor(cfg.T * cfg.hi[i]));
  }
  // Products must fit comfortably; the normalization itself runs in floating point.
  __int128 prod = 1;
  for (int i = 0; i < k; ++i) prod = checked::mul128(prod, std::max<std::int64_t>(last[i], 1));
  (void)checked::narrow(prod);

  const std::int64_t parts = std::max<std::int64_t>(0, last[0] - first[0] + 1);
  std::vector<std::vector<double>> full_parts(parts), restricted_parts(parts);
  parallel_for(static_cast<std::size_t>(parts), cfg.threads, [&](std::size_t part) {
    IntRow a(k), sorted(k);
    std::vector<std::int64_t> table;
    std::vector<std::int64_t> g(k + 1);
    a[0] = first[0] + static_cast<std::int64_t>(part);
    for (int i = 1; i < k; ++i) {
      if (first[i] > last[i]) return;
      a[i] = first[i];
    }
    g[0] = 0;
    for (int i = 0; i < k; ++i) g[i + 1] = std::gcd(g[i], a[i]);
    auto& out_full = full_parts[part];
    auto& out_restricted = restricted_parts[part];
    for (;;) {
      if (g[k] == 1) {
        std::copy(a.begin(), a.end(), sorted.begin());
        std::sort(sorted.begin(), sorted.end());
        const std::int64_t F = detail::frobenius_round_robin(sorted, table);
        const double normalized = static_cast<double>(F) / product_root(a);
        out_full.push_back(normalized);
        if (cfg.sys.contains(a)) out_restricted.push_back(normalized);
      }
      int i = k - 1;
      while (i >= 1 && ++a[i] > last[i]) {
        a[i] = first[i];
        --i;
      }
      if (i < 1) break;
      for (int j = i; j < k; ++j) g[j + 1] = std::gcd(g[j], a[j]);
    }
  });
  CensusResult res;
  res.config = cfg;
  for (std::int64_t p = 0; p < parts; ++p) {
    res.full.insert(res.full.end(), full_parts[p].begin(), full_parts[p].end());
    res.restricted.insert(res.restricted.end(), restricted_parts[p].begin(),
                          restricted_parts[p].end());
  }
  std::sort(res.full.begin(), res.full.end());
  std::sort(res.restricted.begin(), res.restricted.end());
  res.full_psi = tail_profile(res.full, cfg.r_grid, n, cfg.T);
  res.restricted_psi = tail_profile(res.restricted, cfg.r_grid, n, cfg.T);
  return res;
}

}  // namespace farey
