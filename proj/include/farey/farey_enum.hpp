#pragma once

// Enumeration of restricted Farey sets F_A(Q) on the torus (R/mZ)^n.
//
// A point p/q is stored by its canonical representative p in [0, mq)^n.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <vector>

#include "farey/checked.hpp"
#include "farey/congruence.hpp"
#include "farey/lattice_core.hpp"
#include "farey/parallel.hpp"
#include "farey/zeta.hpp"

namespace farey {

/// Reduces every p_i into [0, mq).
inline IntRow canonical_representative(std::span<const std::int64_t> p, std::int64_t q,
                                       std::int64_t m) {
  const std::int64_t period = checked::mul(m, q);
  IntRow r(p.begin(), p.end());
  for (auto& v : r) v = ((v % period) + period) % period;
  return r;
}

/// Calls visit(p, q) for every point of F_A(Q) with q in [q_lo, q_hi], in
/// order of q, then lexicographic p.
template <class Visit>
void enumerate_range(int n, std::int64_t q_lo, std::int64_t q_hi, const ResidueSystem& sys,
                     Visit&& visit) {
  if (n != sys.n()) throw ValidationError("--n", "dimension does not match residue system");
  const std::int64_t m = sys.modulus();
  IntRow p(n, 0);
  std::vector<std::int64_t> g(n + 1);
  for (std::int64_t q = std::max<std::int64_t>(q_lo, 1); q <= q_hi; ++q) {
    const std::int64_t bound = checked::mul(m, q);
    if (n == 1) {
      for (std::int64_t v = 0; v < bound; ++v) {
        if (std::gcd(v, q) != 1) continue;
        p[0] = v;
        if (sys.contains(p, q)) visit(std::span<const std::int64_t>(p), q);
      }
      continue;
    }
    // Odometer over [0, bound)^n with prefix gcds g[i] = gcd(q, p_0..p_{i-1}).
    std::fill(p.begin(), p.end(), 0);
    g[0] = q;
    for (int i = 0; i < n; ++i) g[i + 1] = std::gcd(g[i], p[i]);
    for (;;) {
      if (g[n] == 1 && sys.contains(p, q)) visit(std::span<const std::int64_t>(p), q);
      int i = n - 1;
      while (i >= 0 && ++p[i] == bound) p[i--] = 0;
      if (i < 0) break;
      for (int j = i; j < n; ++j) g[j + 1] = std::gcd(g[j], p[j]);
    }
  }
}

template <class Visit>
void enumerate(int n, std::int64_t Q, const ResidueSystem& sys, Visit&& visit) {
  if (Q < 1) throw ValidationError("--q", "Q must be >= 1");
  enumerate_range(n, 1, Q, sys, std::forward<Visit>(visit));
}

/// #F_A(Q) by streaming enumeration, partitioned over q.
inline std::int64_t count_points(int n, std::int64_t Q, const ResidueSystem& sys,
                                 unsigned threads = 0) {
  if (Q < 1) throw ValidationError("--q", "Q must be >= 1");
  const std::size_t parts = static_cast<std::size_t>(std::min<std::int64_t>(Q, 64));
  std::vector<std::int64_t> counts(parts, 0);
  // Partition boundaries balance roughly q^n work per denominator.
  std::vector<std::int64_t> cut(parts + 1);
  for (std::size_t i = 0; i <= parts; ++i)
    cut[i] = static_cast<std::int64_t>(
        std::llround(Q * std::pow(static_cast<double>(i) / parts, 1.0 / (n + 1))));
  parallel_for(parts, threads, [&](std::size_t part) {
    std::int64_t c = 0;
    enumerate_range(n, cut[part] + 1, cut[part + 1], sys,
                    [&](std::span<const std::int64_t>, std::int64_t) { ++c; });
    counts[part] = c;
  });
  std::int64_t total = 0;
  for (auto c : counts) total = checked::add(total, c);
  return total;
}

/// A materialized F_A(Q). For n = 1 points are sorted by p/q ascending on
/// [0, m); otherwise they follow enumeration order.
class FareySet {
 public:
  FareySet(int n, std::int64_t Q, ResidueSystem sys) : n_(n), Q_(Q), sys_(std::move(sys)) {}

  int n() const { return n_; }
  std::int64_t Q() const { return Q_; }
  const ResidueSystem& system() const { return sys_; }
  std::int64_t modulus() const { return sys_.modulus(); }
  std::size_t size() const { return q_.size(); }

  std::span<const std::int64_t> p(std::size_t i) const {
    return {p_.data() + i * static_cast<std::size_t>(n_), static_cast<std::size_t>(n_)};
  }
  std::int64_t q(std::size_t i) const { return q_[i]; }
  PrimitivePoint point(std::size_t i) const {
    return PrimitivePoint{IntRow(p(i).begin(), p(i).end()), q_[i]};
  }
  /// Torus coordinates p/q.
  std::vector<double> coords(std::size_t i) const {
    std::vector<double> x(n_);
    for (int k = 0; k < n_; ++k) x[k] = static_cast<double>(p_[i * n_ + k]) / q_[i];
    return x;
  }

  void push(std::span<const std::int64_t> p, std::int64_t q) {
    p_.insert(p_.end(), p.begin(), p.end());
    q_.push_back(q);
  }

 private:
  int n_;
  std::int64_t Q_;
  ResidueSystem sys_;
  std::vector<std::int64_t> p_;
  std::vector<std::int64_t> q_;
};

/// F(Q) on [0, 1) in increasing order, via the next-term recurrence.
inline std::vector<std::pair<std::int64_t, std::int64_t>> farey_unit_interval(std::int64_t Q) {
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  std::int64_t a = 0, b = 1, c = 1, d = Q;
  out.emplace_back(a, b);
  while (c < d) {
    const std::int64_t k = (Q + b) / d;
    const std::int64_t e = k * c - a, f = k * d - b;
    a = c;
    b = d;
    c = e;
    d = f;
    out.emplace_back(a, b);
  }
  return out;
}

inline FareySet materialize(int n, std::int64_t Q, const ResidueSystem& sys) {
  if (Q < 1) throw ValidationError("--q", "Q must be >= 1");
  if (n != sys.n()) throw ValidationError("--n", "dimension does not match residue system");
  FareySet set(n, Q, sys);
  if (n == 1) {
    const auto unit = farey_unit_interval(Q);
    const std::int64_t m = sys.modulus();
    std::int64_t p[1];
    for (std::int64_t k = 0; k < m; ++k)
      for (auto [p0, q] : unit) {
        p[0] = k * q + p0;
        if (sys.contains(std::span<const std::int64_t>(p, 1), q))
          set.push(std::span<const std::int64_t>(p, 1), q);
      }
    return set;
  }
  enumerate(n, Q, sys, [&](std::span<const std::int64_t> p, std::int64_t q) { set.push(p, q); });
  return set;
}

struct GrowthReport {
  std::int64_t count = 0;
  double sigma = 0.0;
  double ratio = 0.0;
};

using ZetaFn = std::function<double(double)>;

/// sigma_{A,Q} = density * m^n * Q^{n+1} / ((n+1) zeta(n+1)); for the full
/// set this is sigma_Q.
inline double growth_rate(int n, std::int64_t Q, const ResidueSystem& sys,
                          const ZetaFn& zeta_fn = zeta) {
  const double density = astar_count(sys).density.value();
  const double lattice_index = std::pow(static_cast<double>(sys.modulus()), n);
  return density * lattice_index * std::pow(static_cast<double>(Q), n + 1) /
         ((n + 1) * zeta_fn(n + 1.0));
}

inline GrowthReport growth_check(std::int64_t count, int n, std::int64_t Q,
                                 const ResidueSystem& sys, const ZetaFn& zeta_fn = zeta) {
  GrowthReport r;
  r.count = count;
  r.sigma = growth_rate(n, Q, sys, zeta_fn);
  r.ratio = static_cast<double>(count) / r.sigma;
  return r;
}

inline GrowthReport growth_check(const FareySet& set, const ZetaFn& zeta_fn = zeta) {
  return growth_check(static_cast<std::int64_t>(set.size()), set.n(), set.Q(), set.system(),
                      zeta_fn);
}

/// Gaps between consecutive points on R/mZ (wrap-around included), scaled
/// by count/m so that they average 1; returned in ascending order.
inline std::vector<double> gaps_1d(const FareySet& set) {
  if (set.n() != 1) throw ValidationError("--n", "gap statistics require n = 1");
  const std::size_t N = set.size();
  std::vector<double> gaps;
  if (N == 0) return gaps;
  gaps.reserve(N);
  const std::int64_t m = set.modulus();
  const double norm = static_cast<double>(N) / static_cast<double>(m);
  for (std::size_t i = 0; i < N; ++i) {
    const std::size_t j = (i + 1) % N;
    const __int128 pj = set.p(j)[0] + (j == 0 ? static_cast<__int128>(m) * set.q(j) : 0);
    const __int128 num = pj * set.q(i) - static_cast<__int128>(set.p(i)[0]) * set.q(j);
    const double den = static_cast<double>(set.q(i)) * static_cast<double>(set.q(j));
    gaps.push_back(static_cast<double>(num) / den * norm);
  }
  std::sort(gaps.begin(), gaps.end());
  return gaps;
}

/// True iff every consecutive pair p/q < p'/q' of an n = 1 set has p'q - pq' = 1.
inline bool neighbor_identity_holds(const FareySet& set) {
  if (set.n() != 1) throw ValidationError("--n", "neighbor identity requires n = 1");
  for (std::size_t i = 0; i + 1 < set.size(); ++i) {
    const __int128 det = static_cast<__int128>(set.p(i + 1)[0]) * set.q(i) -
                         static_cast<__int128>(set.p(i)[0]) * set.q(i + 1);
    if (det != 1) return false;
  }
  return true;
}

}  // namespace farey
