#pragma once

// Erdos-Szusz-Turan and Kesten counting functions restricted to a residue
// system, and their empirical distributions over random x.

#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "farey/checked.hpp"
#include "farey/congruence.hpp"
#include "farey/lattice_core.hpp"
#include "farey/spacing_stats.hpp"
#include "farey/zeta.hpp"

namespace farey {

enum class DioKind { EST, Kesten };

// Relative slack on the radius so that exact ties (x rational) count as
// solutions despite rounding in q*x.
inline constexpr double kTieSlack = 1e-12;

inline std::string to_string(DioKind k) { return k == DioKind::EST ? "EST" : "K"; }

struct DioParams {
  double alpha = 0.5;  // amplitude
  double c = 2.0;      // EST ratio
  std::int64_t Q = 1;
  ResidueSystem sys = ResidueSystem::full(1);

  int n() const { return sys.n(); }

  void validate(DioKind kind) const {
    if (!(alpha > 0.0)) throw ValidationError("--alpha", "alpha must be > 0");
    if (kind == DioKind::EST && !(c > 1.0)) throw ValidationError("--c", "c must be > 1");
    if (Q < 1) throw ValidationError("--q", "Q must be >= 1");
  }
};

/// ||q x - p|| <= alpha q^{-1/n} and Q <= q <= cQ.
inline bool satisfies_est(std::span<const std::int64_t> p, std::int64_t q,
                          std::span<const double> x, const DioParams& prm) {
  const int n = static_cast<int>(p.size());
  if (q < prm.Q || static_cast<double>(q) > prm.c * static_cast<double>(prm.Q)) return false;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = static_cast<double>(q) * x[i] - static_cast<double>(p[i]);
    s += d * d;
  }
  return std::sqrt(s) <= prm.alpha * std::pow(static_cast<double>(q), -1.0 / n) * (1.0 + kTieSlack);
}

/// ||q x - p|| <= alpha Q^{-1/n} and 1 <= q <= Q.
inline bool satisfies_kesten(std::span<const std::int64_t> p, std::int64_t q,
                             std::span<const double> x, const DioParams& prm) {
  const int n = static_cast<int>(p.size());
  if (q < 1 || q > prm.Q) return false;
  double s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = static_cast<double>(q) * x[i] - static_cast<double>(p[i]);
    s += d * d;
  }
  return std::sqrt(s) <= prm.alpha * std::pow(static_cast<double>(prm.Q), -1.0 / n) * (1.0 + kTieSlack);
}

namespace detail {

// Counts primitive (p, q) in the residue system with ||q x - p|| <= radius(q),
// for q in [q_lo, q_hi]. p ranges over the integer box around q x.
template <class Radius>
std::int64_t count_near(std::span<const double> x, std::int64_t q_lo, std::int64_t q_hi,
                        const ResidueSystem& sys, Radius&& radius) {
  const int n = static_cast<int>(x.size());
  std::int64_t total = 0;
  IntRow p(n), lo(n), hi(n);
  for (std::int64_t q = q_lo; q <= q_hi; ++q) {
    const double r = radius(q) * (1.0 + kTieSlack);
    const double r2 = r * r;
    bool empty = false;
    for (int i = 0; i < n; ++i) {
      const double centre = static_cast<double>(q) * x[i];
      lo[i] = static_cast<std::int64_t>(std::ceil(centre - r));
      hi[i] = static_cast<std::int64_t>(std::floor(centre + r));
      if (lo[i] > hi[i]) empty = true;
      p[i] = lo[i];
    }
    if (empty) continue;
    for (;;) {
      double s = 0.0;
      std::int64_t g = q;
      for (int i = 0; i < n; ++i) {
        const double d = static_cast<double>(q) * x[i] - static_cast<double>(p[i]);
        s += d * d;
        g = std::gcd(g, p[i]);
      }
      if (s <= r2 && g == 1 && sys.contains(p, q)) ++total;
      int i = n - 1;
      while (i >= 0 && ++p[i] > hi[i]) {
        p[i] = lo[i];
        --i;
      }
      if (i < 0) break;
    }
  }
  return total;
}

}  // namespace detail

inline std::int64_t est_count(std::span<const double> x, const DioParams& prm) {
  if (static_cast<int>(x.size()) != prm.n()) throw ValidationError("x", "dimension mismatch");
  const int n = prm.n();
  const auto q_hi = static_cast<std::int64_t>(std::floor(prm.c * static_cast<double>(prm.Q)));
  return detail::count_near(x, prm.Q, q_hi, prm.sys, [&](std::int64_t q) {
    return prm.alpha * std::pow(static_cast<double>(q), -1.0 / n);
  });
}

inline std::int64_t kesten_count(std::span<const double> x, const DioParams& prm) {
  if (static_cast<int>(x.size()) != prm.n()) throw ValidationError("x", "dimension mismatch");
  const double r = prm.alpha * std::pow(static_cast<double>(prm.Q), -1.0 / prm.n());
  return detail::count_near(x, 1, prm.Q, prm.sys, [r](std::int64_t) { return r; });
}

struct DioReport {
  std::string kind;
  int n = 1;
  std::int64_t Q = 1;
  double alpha = 0.0;
  double c = 0.0;
  std::int64_t modulus = 1;
  std::vector<IntRow> classes;
  std::map<int, double> pmf;
  double overflow = 0.0;
  double mean = 0.0;
  double predicted_mean = 0.0;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::string rng;
};

/// Limiting mean density * vol(region) / zeta(n+1), where the region volume is
/// V_n alpha^n ln c for EST and V_n alpha^n for Kesten.
inline double predicted_mean(DioKind kind, const DioParams& prm, const ZetaFn& zeta_fn = zeta) {
  const int n = prm.n();
  double vol = unit_ball_volume(n) * std::pow(prm.alpha, n);
  if (kind == DioKind::EST) vol *= std::log(prm.c);
  return astar_count(prm.sys).density.value() * vol / zeta_fn(n + 1.0);
}

inline DioReport dio_distribution(DioKind kind, const TestSet& domain, const DioParams& prm,
                                  std::int64_t samples, std::uint64_t seed, int kmax = 16,
                                  unsigned threads = 0) {
  prm.validate(kind);
  if (domain.dim() != prm.n()) throw ValidationError("--domain", "domain dimension must equal n");
  const auto h = sample_histogram(samples, seed, kmax, threads, [&](BatchRng& rng) {
    thread_local std::vector<double> x;
    sample_uniform(domain, rng, x);
    return kind == DioKind::EST ? est_count(x, prm) : kesten_count(x, prm);
  });
  DioReport r;
  r.kind = to_string(kind);
  r.n = prm.n();
  r.Q = prm.Q;
  r.alpha = prm.alpha;
  r.c = kind == DioKind::EST ? prm.c : 0.0;
  r.modulus = prm.sys.modulus();
  r.classes = prm.sys.classes();
  r.predicted_mean = predicted_mean(kind, prm);
  r.samples = samples;
  r.seed = seed;
  r.rng = std::string(kRngName);
  fill_distribution(h, r.pmf, r.overflow, r.mean);
  return r;
}

}  // namespace farey
