#pragma once

// Acceptance criteria, runnable from the test binary and from `fareystat accept`.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "farey/congruence.hpp"
#include "farey/diophantine.hpp"
#include "farey/farey_enum.hpp"
#include "farey/frobenius.hpp"
#include "farey/report_io.hpp"
#include "farey/rng.hpp"
#include "farey/spacing_stats.hpp"
#include "farey/testing/oracles.hpp"
#include "farey/zeta.hpp"

namespace farey::acceptance {

enum class Suite { Fast, Full };

struct Options {
  ZetaFn zeta = farey::zeta;  // replaceable to check that criteria are sensitive
  unsigned threads = 0;
  std::uint64_t seed = 20240601;
};

/// One measured quantity against its target.
struct AcceptanceResult {
  std::string id;
  std::string what;
  double observed = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string mode;  // "abs", "rel", "max", "exact"
  bool pass = false;
};

struct CriterionReport {
  int number = 0;
  std::string title;
  std::vector<AcceptanceResult> results;
  double seconds = 0.0;
  std::string error;

  bool pass() const {
    if (!error.empty()) return false;
    for (const auto& r : results)
      if (!r.pass) return false;
    return !results.empty();
  }
};

inline AcceptanceResult within_abs(std::string id, std::string what, double observed,
                                   double expected, double tol) {
  return {std::move(id), std::move(what), observed, expected, tol, "abs",
          std::abs(observed - expected) <= tol};
}

inline AcceptanceResult within_rel(std::string id, std::string what, double observed,
                                   double expected, double tol) {
  return {std::move(id), std::move(what), observed, expected, tol, "rel",
          std::abs(observed - expected) <= tol * std::abs(expected)};
}

inline AcceptanceResult at_most(std::string id, std::string what, double observed, double bound) {
  return {std::move(id), std::move(what), observed, bound, bound, "max", observed <= bound};
}

inline AcceptanceResult exactly(std::string id, std::string what, double observed, double expected) {
  return {std::move(id), std::move(what), observed, expected, 0.0, "exact", observed == expected};
}

// ---------------------------------------------------------------------------

inline std::vector<AcceptanceResult> growth_rate(const Options& o) {
  std::vector<AcceptanceResult> out;
  const auto full1 = ResidueSystem::full(1);
  const auto g1 = growth_check(count_points(1, 10000, full1, o.threads), 1, 10000, full1, o.zeta);
  out.push_back(within_abs("1a", "#F(Q)/sigma_Q, n=1, Q=10^4", g1.ratio, 1.0, 0.005));
  const auto full2 = ResidueSystem::full(2);
  const auto g2 = growth_check(count_points(2, 300, full2, o.threads), 2, 300, full2, o.zeta);
  out.push_back(within_rel("1b", "#F(Q)/sigma_Q, n=2, Q=300", g2.ratio, 1.0, 0.02));
  return out;
}

inline std::vector<AcceptanceResult> restricted_density(const Options& o) {
  std::vector<AcceptanceResult> out;
  const ResidueSystem sys(1, 2, {{0, 1}});
  const auto all = ResidueSystem::all_classes(1, 2);
  const double ratio = static_cast<double>(count_points(1, 5000, sys, o.threads)) /
                       static_cast<double>(count_points(1, 5000, all, o.threads));
  out.push_back(within_rel("2a", "#F_A(Q)/#F_Delta(Q), m=2, Q=5000", ratio, 1.0 / 3.0, 0.01));

  int mismatches = 0, cases = 0;
  const std::pair<int, int> pairs[] = {{1, 2}, {1, 3}, {1, 4}, {2, 2}, {2, 3}};
  for (auto [n, m] : pairs) {
    std::vector<IntRow> unit(1, IntRow(n + 1, 0));
    unit[0][n] = 1;
    std::vector<IntRow> two = unit;
    two.push_back(IntRow(n + 1, 1));
    for (const auto& sys_try : {ResidueSystem(n, m, unit), ResidueSystem(n, m, two),
                                ResidueSystem::all_classes(n, m)}) {
      ++cases;
      if (!(astar_bruteforce(sys_try) == astar_count(sys_try))) ++mismatches;
    }
  }
  out.push_back(exactly("2b", "astar_bruteforce != astar_count (" + std::to_string(cases) + " systems)",
                        mismatches, 0));
  return out;
}

inline std::vector<AcceptanceResult> neighbor_identity(const Options&) {
  std::vector<AcceptanceResult> out;
  const auto set = materialize(1, 2000, ResidueSystem::full(1));
  out.push_back(exactly("3a", "consecutive pairs violating p'q - pq' = 1",
                        neighbor_identity_holds(set) ? 0 : 1, 0));
  const auto gaps = gaps_1d(set);
  out.push_back(within_rel("3b", "minimum normalized gap, Q=2000", gaps.front(),
                           3.0 / (std::numbers::pi * std::numbers::pi), 0.02));
  return out;
}

inline std::vector<AcceptanceResult> spacing_expectation(const Options& o) {
  std::vector<AcceptanceResult> out;
  const auto window = TestSet::box({0.0}, {0.5});
  {
    const auto set = materialize(1, 2000, ResidueSystem::full(1));
    const auto r = p_stat(set, torus_domain(1, 1), window, 16, 100000, o.seed, o.threads);
    out.push_back(within_abs("4a", "P mean, m=1, A=[0,0.5]", r.mean, 0.5, 0.02));
  }
  {
    const auto set = materialize(1, 2000, ResidueSystem(1, 2, {{0, 1}}));
    const auto r = p_stat(set, torus_domain(1, 2), window, 16, 100000, o.seed + 1, o.threads);
    out.push_back(within_abs("4b", "P mean, m=2 class (0,1), A=[0,0.5]", r.mean,
                             limiting_mean(window, 2), 0.02));
  }
  return out;
}

inline std::vector<AcceptanceResult> est_criterion(const Options& o) {
  std::vector<AcceptanceResult> out;
  // Inequality versus region membership of (p,q) h(x) a(Q).
  int disagreements = 0;
  BatchRng rng(o.seed, 5);
  for (int t = 0; t < 10000; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform_int(0, 1));
    DioParams prm;
    prm.sys = ResidueSystem::full(n);
    prm.alpha = rng.uniform(0.05, 2.0);
    prm.c = rng.uniform(1.1, 3.0);
    prm.Q = rng.uniform_int(1, 200);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform();
    const std::int64_t q = rng.uniform_int(1, static_cast<std::int64_t>(3 * prm.Q) + 1);
    IntRow p(n);
    for (int i = 0; i < n; ++i)
      p[i] = static_cast<std::int64_t>(std::llround(q * x[i])) + rng.uniform_int(-1, 1);
    const auto image = horosphere_image(p, q, x, static_cast<double>(prm.Q));
    const Region e = Region::est(n, prm.alpha, prm.c);
    const Region k = Region::kesten(n, prm.alpha);
    for (const auto& [region, direct] :
         {std::pair{e, satisfies_est(p, q, x, prm)}, std::pair{k, satisfies_kesten(p, q, x, prm)}}) {
      const bool exact = region_contains(region, image);
      const bool near_boundary =
          region_contains(region, image, 1e-9) != region_contains(region, image, -1e-9);
      if (exact != direct && !near_boundary) ++disagreements;
    }
  }
  out.push_back(exactly("5a", "inequality/region disagreements in 10^4 cases", disagreements, 0));

  DioParams prm;
  prm.alpha = 0.5;
  prm.c = 2.0;
  prm.Q = 2000;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const auto full = dio_distribution(DioKind::EST, torus_domain(1, 1), prm, 100000, o.seed + 2, 16,
                                     o.threads);
  const double full_prediction = predicted_mean(DioKind::EST, prm, o.zeta);
  out.push_back(within_abs("5b", "predicted EST mean = 6 ln2 / pi^2", full_prediction,
                           6.0 * std::log(2.0) / pi2, 1e-12));
  out.push_back(within_rel("5c", "EST mean, m=1, alpha=0.5, c=2, Q=2000", full.mean,
                           full_prediction, 0.03));
  prm.sys = ResidueSystem(1, 2, {{0, 1}});
  const auto restricted = dio_distribution(DioKind::EST, torus_domain(1, 2), prm, 100000,
                                           o.seed + 3, 16, o.threads);
  out.push_back(within_rel("5d", "EST mean, m=2 class (0,1)", restricted.mean,
                           full_prediction / 3.0, 0.05));
  return out;
}

inline std::vector<AcceptanceResult> kesten_criterion(const Options& o) {
  DioParams prm;
  prm.alpha = 0.5;
  prm.Q = 2000;
  const auto r = dio_distribution(DioKind::Kesten, torus_domain(1, 1), prm, 100000, o.seed + 4, 16,
                                  o.threads);
  const double pred = predicted_mean(DioKind::Kesten, prm, o.zeta);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return {within_abs("6a", "predicted Kesten mean = 6 / pi^2", pred, 6.0 / pi2, 1e-12),
          within_rel("6b", "Kesten mean, m=1, alpha=0.5, Q=2000", r.mean, pred, 0.03)};
}

inline std::vector<AcceptanceResult> frobenius_exactness(const Options& o) {
  BatchRng rng(o.seed, 7);
  int pair_mismatch = 0;
  for (int done = 0; done < 1000;) {
    const std::int64_t a = rng.uniform_int(2, 10000), b = rng.uniform_int(2, 10000);
    if (std::gcd(a, b) != 1) continue;
    const std::int64_t ab[2] = {a, b};
    if (frobenius_number(ab) != a * b - a - b) ++pair_mismatch;
    ++done;
  }
  int triple_mismatch = 0;
  for (int done = 0; done < 500;) {
    const std::int64_t t[3] = {rng.uniform_int(2, 100), rng.uniform_int(2, 100),
                               rng.uniform_int(2, 100)};
    if (gcd_all(t) != 1) continue;
    if (frobenius_number(t) != oracle::frobenius_bitmap(t)) ++triple_mismatch;
    ++done;
  }
  return {exactly("7a", "closed-form mismatches, 10^3 coprime pairs", pair_mismatch, 0),
          exactly("7b", "bitmap-oracle mismatches, 500 primitive triples", triple_mismatch, 0)};
}

inline std::vector<AcceptanceResult> covering_identity(const Options& o) {
  BatchRng rng(o.seed, 8);
  double worst_pair = 0.0;
  for (int done = 0; done < 100;) {
    const std::int64_t ab[2] = {rng.uniform_int(2, 1000), rng.uniform_int(2, 1000)};
    if (std::gcd(ab[0], ab[1]) != 1) continue;
    worst_pair = std::max(worst_pair, identity_check(ab, 1e-3, o.threads).relative);
    ++done;
  }
  double worst_triple = 0.0;
  for (int done = 0; done < 50;) {
    const std::int64_t t[3] = {rng.uniform_int(2, 40), rng.uniform_int(2, 40),
                               rng.uniform_int(2, 40)};
    if (gcd_all(t) != 1) continue;
    worst_triple = std::max(worst_triple, identity_check(t, 1e-3, o.threads).relative);
    ++done;
  }
  return {at_most("8a", "max relative residual, n=1 (100 coprime pairs)", worst_pair, 1e-9),
          at_most("8b", "max relative residual, n=2, h=1e-3 (50 triples)", worst_triple, 0.02)};
}

inline CensusConfig frobenius_census_config(std::int64_t T, unsigned threads) {
  CensusConfig cfg;
  cfg.n = 2;
  cfg.T = T;
  cfg.lo = {0.0, 0.0, 0.0};
  cfg.hi = {1.0, 1.0, 1.0};
  cfg.sys = ResidueSystem(2, 2, {{1, 1, 1}});
  for (int i = 0; i <= 60; ++i) cfg.r_grid.push_back(0.05 * i);
  cfg.threads = threads;
  return cfg;
}

inline std::vector<AcceptanceResult> frobenius_theorem(const Options& o) {
  const auto cfg = frobenius_census_config(150, o.threads);
  const auto res = frobenius_census(cfg);
  const double density = astar_count(cfg.sys).density.value();
  // R = 0: every a counted has F > 0, so the tails are the totals.
  const double ratio = static_cast<double>(res.restricted_psi.tail.front()) /
                       static_cast<double>(res.full_psi.tail.front());
  return {within_rel("9a", "restricted/full count at R=0 vs #A*/[Gamma:Gamma(2)] = 1/7", ratio,
                     density, 0.02),
          at_most("9b", "KS distance, restricted vs full normalized F, T=150",
                  ks_distance(res.restricted, res.full), 0.02)};
}

inline std::vector<AcceptanceResult> determinism(const Options& o) {
  int mismatches = 0;
  {
    const auto set = materialize(1, 300, ResidueSystem(1, 3, {{1, 1}, {0, 1}}));
    const auto window = TestSet::box({-0.5}, {1.0});
    const auto run = [&](unsigned threads) {
      return io::dump(io::to_json(
          p_stat(set, torus_domain(1, 3), window, 8, 20000, o.seed, threads)));
    };
    mismatches += run(1) != run(o.threads == 1 ? 3 : o.threads);
    mismatches += run(1) != run(1);
  }
  {
    DioParams prm;
    prm.Q = 200;
    const auto run = [&](unsigned threads) {
      return io::dump(io::to_json(
          dio_distribution(DioKind::EST, torus_domain(1, 1), prm, 20000, o.seed, 8, threads)));
    };
    mismatches += run(1) != run(o.threads == 1 ? 3 : o.threads);
  }
  {
    const auto run = [&](unsigned threads) {
      return io::to_csv(io::census_table(frobenius_census(frobenius_census_config(40, threads))));
    };
    mismatches += run(1) != run(o.threads == 1 ? 3 : o.threads);
  }
  return {exactly("10a", "byte mismatches between repeated runs (4 comparisons)", mismatches, 0)};
}

struct Criterion {
  int number;
  std::string title;
  bool full_only;
  std::function<std::vector<AcceptanceResult>(const Options&)> run;
};

inline std::vector<Criterion> criteria() {
  return {
      {1, "growth rate of #F(Q)", false, growth_rate},
      {2, "restricted density and orbit counts", false, restricted_density},
      {3, "Farey neighbor identity and minimum gap", false, neighbor_identity},
      {4, "spacing statistic expectation", false, spacing_expectation},
      {5, "EST equivalence and expectation", false, est_criterion},
      {6, "Kesten expectation", false, kesten_criterion},
      {7, "Frobenius number exactness", false, frobenius_exactness},
      {8, "Frobenius / covering radius identity", false, covering_identity},
      {9, "restricted Frobenius census", true, frobenius_theorem},
      {10, "determinism", false, determinism},
  };
}

inline CriterionReport run_criterion(const Criterion& c, const Options& o) {
  CriterionReport rep;
  rep.number = c.number;
  rep.title = c.title;
  const auto start = std::chrono::steady_clock::now();
  try {
    rep.results = c.run(o);
  } catch (const std::exception& e) {
    rep.error = e.what();
  }
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

/// Runs every criterion in the suite; failures do not stop later criteria.
inline std::vector<CriterionReport> accept(Suite suite, const Options& o = {},
                                           std::ostream* progress = nullptr);

inline std::string describe(const AcceptanceResult& r) {
  std::string s = r.id + " " + r.what + ": observed " + io::format_double(r.observed);
  if (r.mode == "abs")
    s += ", expected " + io::format_double(r.expected) + " +/- " + io::format_double(r.tolerance);
  else if (r.mode == "rel")
    s += ", expected " + io::format_double(r.expected) + " +/- " +
         io::format_double(100.0 * r.tolerance) + "%";
  else if (r.mode == "max")
    s += ", bound " + io::format_double(r.expected);
  else
    s += ", expected exactly " + io::format_double(r.expected);
  return s;
}

inline void print_line(std::ostream& os, const CriterionReport& rep) {
  os << (rep.pass() ? "[PASS] " : "[FAIL] ") << "criterion " << rep.number << " (" << rep.title
     << ", " << io::format_double(std::round(rep.seconds * 10.0) / 10.0) << "s)";
  if (!rep.error.empty()) os << " error: " << rep.error;
  for (const auto& r : rep.results) os << "\n    " << (r.pass ? "ok   " : "FAIL ") << describe(r);
  os << "\n";
}

inline std::vector<CriterionReport> accept(Suite suite, const Options& o, std::ostream* progress) {
  std::vector<CriterionReport> out;
  for (const auto& c : criteria()) {
    if (c.full_only && suite == Suite::Fast) continue;
    out.push_back(run_criterion(c, o));
    if (progress) print_line(*progress, out.back());
  }
  return out;
}

inline io::json to_json(const std::vector<CriterionReport>& reps) {
  io::json arr = io::json::array();
  for (const auto& rep : reps) {
    io::json results = io::json::array();
    for (const auto& r : rep.results)
      results.push_back(io::json{{"id", r.id},
                                 {"what", r.what},
                                 {"observed", r.observed},
                                 {"expected", r.expected},
                                 {"tolerance", r.tolerance},
                                 {"mode", r.mode},
                                 {"pass", r.pass}});
    arr.push_back(io::json{{"criterion", rep.number},
                           {"title", rep.title},
                           {"pass", rep.pass()},
                           {"error", rep.error},
                           {"results", results}});
  }
  return io::json{{"schema_version", io::kSchemaVersion}, {"criteria", arr}};
}

}  // namespace farey::acceptance
