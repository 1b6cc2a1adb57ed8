#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "farey/diophantine.hpp"
#include "farey/rng.hpp"
#include "farey/testing/oracles.hpp"

using namespace farey;

namespace {

DioParams params(double alpha, double c, std::int64_t Q, ResidueSystem sys = ResidueSystem::full(1)) {
  DioParams p;
  p.alpha = alpha;
  p.c = c;
  p.Q = Q;
  p.sys = std::move(sys);
  return p;
}

}  // namespace

TEST(EstCount, Examples) {
  const double zero[] = {0.0};
  EXPECT_EQ(est_count(zero, params(0.5, 2.0, 10)), 0);
  const double x[] = {1.0 / 15.0};
  const auto prm = params(0.5, 2.0, 10);
  const auto count = est_count(x, prm);
  EXPECT_GE(count, 1);  // (1, 15)
  EXPECT_EQ(count, oracle::dio_count_scan(DioKind::EST, x, prm));
  const auto restricted = params(0.5, 2.0, 10, ResidueSystem(1, 2, {{0, 1}}));
  EXPECT_LE(est_count(x, restricted), count);
}

TEST(KestenCount, Examples) {
  const double zero[] = {0.0};
  EXPECT_EQ(kesten_count(zero, params(0.5, 2.0, 10)), 1);
  const double half[] = {0.5};
  const auto prm = params(0.6, 2.0, 10);
  EXPECT_GE(kesten_count(half, prm), 1);  // (1, 2)
  EXPECT_EQ(kesten_count(half, prm), oracle::dio_count_scan(DioKind::Kesten, half, prm));
}

TEST(Counts, MatchScanOracle) {
  BatchRng rng(31, 0);
  for (int t = 0; t < 300; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform_int(0, 1));
    ResidueSystem sys = ResidueSystem::full(n);
    if (rng.uniform() < 0.5)
      sys = n == 1 ? ResidueSystem(1, 3, {{1, 1}, {2, 0}}) : ResidueSystem(2, 2, {{0, 1, 1}});
    auto prm = params(rng.uniform(0.1, 2.0), rng.uniform(1.2, 3.0), rng.uniform_int(1, n == 1 ? 300 : 40),
                      sys);
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(0.0, static_cast<double>(sys.modulus()));
    EXPECT_EQ(est_count(x, prm), oracle::dio_count_scan(DioKind::EST, x, prm));
    EXPECT_EQ(kesten_count(x, prm), oracle::dio_count_scan(DioKind::Kesten, x, prm));
  }
}

TEST(Counts, RationalPointsCountTies) {
  // For x = a/b and alpha = 1, n = 1 the inequalities are integer ones:
  // EST  |q a - p b| q <= b,  Kesten |q a - p b| Q <= b. Many cases are exact ties.
  const std::int64_t Q = 17;
  const auto prm = params(1.0, 2.0, Q);
  for (std::int64_t b = 1; b <= 40; ++b)
    for (std::int64_t a = 0; a < b; ++a) {
      std::int64_t est = 0, kes = 0;
      for (std::int64_t q = 1; q <= 2 * Q; ++q)
        for (std::int64_t p = -1; p <= q + 1; ++p) {
          if (std::gcd(p, q) != 1) continue;
          const std::int64_t d = std::abs(q * a - p * b);
          if (q >= Q && d * q <= b) ++est;
          if (q <= Q && d * Q <= b) ++kes;
        }
      const double x[] = {static_cast<double>(a) / static_cast<double>(b)};
      EXPECT_EQ(est_count(x, prm), est) << a << "/" << b;
      EXPECT_EQ(kesten_count(x, prm), kes) << a << "/" << b;
    }
}

TEST(Counts, ClassesPartitionTheFullCount) {
  BatchRng rng(32, 0);
  const auto all = ResidueSystem::all_classes(1, 3);
  const std::vector<IntRow> first(all.classes().begin(), all.classes().begin() + 3);
  const std::vector<IntRow> rest(all.classes().begin() + 3, all.classes().end());
  for (int t = 0; t < 200; ++t) {
    const double x[] = {rng.uniform(0.0, 3.0)};
    const auto a = params(0.8, 2.5, 200, ResidueSystem(1, 3, first));
    const auto b = params(0.8, 2.5, 200, ResidueSystem(1, 3, rest));
    const auto full = params(0.8, 2.5, 200, all);
    EXPECT_EQ(est_count(x, a) + est_count(x, b), est_count(x, full));
    EXPECT_EQ(kesten_count(x, a) + kesten_count(x, b), kesten_count(x, full));
  }
}

TEST(Equivalence, InequalityIffRegionMembership) {
  BatchRng rng(33, 0);
  int checked_cases = 0;
  for (int t = 0; t < 10000; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform_int(0, 2));
    auto prm = params(rng.uniform(0.05, 2.0), rng.uniform(1.1, 3.0), rng.uniform_int(1, 300),
                      ResidueSystem::full(n));
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform();
    const std::int64_t q = rng.uniform_int(1, 3 * prm.Q + 1);
    IntRow p(n);
    for (int i = 0; i < n; ++i) p[i] = std::llround(q * x[i]) + rng.uniform_int(-1, 1);
    const auto image = horosphere_image(p, q, x, static_cast<double>(prm.Q));
    const Region e = Region::est(n, prm.alpha, prm.c);
    const Region k = Region::kesten(n, prm.alpha);
    const auto near_boundary = [&](const Region& r) {
      return region_contains(r, image, 1e-9) != region_contains(r, image, -1e-9);
    };
    if (!near_boundary(e)) {
      EXPECT_EQ(satisfies_est(p, q, x, prm), region_contains(e, image));
      ++checked_cases;
    }
    if (!near_boundary(k)) {
      EXPECT_EQ(satisfies_kesten(p, q, x, prm), region_contains(k, image));
    }
  }
  EXPECT_GT(checked_cases, 9900);
}

TEST(PredictedMean, ClosedForms) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  EXPECT_NEAR(predicted_mean(DioKind::EST, params(0.5, 2.0, 1)), 6.0 * std::log(2.0) / pi2, 1e-12);
  EXPECT_NEAR(predicted_mean(DioKind::Kesten, params(0.5, 2.0, 1)), 6.0 / pi2, 1e-12);
  const auto restricted = params(0.5, 2.0, 1, ResidueSystem(1, 2, {{0, 1}}));
  EXPECT_NEAR(predicted_mean(DioKind::EST, restricted),
              predicted_mean(DioKind::EST, params(0.5, 2.0, 1)) / 3.0, 1e-12);
  // n = 2: pi alpha^2 ln c / zeta(3).
  DioParams two = params(0.7, 3.0, 1, ResidueSystem::full(2));
  EXPECT_NEAR(predicted_mean(DioKind::EST, two),
              std::numbers::pi * 0.49 * std::log(3.0) / 1.2020569031595942, 1e-12);
}

TEST(Distribution, EstAndKestenMeans) {
  const auto est = dio_distribution(DioKind::EST, torus_domain(1, 1), params(0.5, 2.0, 2000),
                                    100000, 5);
  EXPECT_NEAR(est.mean, est.predicted_mean, 0.03 * est.predicted_mean);
  const auto kes = dio_distribution(DioKind::Kesten, torus_domain(1, 1), params(0.5, 2.0, 2000),
                                    100000, 6);
  EXPECT_NEAR(kes.mean, kes.predicted_mean, 0.03 * kes.predicted_mean);
  EXPECT_EQ(kes.c, 0.0);
  EXPECT_EQ(est.kind, "EST");
  EXPECT_EQ(kes.kind, "K");
}

TEST(Distribution, RestrictedIsOneThird) {
  const auto prm = params(0.5, 2.0, 2000, ResidueSystem(1, 2, {{0, 1}}));
  const auto r = dio_distribution(DioKind::EST, torus_domain(1, 2), prm, 100000, 9);
  EXPECT_NEAR(r.mean, 6.0 * std::log(2.0) / (std::numbers::pi * std::numbers::pi) / 3.0,
              0.05 * 0.14046);
}

TEST(Distribution, DisjointDomainsAgree) {
  const auto prm = params(1.0, 2.0, 1000);
  const std::int64_t samples = 40000;
  const auto left = dio_distribution(DioKind::Kesten, TestSet::box({0.0}, {0.3}), prm, samples, 1);
  const auto right = dio_distribution(DioKind::Kesten, TestSet::box({0.5}, {0.9}), prm, samples, 2);
  // Kesten counts have mean about 1.2 and variance of the same order.
  const double se = std::sqrt(2.0 * 2.0 / samples);
  EXPECT_NEAR(left.mean, right.mean, 4.0 * se);
}

TEST(Distribution, SmallAlphaGivesZero) {
  const auto r = dio_distribution(DioKind::Kesten, torus_domain(1, 1), params(1e-6, 2.0, 100), 5000, 3);
  EXPECT_GT(r.pmf.at(0), 0.99);
}

TEST(Validation, NamesTheField) {
  try {
    params(0.5, 1.0, 10).validate(DioKind::EST);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "--c");
  }
  EXPECT_NO_THROW(params(0.5, 1.0, 10).validate(DioKind::Kesten));
  EXPECT_THROW(params(0.0, 2.0, 10).validate(DioKind::Kesten), ValidationError);
  EXPECT_THROW(params(0.5, 2.0, 0).validate(DioKind::EST), ValidationError);
  EXPECT_THROW(dio_distribution(DioKind::EST, torus_domain(2, 1), params(0.5, 2.0, 10), 10, 1),
               ValidationError);
}
