#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "farey/rng.hpp"
#include "farey/spacing_stats.hpp"
#include "farey/testing/oracles.hpp"

using namespace farey;

namespace {

double pmf_mass(const SpacingReport& r) {
  double total = r.overflow;
  for (auto [k, v] : r.pmf) total += v;
  return total;
}

}  // namespace

TEST(Rng, SplitmixKnownValue) {
  // First output of the reference splitmix64 stream seeded with 0.
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(Rng, BatchesAreReproducibleAndDistinct) {
  BatchRng a(42, 7), b(42, 7), c(42, 8);
  for (int i = 0; i < 10; ++i) {
    const auto va = a.next_u64();
    EXPECT_EQ(va, b.next_u64());
    EXPECT_NE(va, c.next_u64());
  }
  BatchRng u(1, 0);
  for (int i = 0; i < 1000; ++i) {
    const double v = u.uniform();
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
    const auto k = u.uniform_int(-3, 3);
    EXPECT_GE(k, -3);
    EXPECT_LE(k, 3);
  }
}

TEST(CountInWindow, Examples) {
  const auto single = materialize(1, 1, ResidueSystem::full(1));
  const auto window = TestSet::box({-0.4}, {0.4});
  const double half[] = {0.5}, point3[] = {0.3};
  EXPECT_EQ(count_in_window(single, half, 1.0, window), 0);
  EXPECT_EQ(count_in_window(single, point3, 1.0, window), 1);
  const auto five = materialize(1, 5, ResidueSystem::full(1));
  const double zero[] = {0.0};
  EXPECT_EQ(count_in_window(five, zero, 0.1, TestSet::box({0.0}, {1.0})), 1);
}

TEST(CountInWindow, MatchesLinearScan) {
  BatchRng rng(99, 0);
  const std::vector<FareySet> sets = {materialize(1, 100, ResidueSystem::full(1)),
                                      materialize(1, 60, ResidueSystem(1, 3, {{1, 1}, {0, 1}})),
                                      materialize(2, 12, ResidueSystem::full(2)),
                                      materialize(2, 8, ResidueSystem(2, 2, {{1, 0, 1}}))};
  int trials = 0;
  for (const auto& set : sets) {
    const int n = set.n();
    const double m = static_cast<double>(set.modulus());
    const double s = natural_scale(set);
    for (int t = 0; t < 250; ++t, ++trials) {
      std::vector<double> x(n);
      for (auto& v : x) v = rng.uniform(-m, 2.0 * m);
      TestSet window;
      if (rng.uniform() < 0.5) {
        std::vector<double> lo(n), hi(n);
        for (int i = 0; i < n; ++i) {
          lo[i] = rng.uniform(-3.0, 2.0);
          hi[i] = lo[i] + rng.uniform(0.01, 3.0);
        }
        window = TestSet::box(lo, hi);
      } else {
        std::vector<double> c(n);
        for (auto& v : c) v = rng.uniform(-1.0, 1.0);
        window = TestSet::ball(c, rng.uniform(0.05, 2.0));
      }
      EXPECT_EQ(count_in_window(set, x, s, window), oracle::window_count_linear(set, x, s, window));
    }
  }
  EXPECT_EQ(trials, 1000);
}

TEST(CountInWindow, TorusTranslationInvariance) {
  const auto set = materialize(2, 10, ResidueSystem(2, 2, {{0, 1, 1}, {1, 1, 1}}));
  const WindowCounter counter(set, natural_scale(set), TestSet::ball({0.1, -0.2}, 1.5));
  BatchRng rng(5, 0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x = {rng.uniform(0.0, 2.0), rng.uniform(0.0, 2.0)};
    const auto base = counter.count(x);
    for (int axis = 0; axis < 2; ++axis) {
      auto y = x;
      y[axis] += 2.0 * static_cast<double>(rng.uniform_int(-2, 2));
      EXPECT_EQ(counter.count(y), base);
    }
  }
}

TEST(CountInWindow, RejectsWindowLargerThanTorus) {
  const auto set = materialize(1, 3, ResidueSystem::full(1));
  EXPECT_THROW(WindowCounter(set, 1.0, TestSet::box({0.0}, {5.0})), ValidationError);
}

TEST(PStat, MeanMatchesLimit) {
  const auto set = materialize(1, 2000, ResidueSystem::full(1));
  const auto r = p_stat(set, torus_domain(1, 1), TestSet::box({0.0}, {0.5}), 16, 100000, 7);
  EXPECT_NEAR(r.mean, 0.5, 0.02);
  const auto unit = p_stat(set, torus_domain(1, 1), TestSet::box({0.0}, {1.0}), 16, 100000, 8);
  EXPECT_NEAR(unit.mean, 1.0, 0.02);
  EXPECT_NEAR(pmf_mass(r), 1.0, 1e-12);
  EXPECT_EQ(r.samples, 100000);
  EXPECT_EQ(r.seed, 7u);
  EXPECT_EQ(r.rng, std::string(kRngName));
}

TEST(PStat, RestrictedMeanAndMonteCarloBand) {
  const auto set = materialize(2, 40, ResidueSystem(2, 2, {{1, 1, 1}}));
  const auto window = TestSet::ball({0.0, 0.0}, 1.0);
  const std::int64_t samples = 40000;
  const auto r = p_stat(set, torus_domain(2, 2), window, 24, samples, 11);
  const double limit = limiting_mean(window, 2);
  // Counts are roughly Poisson with mean `limit`: 4 standard errors.
  EXPECT_NEAR(r.mean, limit, 4.0 * std::sqrt(limit / samples) + 0.01);
}

TEST(PStat, PmfSettlesBetweenQAndTwoQ) {
  const auto window = TestSet::box({0.0}, {2.0});
  const auto a = p_stat(materialize(1, 1000, ResidueSystem::full(1)), torus_domain(1, 1), window,
                        16, 50000, 21);
  const auto b = p_stat(materialize(1, 2000, ResidueSystem::full(1)), torus_domain(1, 1), window,
                        16, 50000, 22);
  EXPECT_LT(total_variation(a, b), 0.05);
}

TEST(PStat, DeterministicAcrossThreadCounts) {
  const auto set = materialize(1, 500, ResidueSystem(1, 2, {{0, 1}}));
  const auto window = TestSet::box({-0.5}, {0.5});
  const auto one = p_stat(set, torus_domain(1, 2), window, 8, 30000, 3, 1);
  const auto many = p_stat(set, torus_domain(1, 2), window, 8, 30000, 3, 4);
  EXPECT_EQ(one.pmf, many.pmf);
  EXPECT_EQ(one.mean, many.mean);
  const auto other_seed = p_stat(set, torus_domain(1, 2), window, 8, 30000, 4, 1);
  EXPECT_NE(one.pmf, other_seed.pmf);
}

TEST(P0Stat, Examples) {
  const auto two = materialize(1, 2, ResidueSystem::full(1));
  const auto r = p0_stat(two, TestSet::box({0.0}, {1.0}), TestSet::box({-0.1}, {0.1}), 4);
  EXPECT_EQ(r.samples, 2);
  EXPECT_DOUBLE_EQ(r.pmf.at(1), 1.0);
  EXPECT_EQ(r.pmf.count(0), 0u);  // empty bins are omitted

  // No normalized gap is below 3/pi^2, so a window (0, L] with smaller L is empty.
  const auto big = materialize(1, 800, ResidueSystem::full(1));
  const auto empty = p0_stat(big, torus_domain(1, 1), TestSet::box({1e-9}, {0.29}), 4);
  EXPECT_DOUBLE_EQ(empty.pmf.at(0), 1.0);

  const auto restricted = materialize(1, 300, ResidueSystem(1, 2, {{0, 1}}));
  const auto rr = p0_stat(restricted, torus_domain(1, 2), TestSet::box({-1.0}, {1.0}), 8);
  EXPECT_EQ(rr.samples, static_cast<std::int64_t>(restricted.size()));
  EXPECT_NEAR(pmf_mass(rr), 1.0, 1e-12);
}

TEST(Validation, DomainAndSamples) {
  const auto set = materialize(1, 10, ResidueSystem::full(1));
  EXPECT_THROW(p_stat(set, torus_domain(2, 1), TestSet::box({0.0}, {1.0}), 4, 10, 1),
               ValidationError);
  EXPECT_THROW(p_stat(set, torus_domain(1, 1), TestSet::box({0.0}, {1.0}), 4, 0, 1),
               ValidationError);
  EXPECT_THROW(p0_stat(set, TestSet::box({5.0}, {6.0}), TestSet::box({0.0}, {1.0}), 4),
               ValidationError);
}
