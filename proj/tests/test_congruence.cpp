#include <gtest/gtest.h>

#include <vector>

#include "farey/congruence.hpp"
#include "farey/lattice_core.hpp"

using namespace farey;

namespace {

// |SL(k, Z/m)| by enumerating all k x k matrices over Z/m.
std::int64_t sl_order_by_enumeration(int k, std::int64_t m) {
  IntMatrix g(k, k);
  std::vector<std::int64_t> cells(static_cast<std::size_t>(k) * k, 0);
  std::int64_t count = 0;
  for (;;) {
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) g(i, j) = cells[i * k + j];
    if (((determinant(g) % m) + m) % m == 1 % m) ++count;
    int pos = k * k - 1;
    while (pos >= 0 && ++cells[pos] == m) cells[pos--] = 0;
    if (pos < 0) break;
  }
  return count;
}

// Rows mod m whose entries together with m have gcd 1.
std::int64_t rows_by_enumeration(int n, std::int64_t m) {
  IntRow r(n + 1, 0);
  std::int64_t count = 0;
  for (;;) {
    IntRow with_m = r;
    with_m.push_back(m);
    if (gcd_all(with_m) == 1) ++count;
    int i = n;
    while (i >= 0 && ++r[i] == m) r[i--] = 0;
    if (i < 0) break;
  }
  return count;
}

}  // namespace

TEST(Contains, Examples) {
  const auto full = ResidueSystem::full(1);
  const std::int64_t p1[] = {123};
  EXPECT_TRUE(full.contains(p1, 457));
  const ResidueSystem even(1, 2, {{0, 1}});
  EXPECT_TRUE(even.contains(PrimitivePoint::make({2}, 5)));
  EXPECT_FALSE(even.contains(PrimitivePoint::make({1}, 2)));
  const ResidueSystem ones(1, 3, {{1, 1}});
  EXPECT_TRUE(ones.contains(PrimitivePoint::make({4}, 7)));
  const std::int64_t neg[] = {-2};
  EXPECT_TRUE(ones.contains(neg, 7));  // -2 = 1 mod 3
}

TEST(SlOrder, Examples) {
  EXPECT_EQ(sl_order(2, 2), 6);
  EXPECT_EQ(sl_order(2, 3), 24);
  EXPECT_EQ(sl_order(3, 2), 168);
  EXPECT_EQ(sl_order(2, 1), 1);
}

TEST(SlOrder, MatchesEnumeration) {
  for (auto [k, m] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {2, 4}, {2, 5}, {2, 6},
                                                       {3, 2}, {3, 3}})
    EXPECT_EQ(sl_order(k, m), sl_order_by_enumeration(k, m)) << k << " " << m;
}

TEST(UnimodularRowCount, Examples) {
  EXPECT_EQ(unimodular_row_count(1, 2), 3);
  EXPECT_EQ(unimodular_row_count(1, 4), 12);
  EXPECT_EQ(unimodular_row_count(2, 2), 7);
}

TEST(UnimodularRowCount, MatchesEnumeration) {
  for (int n = 1; n <= 3; ++n)
    for (std::int64_t m = 2; m <= 12; ++m)
      EXPECT_EQ(unimodular_row_count(n, m), rows_by_enumeration(n, m)) << n << " " << m;
}

TEST(AstarCount, Examples) {
  const auto c = astar_count(ResidueSystem(1, 2, {{0, 1}}));
  EXPECT_EQ(c.astar, 2);
  EXPECT_EQ(c.index, 6);
  EXPECT_EQ(c.density, (Rational{1, 3}));
  const auto one = astar_count(ResidueSystem::full(3));
  EXPECT_EQ(one, (OrbitCount{1, 1, Rational{1, 1}}));
  EXPECT_EQ(astar_count(ResidueSystem::all_classes(1, 2)).density, (Rational{1, 1}));
  EXPECT_EQ(astar_count(ResidueSystem::all_classes(2, 6)).density, (Rational{1, 1}));
}

TEST(AstarBruteforce, MatchesClosedForm) {
  const std::vector<std::pair<int, int>> cases = {{1, 2}, {1, 3}, {1, 4}, {2, 2}, {2, 3}};
  for (auto [n, m] : cases) {
    const auto all = ResidueSystem::all_classes(n, m);
    // Every prefix of the class list is itself a valid system.
    for (std::size_t take = 1; take <= all.classes().size(); ++take) {
      std::vector<IntRow> rows(all.classes().begin(), all.classes().begin() + take);
      const ResidueSystem sys(n, m, rows);
      EXPECT_EQ(astar_bruteforce(sys), astar_count(sys)) << n << " " << m << " " << take;
    }
  }
  EXPECT_EQ(astar_bruteforce(ResidueSystem::full(2)), (OrbitCount{1, 1, Rational{1, 1}}));
}

TEST(AstarCount, EachClassAddsTheSameAmount) {
  const auto all = ResidueSystem::all_classes(2, 4);
  const std::int64_t step = sl_order(3, 4) / unimodular_row_count(2, 4);
  std::vector<IntRow> rows;
  std::int64_t previous = 0;
  for (const auto& r : all.classes()) {
    rows.push_back(r);
    const auto c = astar_count(ResidueSystem(2, 4, rows));
    EXPECT_EQ(c.astar - previous, step);
    previous = c.astar;
  }
}

TEST(ResidueSystem, DeduplicatesAfterReduction) {
  const ResidueSystem sys(1, 3, {{1, 1}, {4, -2}, {0, 1}});
  EXPECT_EQ(sys.class_count(), 2u);
  EXPECT_EQ(astar_count(sys).density, (Rational{1, 4}));
}

TEST(ResidueSystem, Validation) {
  try {
    ResidueSystem(1, 2, {});
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.field(), "--class");
  }
  EXPECT_THROW(ResidueSystem(1, 2, {{0, 0}}), ValidationError);     // not primitive mod 2
  EXPECT_THROW(ResidueSystem(1, 4, {{2, 2}}), ValidationError);     // gcd 2 with m
  EXPECT_THROW(ResidueSystem(2, 2, {{0, 1}}), ValidationError);     // wrong length
  EXPECT_THROW(ResidueSystem(0, 1, {}), ValidationError);
  EXPECT_THROW(ResidueSystem(1, 0, {}), ValidationError);
}

TEST(ResidueSystem, TorusRestrictionCoversAllPrimitiveRows) {
  // Every primitive vector falls in one of the rows counted by unimodular_row_count.
  const auto all = ResidueSystem::all_classes(2, 6);
  EXPECT_EQ(static_cast<std::int64_t>(all.class_count()), unimodular_row_count(2, 6));
  for (std::int64_t q = 1; q <= 12; ++q)
    for (std::int64_t a = 0; a < 12; ++a)
      for (std::int64_t b = 0; b < 12; ++b) {
        const std::int64_t v[] = {a, b, q};
        if (gcd_all(v) == 1) {
          const std::int64_t p[] = {a, b};
          EXPECT_TRUE(all.contains(p, q));
        }
      }
}

TEST(BruteforceFeasible, Bounds) {
  EXPECT_TRUE(bruteforce_feasible(1, 4));
  EXPECT_FALSE(bruteforce_feasible(1, 5));
  EXPECT_TRUE(bruteforce_feasible(2, 3));
  EXPECT_FALSE(bruteforce_feasible(2, 4));
  EXPECT_TRUE(bruteforce_feasible(3, 2));
  EXPECT_THROW(astar_bruteforce(ResidueSystem(2, 5, {{0, 0, 1}})), ValidationError);
}
