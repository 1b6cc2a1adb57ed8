#pragma once

// Residue systems A = union of classes a_j Gamma(m), and the exact orbit
// count #A* together with the index [SL(n+1,Z) : Gamma(m)].

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "farey/checked.hpp"
#include "farey/lattice_core.hpp"

namespace farey {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den) {
    if (den == 0) throw ValidationError("den", "zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
    return {num, den};
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational&, const Rational&) = default;
};

/// Prime factorization as (p, e) pairs, ascending.
inline std::vector<std::pair<std::int64_t, int>> factorize(std::int64_t m) {
  std::vector<std::pair<std::int64_t, int>> out;
  for (std::int64_t p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (m > 1) out.emplace_back(m, 1);
  return out;
}

namespace detail {
inline __int128 ipow128(std::int64_t base, long long exp) {
  __int128 r = 1;
  for (long long i = 0; i < exp; ++i) r = checked::mul128(r, base);
  return r;
}
}  // namespace detail

/// |SL(k, Z/m)|, multiplicative over prime powers:
/// |SL(k, Z/p^e)| = p^{(e-1)(k^2-1)} * p^{k(k-1)/2} * prod_{i=2..k} (p^i - 1).
inline std::int64_t sl_order(int k, std::int64_t m) {
  if (k < 1) throw ValidationError("k", "matrix order must be >= 1");
  if (m < 1) throw ValidationError("modulus", "modulus must be >= 1");
  __int128 total = 1;
  for (auto [p, e] : factorize(m)) {
    __int128 f = detail::ipow128(p, static_cast<long long>(e - 1) * (k * k - 1));
    f = checked::mul128(f, detail::ipow128(p, k * (k - 1) / 2));
    for (int i = 2; i <= k; ++i) f = checked::mul128(f, detail::ipow128(p, i) - 1);
    total = checked::mul128(total, f);
  }
  return checked::narrow(total);
}

/// Number of rows r in (Z/m)^{n+1} with gcd(r, m) = 1.
inline std::int64_t unimodular_row_count(int n, std::int64_t m) {
  if (m < 1) throw ValidationError("modulus", "modulus must be >= 1");
  __int128 total = 1;
  for (auto [p, e] : factorize(m)) {
    __int128 f = detail::ipow128(p, static_cast<long long>(e - 1) * (n + 1));
    f = checked::mul128(f, detail::ipow128(p, n + 1) - 1);
    total = checked::mul128(total, f);
  }
  return checked::narrow(total);
}

/// Modulus m and a set of primitive residue rows mod m. m = 1 is the full
/// set of primitive vectors, represented by the single zero class.
class ResidueSystem {
 public:
  ResidueSystem(int n, std::int64_t m, std::vector<IntRow> classes) : n_(n), m_(m) {
    if (n < 1) throw ValidationError("--n", "dimension n must be >= 1");
    if (m < 1) throw ValidationError("--modulus", "modulus must be >= 1");
    if (m == 1) {
      classes_.push_back(IntRow(n + 1, 0));
    } else {
      if (classes.empty())
        throw ValidationError("--class", "at least one residue class is required when modulus > 1");
      for (auto& row : classes) {
        if (static_cast<int>(row.size()) != n + 1)
          throw ValidationError("--class", "class rows must have n+1 entries");
        IntRow r(row.size());
        for (std::size_t i = 0; i < row.size(); ++i) r[i] = ((row[i] % m) + m) % m;
        IntRow with_m = r;
        with_m.push_back(m);
        if (gcd_all(with_m) != 1)
          throw ValidationError("--class", "class row is not primitive modulo m");
        classes_.push_back(std::move(r));
      }
      std::sort(classes_.begin(), classes_.end());
      classes_.erase(std::unique(classes_.begin(), classes_.end()), classes_.end());
    }
    build_table();
  }

  /// The unrestricted system.
  static ResidueSystem full(int n) { return ResidueSystem(n, 1, {}); }

  /// Every primitive residue row mod m: the set of all primitive vectors,
  /// viewed on the torus (R/mZ)^n.
  static ResidueSystem all_classes(int n, std::int64_t m) {
    if (m == 1) return full(n);
    std::vector<IntRow> rows;
    IntRow r(n + 1, 0);
    for (;;) {
      IntRow with_m = r;
      with_m.push_back(m);
      if (gcd_all(with_m) == 1) rows.push_back(r);
      int i = n;
      while (i >= 0 && ++r[i] == m) r[i--] = 0;
      if (i < 0) break;
    }
    return ResidueSystem(n, m, std::move(rows));
  }

  int n() const { return n_; }
  std::int64_t modulus() const { return m_; }
  const std::vector<IntRow>& classes() const { return classes_; }
  std::size_t class_count() const { return classes_.size(); }
  bool is_full() const {
    return m_ == 1 || static_cast<std::int64_t>(classes_.size()) == unimodular_row_count(n_, m_);
  }

  /// True iff (p mod m, q mod m) is one of the class rows.
  bool contains(std::span<const std::int64_t> p, std::int64_t q) const {
    if (m_ == 1) return true;
    std::int64_t idx = 0;
    for (auto v : p) idx = idx * m_ + mod(v);
    idx = idx * m_ + mod(q);
    if (!table_.empty()) return table_[static_cast<std::size_t>(idx)] != 0;
    IntRow r(p.size() + 1);
    for (std::size_t i = 0; i < p.size(); ++i) r[i] = mod(p[i]);
    r.back() = mod(q);
    return std::binary_search(classes_.begin(), classes_.end(), r);
  }

  bool contains(std::span<const std::int64_t> row) const {
    return contains(row.first(row.size() - 1), row.back());
  }

  bool contains(const PrimitivePoint& pt) const { return contains(pt.p, pt.q); }

 private:
  std::int64_t mod(std::int64_t v) const { return ((v % m_) + m_) % m_; }

  void build_table() {
    if (m_ == 1) return;
    __int128 size = detail::ipow128(m_, n_ + 1);
    if (size > (1 << 24)) return;
    table_.assign(static_cast<std::size_t>(size), 0);
    for (const auto& r : classes_) {
      std::int64_t idx = 0;
      for (auto v : r) idx = idx * m_ + v;
      table_[static_cast<std::size_t>(idx)] = 1;
    }
  }

  int n_;
  std::int64_t m_;
  std::vector<IntRow> classes_;
  std::vector<std::uint8_t> table_;
};

/// #A*, [Gamma : Gamma(m)] and the density #A*/[Gamma : Gamma(m)].
struct OrbitCount {
  std::int64_t astar = 1;
  std::int64_t index = 1;
  Rational density{1, 1};
  friend bool operator==(const OrbitCount&, const OrbitCount&) = default;
};

/// Closed form: SL(n+1, Z/m) acts transitively on primitive rows, so each
/// class contributes a coset of the stabilizer, of size |SL| / U(m).
inline OrbitCount astar_count(const ResidueSystem& sys) {
  const int k = sys.n() + 1;
  const std::int64_t m = sys.modulus();
  const std::int64_t index = sl_order(k, m);
  const std::int64_t rows = unimodular_row_count(sys.n(), m);
  const auto classes = static_cast<std::int64_t>(sys.class_count());
  OrbitCount out;
  out.index = index;
  out.astar = checked::mul(classes, index / rows);
  out.density = Rational::make(classes, rows);
  return out;
}

/// Largest (n, m) pairs the brute-force enumeration accepts.
inline bool bruteforce_feasible(int n, std::int64_t m) {
  if (m == 1) return true;
  if (n == 1) return m <= 4;
  if (n == 2) return m <= 3;
  const __int128 cells = detail::ipow128(m, static_cast<long long>(n + 1) * (n + 1));
  return cells <= 65536;
}

/// Full enumeration of SL(n+1, Z/m): counts g with det g = 1 and those with
/// a_j g = (0, ..., 0, 1) mod m for some class a_j.
inline OrbitCount astar_bruteforce(const ResidueSystem& sys) {
  const int n = sys.n();
  const int k = n + 1;
  const std::int64_t m = sys.modulus();
  if (!bruteforce_feasible(n, m))
    throw ValidationError("--modulus", "group too large for brute-force enumeration");
  if (m == 1) return OrbitCount{1, 1, Rational{1, 1}};

  IntMatrix g(k, k);
  std::vector<std::int64_t> cells(static_cast<std::size_t>(k) * k, 0);
  std::int64_t index = 0, astar = 0;
  for (;;) {
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) g(i, j) = cells[i * k + j];
    const std::int64_t det = ((determinant(g) % m) + m) % m;
    if (det == 1 % m) {
      ++index;
      for (const auto& a : sys.classes()) {
        bool hit = true;
        for (int j = 0; j < k && hit; ++j) {
          std::int64_t s = 0;
          for (int i = 0; i < k; ++i) s += a[i] * g(i, j);
          s %= m;
          hit = (s == (j == k - 1 ? 1 : 0));
        }
        if (hit) {
          ++astar;
          break;
        }
      }
    }
    int pos = k * k - 1;
    while (pos >= 0 && ++cells[pos] == m) cells[pos--] = 0;
    if (pos < 0) break;
  }
  return OrbitCount{astar, index, Rational::make(astar, index)};
}

}  // namespace farey
