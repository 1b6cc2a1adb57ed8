#pragma once

// Window counts of Farey points and the empirical statistics P and P0.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "farey/checked.hpp"
#include "farey/farey_enum.hpp"
#include "farey/lattice_core.hpp"
#include "farey/parallel.hpp"
#include "farey/rng.hpp"

namespace farey {

/// Counts points of a Farey set inside translated windows x + s*A on the
/// torus (R/mZ)^n. Points are bucketed into a uniform grid whose cells are at
/// least as wide as the window, so a query visits at most 2^n cells.
class WindowCounter {
 public:
  WindowCounter(const FareySet& set, double scale, TestSet window)
      : n_(set.n()), m_(static_cast<double>(set.modulus())), scale_(scale), window_(std::move(window)) {
    if (window_.dim() != n_) throw ValidationError("--window", "window dimension must equal n");
    if (!(scale_ > 0.0)) throw ValidationError("scale", "scale must be > 0");
    if (!(scale_ * window_.diameter() < m_))
      throw ValidationError("--window", "window too large: s*diam(A) must be below m");
    const auto lo = window_.bbox_lo();
    const auto hi = window_.bbox_hi();
    ext_lo_.resize(n_);
    double width = 0.0;
    for (int i = 0; i < n_; ++i) {
      ext_lo_[i] = scale_ * lo[i];
      width = std::max(width, scale_ * (hi[i] - lo[i]));
      ext_hi_.push_back(scale_ * hi[i]);
    }
    const double budget = std::pow(4.0 * std::max<std::size_t>(set.size(), 1), 1.0 / n_);
    cells_ = static_cast<std::int64_t>(std::floor(std::min({m_ / width, budget, 1048576.0})));
    cells_ = std::max<std::int64_t>(cells_, 1);
    cell_ = m_ / static_cast<double>(cells_);

    std::int64_t total_cells = 1;
    for (int i = 0; i < n_; ++i) total_cells = checked::mul(total_cells, cells_);
    std::vector<std::uint32_t> counts(static_cast<std::size_t>(total_cells) + 1, 0);
    std::vector<std::int64_t> cell_of(set.size());
    for (std::size_t k = 0; k < set.size(); ++k) {
      cell_of[k] = cell_index(set.coords(k));
      ++counts[cell_of[k] + 1];
    }
    offsets_.assign(counts.size(), 0);
    for (std::size_t c = 1; c < counts.size(); ++c) offsets_[c] = offsets_[c - 1] + counts[c];
    coords_.resize(set.size() * static_cast<std::size_t>(n_));
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::size_t k = 0; k < set.size(); ++k) {
      const auto x = set.coords(k);
      const std::size_t slot = fill[cell_of[k]]++;
      std::copy(x.begin(), x.end(), coords_.begin() + slot * n_);
    }
  }

  double scale() const { return scale_; }

  /// Exact number of points r with r - x in s*A modulo the torus.
  std::int64_t count(std::span<const double> x) const {
    std::vector<std::int64_t> first(n_), span_cells(n_), idx(n_, 0);
    for (int i = 0; i < n_; ++i) {
      const auto a = static_cast<std::int64_t>(std::floor((x[i] + ext_lo_[i]) / cell_));
      const auto b = static_cast<std::int64_t>(std::floor((x[i] + ext_hi_[i]) / cell_));
      first[i] = a;
      span_cells[i] = std::min(b - a + 1, cells_);
    }
    std::vector<double> d(n_), u(n_);
    std::int64_t total = 0;
    for (;;) {
      std::int64_t c = 0;
      for (int i = 0; i < n_; ++i) c = c * cells_ + wrap(first[i] + idx[i]);
      for (std::size_t s = offsets_[c]; s < offsets_[c + 1]; ++s) {
        bool inside = true;
        for (int i = 0; i < n_ && inside; ++i) {
          double v = coords_[s * n_ + i] - x[i];
          v -= m_ * std::floor((v - ext_lo_[i]) / m_);
          u[i] = v / scale_;
          inside = v <= ext_hi_[i];
        }
        if (inside && window_.contains(u)) ++total;
      }
      int i = n_ - 1;
      while (i >= 0 && ++idx[i] == span_cells[i]) idx[i--] = 0;
      if (i < 0) break;
    }
    return total;
  }

 private:
  std::int64_t wrap(std::int64_t c) const { return ((c % cells_) + cells_) % cells_; }

  std::int64_t cell_index(const std::vector<double>& x) const {
    std::int64_t c = 0;
    for (int i = 0; i < n_; ++i) {
      auto k = static_cast<std::int64_t>(std::floor(x[i] / cell_));
      c = c * cells_ + std::clamp<std::int64_t>(k, 0, cells_ - 1);
    }
    return c;
  }

  int n_;
  double m_;
  double scale_;
  TestSet window_;
  std::vector<double> ext_lo_, ext_hi_;
  std::int64_t cells_ = 1;
  double cell_ = 1.0;
  std::vector<std::size_t> offsets_;
  std::vector<double> coords_;
};

/// The natural scale (#F_A(Q))^{-1/n}.
inline double natural_scale(const FareySet& set) {
  if (set.size() == 0) throw ValidationError("--q", "empty Farey set");
  return std::pow(static_cast<double>(set.size()), -1.0 / set.n());
}

inline std::int64_t count_in_window(const FareySet& set, std::span<const double> x, double scale,
                                    const TestSet& window) {
  return WindowCounter(set, scale, window).count(x);
}

/// The whole torus [0, m)^n as a test set.
inline TestSet torus_domain(int n, std::int64_t m) {
  return TestSet::box(std::vector<double>(n, 0.0), std::vector<double>(n, static_cast<double>(m)));
}

/// Uniform sample from a box or ball by rejection inside its bounding box.
inline void sample_uniform(const TestSet& d, BatchRng& rng, std::vector<double>& out) {
  const auto lo = d.bbox_lo();
  const auto hi = d.bbox_hi();
  out.resize(lo.size());
  do {
    for (std::size_t i = 0; i < lo.size(); ++i) out[i] = rng.uniform(lo[i], hi[i]);
  } while (!d.contains(out));
}

/// Histogram of counts k = 0..kmax with an overflow bin for k > kmax.
struct CountHistogram {
  std::vector<std::int64_t> bins;
  std::int64_t overflow = 0;
  std::int64_t total = 0;
  std::int64_t sum = 0;  // sum of exact k, overflow included

  explicit CountHistogram(int kmax = 16) : bins(static_cast<std::size_t>(kmax) + 1, 0) {}

  void add(std::int64_t k) {
    if (k < static_cast<std::int64_t>(bins.size()))
      ++bins[static_cast<std::size_t>(k)];
    else
      ++overflow;
    ++total;
    sum += k;
  }

  void merge(const CountHistogram& o) {
    for (std::size_t i = 0; i < bins.size(); ++i) bins[i] += o.bins[i];
    overflow += o.overflow;
    total += o.total;
    sum += o.sum;
  }
};

inline constexpr std::size_t kBatchSize = 1024;

/// Runs `samples` draws in fixed batches; draw(rng) returns the count for one draw.
template <class Draw>
CountHistogram sample_histogram(std::int64_t samples, std::uint64_t seed, int kmax,
                                unsigned threads, Draw&& draw) {
  if (samples < 1) throw ValidationError("--samples", "samples must be >= 1");
  if (kmax < 0) throw ValidationError("--kmax", "kmax must be >= 0");
  const std::size_t batches = (static_cast<std::size_t>(samples) + kBatchSize - 1) / kBatchSize;
  std::vector<CountHistogram> parts(batches, CountHistogram(kmax));
  parallel_for(batches, threads, [&](std::size_t b) {
    BatchRng rng(seed, b);
    const std::size_t begin = b * kBatchSize;
    const std::size_t end = std::min(static_cast<std::size_t>(samples), begin + kBatchSize);
    for (std::size_t s = begin; s < end; ++s) parts[b].add(draw(rng));
  });
  CountHistogram h(kmax);
  for (const auto& p : parts) h.merge(p);
  return h;
}

struct SpacingReport {
  std::string kind;  // "P" or "P0"
  int n = 1;
  std::int64_t Q = 1;
  std::int64_t modulus = 1;
  std::vector<IntRow> classes;
  double scale = 0.0;
  std::map<int, double> pmf;  // k -> frequency, k <= kmax
  double overflow = 0.0;      // frequency of k > kmax
  double mean = 0.0;          // mean of the exact counts
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  std::string rng;
};

inline void fill_distribution(const CountHistogram& h, std::map<int, double>& pmf, double& overflow,
                              double& mean) {
  pmf.clear();
  const double total = static_cast<double>(h.total);
  for (std::size_t k = 0; k < h.bins.size(); ++k)
    if (h.bins[k] > 0) pmf[static_cast<int>(k)] = static_cast<double>(h.bins[k]) / total;
  overflow = static_cast<double>(h.overflow) / total;
  mean = static_cast<double>(h.sum) / total;
}

/// Monte Carlo estimate of P_Q^A(k, D, A): x uniform in D, k the number of
/// Farey points in x + s*A with s = (#F_A(Q))^{-1/n}.
inline SpacingReport p_stat(const FareySet& set, const TestSet& domain, const TestSet& window,
                            int kmax, std::int64_t samples, std::uint64_t seed,
                            unsigned threads = 0) {
  if (domain.dim() != set.n()) throw ValidationError("--domain", "domain dimension must equal n");
  const double s = natural_scale(set);
  const WindowCounter counter(set, s, window);
  const auto h = sample_histogram(samples, seed, kmax, threads, [&](BatchRng& rng) {
    thread_local std::vector<double> x;
    sample_uniform(domain, rng, x);
    return counter.count(x);
  });
  SpacingReport r;
  r.kind = "P";
  r.n = set.n();
  r.Q = set.Q();
  r.modulus = set.modulus();
  r.classes = set.system().classes();
  r.scale = s;
  r.samples = samples;
  r.seed = seed;
  r.rng = std::string(kRngName);
  fill_distribution(h, r.pmf, r.overflow, r.mean);
  return r;
}

/// Exact P_{0,Q}^A(k, D, A) over every Farey point r in D. The window count
/// at r includes r itself when 0 lies in A.
inline SpacingReport p0_stat(const FareySet& set, const TestSet& domain, const TestSet& window,
                             int kmax, unsigned threads = 0) {
  if (domain.dim() != set.n()) throw ValidationError("--domain", "domain dimension must equal n");
  if (kmax < 0) throw ValidationError("--kmax", "kmax must be >= 0");
  const double s = natural_scale(set);
  const WindowCounter counter(set, s, window);
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(set.size(), 256));
  const std::size_t per = (set.size() + chunks - 1) / chunks;
  std::vector<CountHistogram> parts(chunks, CountHistogram(kmax));
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::size_t end = std::min(set.size(), (c + 1) * per);
    for (std::size_t i = c * per; i < end; ++i) {
      const auto x = set.coords(i);
      if (domain.contains(x)) parts[c].add(counter.count(x));
    }
  });
  CountHistogram h(kmax);
  for (const auto& p : parts) h.merge(p);
  if (h.total == 0) throw ValidationError("--domain", "no Farey points inside the domain");
  SpacingReport r;
  r.kind = "P0";
  r.n = set.n();
  r.Q = set.Q();
  r.modulus = set.modulus();
  r.classes = set.system().classes();
  r.scale = s;
  r.samples = h.total;
  r.seed = 0;
  r.rng = "none";
  fill_distribution(h, r.pmf, r.overflow, r.mean);
  return r;
}

/// Limiting mean of P: vol(A) / m^n.
inline double limiting_mean(const TestSet& window, std::int64_t m) {
  return window.volume() / std::pow(static_cast<double>(m), window.dim());
}

/// Total variation distance between two pmfs (overflow bins compared as one extra atom).
inline double total_variation(const SpacingReport& a, const SpacingReport& b) {
  std::map<int, double> diff;
  for (auto [k, v] : a.pmf) diff[k] += v;
  for (auto [k, v] : b.pmf) diff[k] -= v;
  double tv = std::abs(a.overflow - b.overflow);
  for (auto [k, v] : diff) tv += std::abs(v);
  return 0.5 * tv;
}

}  // namespace farey
