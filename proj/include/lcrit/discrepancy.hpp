#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include "lcrit/errors.hpp"
#include "lcrit/measures.hpp"
#include "lcrit/parallel.hpp"
#include "lcrit/philox.hpp"

namespace lcrit {

struct DiscrepancyOptions {
  /// Grid resolution per axis for dim >= 3; 0 picks the largest resolution
  /// within the cost budget (64 in dim 3).
  int grid_resolution = 0;
  double cost_budget = 4e8;
};

struct DiscrepancyResult {
  double value = 0.0;
  /// False when the grid merged distinct coordinates; value is then a lower bound.
  bool exact = true;
  /// Cells per axis on the grid path, 0 on the sweep paths.
  int resolution = 0;
};

namespace detail {

// Pooled points carry integer weights: +n2 for m1 and -n1 for m2, so every box
// sum is n1 n2 (m1(B) - m2(B)) exactly.
struct Pooled {
  std::size_t dim = 0;
  std::vector<std::vector<std::uint32_t>> level;  // level[k][i]: rank of coordinate k of point i
  std::vector<std::uint32_t> levels;              // distinct values per axis
  std::vector<std::int64_t> weight;
  double denominator = 1.0;  // n1 n2
};

inline Pooled pool(const EmpiricalMeasure& m1, const EmpiricalMeasure& m2) {
  Pooled out;
  out.dim = m1.dim;
  const std::size_t n1 = m1.size(), n2 = m2.size(), n = n1 + n2;
  out.denominator = static_cast<double>(n1) * static_cast<double>(n2);
  out.weight.resize(n);
  for (std::size_t i = 0; i < n1; ++i) out.weight[i] = static_cast<std::int64_t>(n2);
  for (std::size_t i = 0; i < n2; ++i) out.weight[n1 + i] = -static_cast<std::int64_t>(n1);
  auto coord = [&](std::size_t i, std::size_t k) { return i < n1 ? m1.data[i * m1.dim + k] : m2.data[(i - n1) * m2.dim + k]; };
  out.level.assign(out.dim, std::vector<std::uint32_t>(n));
  out.levels.assign(out.dim, 0);
  std::vector<std::size_t> order(n);
  for (std::size_t k = 0; k < out.dim; ++k) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return coord(a, k) < coord(b, k); });
    std::uint32_t rank = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j > 0 && coord(order[j], k) != coord(order[j - 1], k)) ++rank;
      out.level[k][order[j]] = rank;
    }
    out.levels[k] = n == 0 ? 0 : rank + 1;
  }
  return out;
}

// max and min subarray sums (the empty subarray counts as 0).
inline std::pair<std::int64_t, std::int64_t> kadane(const std::int64_t* a, std::size_t n) {
  std::int64_t best = 0, worst = 0, hi = 0, lo = 0;
  for (std::size_t i = 0; i < n; ++i) {
    hi = std::max<std::int64_t>(0, hi) + a[i];
    lo = std::min<std::int64_t>(0, lo) + a[i];
    best = std::max(best, hi);
    worst = std::min(worst, lo);
  }
  return {best, worst};
}

// Segment tree over y levels keeping max and min subarray sums.
class SubarrayTree {
 public:
  explicit SubarrayTree(std::size_t n) {
    size_ = 1;
    while (size_ < n) size_ <<= 1;
    nodes_.assign(2 * size_, Node{});
  }

  void reset() { std::fill(nodes_.begin(), nodes_.end(), Node{}); }

  void add(std::size_t i, std::int64_t w) {
    std::size_t v = size_ + i;
    Node& leaf = nodes_[v];
    leaf.sum += w;
    leaf.pmax = leaf.smax = leaf.best = std::max<std::int64_t>(0, leaf.sum);
    leaf.pmin = leaf.smin = leaf.worst = std::min<std::int64_t>(0, leaf.sum);
    for (v >>= 1; v >= 1; v >>= 1) {
      const Node& l = nodes_[2 * v];
      const Node& r = nodes_[2 * v + 1];
      Node& o = nodes_[v];
      o.sum = l.sum + r.sum;
      o.pmax = std::max(l.pmax, l.sum + r.pmax);
      o.smax = std::max(r.smax, r.sum + l.smax);
      o.best = std::max({l.best, r.best, l.smax + r.pmax});
      o.pmin = std::min(l.pmin, l.sum + r.pmin);
      o.smin = std::min(r.smin, r.sum + l.smin);
      o.worst = std::min({l.worst, r.worst, l.smin + r.pmin});
    }
  }

  std::int64_t best() const { return nodes_[1].best; }
  std::int64_t worst() const { return nodes_[1].worst; }

 private:
  struct Node {
    std::int64_t sum = 0, pmax = 0, smax = 0, best = 0, pmin = 0, smin = 0, worst = 0;
  };
  std::size_t size_;
  std::vector<Node> nodes_;
};

inline std::int64_t sweep_1d(const Pooled& p) {
  std::vector<std::int64_t> a(p.levels[0], 0);
  for (std::size_t i = 0; i < p.weight.size(); ++i) a[p.level[0][i]] += p.weight[i];
  const auto [best, worst] = kadane(a.data(), a.size());
  return std::max(best, -worst);
}

inline std::int64_t sweep_2d(const Pooled& p) {
  const std::size_t kx = p.levels[0], ky = p.levels[1];
  std::vector<std::vector<std::size_t>> bucket(kx);
  for (std::size_t i = 0; i < p.weight.size(); ++i) bucket[p.level[0][i]].push_back(i);
  SubarrayTree tree(ky);
  std::int64_t best = 0;
  for (std::size_t lo = 0; lo < kx; ++lo) {
    tree.reset();
    for (std::size_t hi = lo; hi < kx; ++hi) {
      for (std::size_t i : bucket[hi]) tree.add(p.level[1][i], p.weight[i]);
      best = std::max({best, tree.best(), -tree.worst()});
    }
  }
  return best;
}

// Max and min box sums of a dense array with the given extents (row-major,
// first axis slowest).
inline std::pair<std::int64_t, std::int64_t> max_box(const std::int64_t* a, const std::size_t* dims, std::size_t rank) {
  if (rank == 1) return kadane(a, dims[0]);
  std::size_t slab = 1;
  for (std::size_t k = 1; k < rank; ++k) slab *= dims[k];
  std::int64_t best = 0, worst = 0;
  std::vector<std::int64_t> acc(slab);
  for (std::size_t lo = 0; lo < dims[0]; ++lo) {
    std::fill(acc.begin(), acc.end(), 0);
    for (std::size_t hi = lo; hi < dims[0]; ++hi) {
      const std::int64_t* row = a + hi * slab;
      for (std::size_t j = 0; j < slab; ++j) acc[j] += row[j];
      const auto [b, w] = max_box(acc.data(), dims + 1, rank - 1);
      best = std::max(best, b);
      worst = std::min(worst, w);
    }
  }
  return {best, worst};
}

inline int auto_resolution(std::size_t dim, double budget) {
  int r = 64;
  while (r > 2) {
    const double cost = std::pow(static_cast<double>(r), 2.0 * static_cast<double>(dim) - 1.0) / std::pow(2.0, static_cast<double>(dim) - 1.0);
    if (cost <= budget) break;
    --r;
  }
  return r;
}

inline DiscrepancyResult grid_path(const Pooled& p, int resolution) {
  DiscrepancyResult out;
  out.resolution = resolution;
  std::vector<std::size_t> dims(p.dim);
  std::size_t cells = 1;
  for (std::size_t k = 0; k < p.dim; ++k) {
    dims[k] = std::min<std::size_t>(p.levels[k], static_cast<std::size_t>(resolution));
    if (p.levels[k] > dims[k]) out.exact = false;
    cells *= dims[k];
  }
  std::vector<std::int64_t> grid(cells, 0);
  for (std::size_t i = 0; i < p.weight.size(); ++i) {
    std::size_t idx = 0;
    for (std::size_t k = 0; k < p.dim; ++k) {
      // Quantile cells: equal numbers of distinct levels per cell.
      const std::size_t cell = static_cast<std::size_t>(p.level[k][i]) * dims[k] / p.levels[k];
      idx = idx * dims[k] + cell;
    }
    grid[idx] += p.weight[i];
  }
  const auto [best, worst] = max_box(grid.data(), dims.data(), dims.size());
  out.value = static_cast<double>(std::max(best, -worst)) / p.denominator;
  return out;
}

}  // namespace detail

/// sup over closed axis-parallel boxes of |m1(B) - m2(B)|. Exact in dims 1
/// and 2; in higher dims computed on a quantile grid and exact only when no
/// axis has more distinct coordinates than the grid resolution.
inline DiscrepancyResult discrepancy(const EmpiricalMeasure& m1, const EmpiricalMeasure& m2, const DiscrepancyOptions& options = {}) {
  if (m1.dim != m2.dim) throw DimensionError("discrepancy: dimension mismatch");
  if (m1.size() == 0 || m2.size() == 0) throw DomainError("discrepancy: empty measure");
  const detail::Pooled p = detail::pool(m1, m2);
  if (p.dim == 1) return {static_cast<double>(detail::sweep_1d(p)) / p.denominator, true, 0};
  if (p.dim == 2) return {static_cast<double>(detail::sweep_2d(p)) / p.denominator, true, 0};
  const int r = options.grid_resolution > 0 ? options.grid_resolution : detail::auto_resolution(p.dim, options.cost_budget);
  return detail::grid_path(p, r);
}

/// Largest one-dimensional KS distance over the coordinate marginals.
inline double marginal_ks(const EmpiricalMeasure& m1, const EmpiricalMeasure& m2) {
  if (m1.dim != m2.dim) throw DimensionError("marginal_ks: dimension mismatch");
  double best = 0.0;
  for (std::size_t k = 0; k < m1.dim; ++k) {
    std::vector<double> a(m1.size()), b(m2.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = m1.data[i * m1.dim + k];
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = m2.data[i * m2.dim + k];
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
      double x;
      if (j == b.size() || (i < a.size() && a[i] <= b[j])) x = a[i];
      else x = b[j];
      while (i < a.size() && a[i] == x) ++i;
      while (j < b.size() && b[j] == x) ++j;
      best = std::max(best, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
    }
  }
  return best;
}

struct NoiseFloor {
  double mean = 0.0;
  std::vector<double> draws;
};

/// Permutation null: pool the two samples, split at random into the original
/// sizes and average the discrepancy of the split.
inline NoiseFloor permutation_noise_floor(const EmpiricalMeasure& m1, const EmpiricalMeasure& m2, int permutations, std::uint64_t seed,
                                          unsigned workers = 1, const DiscrepancyOptions& options = {}) {
  if (m1.dim != m2.dim) throw DimensionError("permutation_noise_floor: dimension mismatch");
  if (permutations < 1) throw DomainError("permutation_noise_floor: at least one permutation required");
  const std::size_t n1 = m1.size(), n = n1 + m2.size(), dim = m1.dim;
  std::vector<double> pooled(m1.data);
  pooled.insert(pooled.end(), m2.data.begin(), m2.data.end());
  NoiseFloor out;
  out.draws.assign(static_cast<std::size_t>(permutations), 0.0);
  parallel_for(out.draws.size(), workers, [&](std::size_t k) {
    const CounterUniform uniform(seed, KeyDomain::permutations);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) {  // Fisher-Yates
      const auto j = static_cast<std::size_t>(uniform(k, i) * static_cast<double>(i + 1));
      std::swap(order[i], order[std::min(j, i)]);
    }
    EmpiricalMeasure a(dim, m1.provenance), b(dim, m2.provenance);
    for (std::size_t i = 0; i < n; ++i) {
      auto& target = i < n1 ? a : b;
      target.data.insert(target.data.end(), pooled.begin() + order[i] * dim, pooled.begin() + (order[i] + 1) * dim);
    }
    out.draws[k] = discrepancy(a, b, options).value;
  });
  out.mean = pairwise_sum(out.draws) / static_cast<double>(permutations);
  return out;
}

}  // namespace lcrit
