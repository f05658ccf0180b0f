#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lcrit/errors.hpp"
#include "lcrit/measures.hpp"
#include "lcrit/parallel.hpp"
#include "lcrit/philox.hpp"

namespace lcrit {

constexpr int kMaxHermiteDegree = 40;

/// Physicists' Hermite polynomial H_n(x) = (-1)^n e^{x^2} d^n/dx^n e^{-x^2}
/// by the recurrence H_{n+1} = 2x H_n - 2n H_{n-1}.
inline double hermite(int n, double x) {
  if (n < 0 || n > kMaxHermiteDegree) throw DomainError("hermite: degree must lie in 0..40");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Integer coefficient table of H_0..H_max (coefficient of x^i in H_n at [n][i]).
class HermiteBasis {
 public:
  using Int = boost::multiprecision::cpp_int;

  explicit HermiteBasis(int max_degree) : max_degree_(max_degree) {
    if (max_degree < 0 || max_degree > kMaxHermiteDegree) throw DomainError("HermiteBasis: degree must lie in 0..40");
    coeffs_.push_back({Int(1)});
    if (max_degree >= 1) coeffs_.push_back({Int(0), Int(2)});
    for (int n = 1; n < max_degree; ++n) {
      std::vector<Int> next(static_cast<std::size_t>(n) + 2, Int(0));
      for (std::size_t i = 0; i < coeffs_[n].size(); ++i) next[i + 1] += 2 * coeffs_[n][i];
      for (std::size_t i = 0; i < coeffs_[n - 1].size(); ++i) next[i] -= 2 * n * coeffs_[n - 1][i];
      coeffs_.push_back(std::move(next));
    }
  }

  int max_degree() const noexcept { return max_degree_; }
  const std::vector<Int>& coefficients(int n) const { return coeffs_.at(static_cast<std::size_t>(n)); }

  /// Exact value at an integer point.
  Int operator()(int n, long long x) const {
    const auto& c = coefficients(n);
    Int acc = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

 private:
  int max_degree_;
  std::vector<std::vector<Int>> coeffs_;
};

/// int_a^b e^{-pi u^2} du; infinite limits allowed.
inline double gaussian_box_integral(double a, double b) {
  if (!(a <= b)) throw DomainError("gaussian_box_integral: a must be <= b");
  const double s = std::sqrt(std::numbers::pi);
  if (a >= 0.0) return 0.5 * (std::erfc(s * a) - std::erfc(s * b));
  if (b <= 0.0) return 0.5 * (std::erfc(-s * b) - std::erfc(-s * a));
  return 1.0 - 0.5 * (std::erfc(-s * a) + std::erfc(s * b));
}

/// int_a^b e^{-pi u^2} H_k(sqrt(pi) u) du. For k >= 1 this uses
/// d/dv [e^{-v^2} H_{k-1}(v)] = -e^{-v^2} H_k(v).
inline double hermite_box_integral(int k, double a, double b) {
  if (k < 0 || k > kMaxHermiteDegree) throw DomainError("hermite_box_integral: degree must lie in 0..40");
  if (!(a <= b)) throw DomainError("hermite_box_integral: a must be <= b");
  if (k == 0) return gaussian_box_integral(a, b);
  const double s = std::sqrt(std::numbers::pi);
  auto boundary = [&](double u) {
    if (std::isinf(u)) return 0.0;
    const double v = s * u;
    return std::exp(-v * v) * hermite(k - 1, v);
  };
  return (boundary(a) - boundary(b)) / s;
}

/// Coefficients b_{k,l} of the CLT expansion, indexed by multi-indices k, l
/// of length J.
struct ExpansionCoefficients {
  struct Entry {
    std::vector<int> k;
    std::vector<int> l;
    double value = 0.0;
    int order() const {
      int o = 0;
      for (int x : k) o += x;
      for (int x : l) o += x;
      return o;
    }
  };

  std::size_t J = 1;
  int max_order = 0;
  std::vector<Entry> entries;

  static ExpansionCoefficients leading(std::size_t J) {
    ExpansionCoefficients c;
    c.J = J;
    c.entries.push_back({std::vector<int>(J, 0), std::vector<int>(J, 0), 1.0});
    return c;
  }

  void validate() const {
    bool has_leading = false;
    for (const auto& e : entries) {
      if (e.k.size() != J || e.l.size() != J) throw DimensionError("ExpansionCoefficients: multi-index length must equal J");
      for (int x : e.k) {
        if (x < 0 || x > kMaxHermiteDegree) throw DomainError("ExpansionCoefficients: index outside 0..40");
      }
      for (int x : e.l) {
        if (x < 0 || x > kMaxHermiteDegree) throw DomainError("ExpansionCoefficients: index outside 0..40");
      }
      const int o = e.order();
      if (o == 1) throw DomainError("ExpansionCoefficients: order-1 coefficients vanish and may not be supplied");
      if (o > max_order) throw DomainError("ExpansionCoefficients: entry order exceeds max_order");
      if (o == 0) {
        if (e.value != 1.0) throw DomainError("ExpansionCoefficients: b_{0,0} must equal 1");
        has_leading = true;
      }
    }
    if (!has_leading) throw DomainError("ExpansionCoefficients: b_{0,0} = 1 is required");
  }
};

/// Box in normalized coordinates: log-modulus in [a_j, b_j], argument in [c_j, d_j].
struct CLTRectangle {
  std::vector<double> a, b, c, d;
  std::vector<double> psi;

  std::size_t J() const noexcept { return a.size(); }

  void validate() const {
    const std::size_t J = a.size();
    if (b.size() != J || c.size() != J || d.size() != J || psi.size() != J) throw DimensionError("CLTRectangle: ragged bounds");
    for (std::size_t j = 0; j < J; ++j) {
      // a = b is admitted; its predicted probability is 0.
      if (!(a[j] <= b[j]) || !(c[j] <= d[j])) throw DomainError("CLTRectangle: lower bound exceeds upper bound");
      if (!(psi[j] > 0.0)) throw DomainError("CLTRectangle: psi must be positive");
    }
  }
};

/// sum_{k,l} b_{k,l} prod_j psi_j^{-(k_j + l_j)/2} int e^{-pi u^2} H_{k_j} int e^{-pi v^2} H_{l_j}.
inline double expansion_eval(const ExpansionCoefficients& coeffs, const CLTRectangle& rect) {
  coeffs.validate();
  rect.validate();
  if (coeffs.J != rect.J()) throw DimensionError("expansion_eval: J mismatch");
  double total = 0.0;
  for (const auto& e : coeffs.entries) {
    double term = e.value;
    for (std::size_t j = 0; j < rect.J(); ++j) {
      term *= std::pow(rect.psi[j], -0.5 * (e.k[j] + e.l[j]));
      term *= hermite_box_integral(e.k[j], rect.a[j], rect.b[j]) * hermite_box_integral(e.l[j], rect.c[j], rect.d[j]);
    }
    total += term;
  }
  return total;
}

/// CDF of the density e^{-pi u^2}.
inline double clt_cdf(double u) { return 0.5 * std::erfc(-std::sqrt(std::numbers::pi) * u); }

/// One-sample KS distance of `xs` (sorted in place) against clt_cdf.
inline double ks_against_clt(std::vector<double>& xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double F = clt_cdf(xs[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

struct CLTConfig {
  double G = 4.0;
  /// xi_j per spec; psi_j = xi_j log G.
  std::vector<double> xi{1.0};
  /// KS threshold c / sqrt(n).
  double ks_constant = 1.63;
  ExpansionCoefficients coeffs = ExpansionCoefficients::leading(1);
};

struct BoxComparison {
  CLTRectangle rect;
  double empirical = 0.0;
  double predicted = 0.0;
  double std_error = 0.0;
};

struct CLTReport {
  std::size_t n = 0;
  std::vector<double> psi;
  std::vector<double> ks;  // per coordinate, in measure column order
  double ks_threshold = 0.0;
  std::vector<BoxComparison> boxes;
  bool pass = false;
};

/// Standard battery of normalized boxes: symmetric cubes and half-spaces.
inline std::vector<CLTRectangle> clt_box_battery(const std::vector<double>& psi) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const std::size_t J = psi.size();
  std::vector<CLTRectangle> out;
  for (double s : {0.1, 0.25, 0.5}) {
    out.push_back({std::vector<double>(J, -s), std::vector<double>(J, s), std::vector<double>(J, -s), std::vector<double>(J, s), psi});
  }
  out.push_back({std::vector<double>(J, -inf), std::vector<double>(J, 0.0), std::vector<double>(J, -inf), std::vector<double>(J, inf), psi});
  out.push_back({std::vector<double>(J, -inf), std::vector<double>(J, inf), std::vector<double>(J, 0.0), std::vector<double>(J, inf), psi});
  out.push_back({std::vector<double>(J, 0.0), std::vector<double>(J, 0.3), std::vector<double>(J, -0.3), std::vector<double>(J, 0.0), psi});
  return out;
}

/// Normalizes each coordinate by sqrt(pi psi_j) and compares with the
/// leading-order prediction.
inline CLTReport clt_fit(const EmpiricalMeasure& m, const CLTConfig& config, unsigned workers = 1) {
  m.validate();
  const std::size_t J = config.xi.size();
  if (m.dim != 2 * J) throw DimensionError("clt_fit: measure dimension must equal 2J");
  if (!(config.G > 1.0)) throw DomainError("clt_fit: G must exceed 1");
  CLTReport r;
  r.n = m.size();
  for (double xi : config.xi) {
    if (!(xi > 0.0)) throw DomainError("clt_fit: xi must be positive");
    r.psi.push_back(xi * std::log(config.G));
  }
  auto normalized = [&](std::size_t i, std::size_t k) { return m.data[i * m.dim + k] / std::sqrt(std::numbers::pi * r.psi[k / 2]); };

  r.ks.assign(m.dim, 0.0);
  parallel_for(m.dim, workers, [&](std::size_t k) {
    std::vector<double> xs(r.n);
    for (std::size_t i = 0; i < r.n; ++i) xs[i] = normalized(i, k);
    r.ks[k] = ks_against_clt(xs);
  });
  r.ks_threshold = config.ks_constant / std::sqrt(static_cast<double>(r.n));
  r.pass = std::all_of(r.ks.begin(), r.ks.end(), [&](double d) { return d <= r.ks_threshold; });

  for (auto& rect : clt_box_battery(r.psi)) {
    BoxComparison b;
    b.predicted = expansion_eval(config.coeffs, rect);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < r.n; ++i) {
      bool in = true;
      for (std::size_t j = 0; j < J && in; ++j) {
        const double u = normalized(i, 2 * j), v = normalized(i, 2 * j + 1);
        in = u >= rect.a[j] && u <= rect.b[j] && v >= rect.c[j] && v <= rect.d[j];
      }
      inside += in ? 1 : 0;
    }
    b.empirical = static_cast<double>(inside) / static_cast<double>(r.n);
    b.std_error = std::sqrt(std::max(b.predicted * (1.0 - b.predicted), 0.0) / static_cast<double>(r.n));
    b.rect = std::move(rect);
    r.boxes.push_back(std::move(b));
  }
  return r;
}

/// n points whose 2J coordinates are independent with density e^{-pi u^2}
/// after normalization by sqrt(pi psi) (psi = log G for every coordinate).
inline EmpiricalMeasure synthetic_clt_measure(std::size_t n, std::size_t J, double G, std::uint64_t seed) {
  EmpiricalMeasure m(2 * J, Provenance::synthetic);
  m.data.resize(n * 2 * J);
  const CounterUniform uniform(seed, KeyDomain::synthetic);
  const double scale = std::sqrt(std::numbers::pi * std::log(G)) / std::sqrt(2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < 2 * J; k += 2) {
      // Box-Muller; 1 - u keeps the logarithm finite.
      const auto u = uniform.pair(i, k);
      const double rad = std::sqrt(-2.0 * std::log(1.0 - u[0]));
      m.data[i * 2 * J + k] = scale * rad * std::cos(2.0 * std::numbers::pi * u[1]);
      m.data[i * 2 * J + k + 1] = scale * rad * std::sin(2.0 * std::numbers::pi * u[1]);
    }
  }
  return m;
}

}  // namespace lcrit
