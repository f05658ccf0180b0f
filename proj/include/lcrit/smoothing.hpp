#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iterator>
#include <numbers>
#include <string>
#include <vector>

#include "lcrit/arith.hpp"
#include "lcrit/errors.hpp"
#include "lcrit/parallel.hpp"
#include "lcrit/philox.hpp"

namespace lcrit {

/// Fejer kernel K(z) = sin^2(pi z) / (pi z)^2, K(0) = 1.
inline double bs_K(double z) {
  const double pz = std::numbers::pi * z;
  if (std::abs(z) < 1e-4) {
    const double p2 = pz * pz;
    return 1.0 - p2 / 3.0 + 2.0 * p2 * p2 / 45.0;
  }
  // sin^2(pi z) has period 1; reduce first so large z keeps full accuracy.
  const double r = z - std::nearbyint(z);
  const double s = std::sin(std::numbers::pi * r);
  return s * s / (pz * pz);
}

/// Fourier transform of K: the tent max(0, 1 - |x|).
inline double khat(double x) { return std::max(0.0, 1.0 - std::abs(x)); }

struct HValue {
  double value = 0.0;
  /// Bound on the error of the asymptotic tail sum_{n > N}.
  double tail_bound = 0.0;
  int terms = 0;
};

inline int bs_default_terms(double z) { return std::max(64, static_cast<int>(std::ceil(std::abs(z))) + 64); }

namespace detail {

// psi'(x) for x >= 16 by the asymptotic series; `omitted` gets the first
// dropped term.
inline long double trigamma_asymptotic(long double x, long double& omitted) {
  constexpr int kTerms = 8;
  const long double inv = 1.0L / x;
  const long double inv2 = inv * inv;
  long double acc = inv + 0.5L * inv2;
  long double pw = inv * inv2;  // x^{-3}
  for (int k = 1; k <= kTerms; ++k) {
    acc += static_cast<long double>(bernoulli_even(k)) * pw;
    pw *= inv2;
  }
  omitted = std::abs(static_cast<long double>(bernoulli_even(kTerms + 1)) * pw);
  return acc;
}

}  // namespace detail

/// H(z) = sin^2(pi z)/pi^2 (sum_n sgn(n)/(z - n)^2 + 2/z), series summed
/// directly for |n| <= N with the remainder psi'(N+1-z) - psi'(N+1+z) added
/// from the asymptotic expansion. The term nearest to z is folded into a
/// Fejer kernel, so integers are regular points. N = 0 picks N adaptively.
inline HValue bs_H_detailed(double z, int N = 0) {
  if (!std::isfinite(z)) throw DomainError("bs_H: z must be finite");
  if (N == 0) N = bs_default_terms(z);
  if (N < 64) throw DomainError("bs_H: series_terms must be >= 64");
  const long double x_lo = static_cast<long double>(N) + 1.0L - std::abs(static_cast<long double>(z));
  if (x_lo < 16.0L) {
    throw TruncationError("bs_H: N = " + std::to_string(N) + " too small for |z| = " + std::to_string(std::abs(z)));
  }
  const long double zl = z;
  const long long m = std::llround(z);
  long double sum = 0.0L;
  for (long long n = 1; n <= N; ++n) {
    const long double nl = static_cast<long double>(n);
    if (n != m) sum += 1.0L / ((zl - nl) * (zl - nl));
    if (-n != m) sum -= 1.0L / ((zl + nl) * (zl + nl));
  }
  long double om1 = 0.0L, om2 = 0.0L;
  const long double up = static_cast<long double>(N) + 1.0L;
  sum += detail::trigamma_asymptotic(up - zl, om1) - detail::trigamma_asymptotic(up + zl, om2);

  const double r = z - static_cast<double>(m);
  const double s = std::sin(std::numbers::pi * r);
  const double weight = s * s / (std::numbers::pi * std::numbers::pi);  // sin^2(pi z)/pi^2
  double value = weight * static_cast<double>(sum) + 2.0 * z * bs_K(z);
  if (m != 0) value += (m > 0 ? 1.0 : -1.0) * bs_K(r);
  const double tail = weight * static_cast<double>(om1 + om2);
  if (tail > 1e-8) throw TruncationError("bs_H: tail bound " + std::to_string(tail) + " exceeds 1e-8");
  return {value, tail, N};
}

inline double bs_H(double z, int N = 0) { return bs_H_detailed(z, N).value; }

/// Beurling-Selberg minorant of the indicator of [a, b] with Fourier
/// support in [-delta, delta].
struct BSFunction {
  double a = 0.0;
  double b = 1.0;
  double delta = 1.0;
  /// 0 chooses N per evaluation point.
  int series_terms = 0;

  void validate() const {
    if (!(a < b)) throw DomainError("BSFunction: a must be < b");
    if (!(delta > 0.0)) throw DomainError("BSFunction: delta must be positive");
    if (series_terms != 0 && series_terms < 64) throw DomainError("BSFunction: series_terms must be >= 64");
  }
};

inline double bs_F(const BSFunction& f, double x) {
  f.validate();
  const double u = f.delta * (x - f.a);
  const double v = f.delta * (f.b - x);
  const int nu = f.series_terms == 0 ? 0 : std::max(f.series_terms, bs_default_terms(u) - 48);
  const int nv = f.series_terms == 0 ? 0 : std::max(f.series_terms, bs_default_terms(v) - 48);
  return 0.5 * (bs_H(u, nu) - bs_K(u) + bs_H(v, nv) - bs_K(v));
}

/// Fourier transform of the indicator of [a, b] at y.
inline std::complex<double> indicator_fourier(double a, double b, double y) {
  if (y == 0.0) return {b - a, 0.0};
  const double w = 2.0 * std::numbers::pi * y;
  const std::complex<double> ea = std::polar(1.0, -w * a), eb = std::polar(1.0, -w * b);
  return (ea - eb) / std::complex<double>(0.0, w);
}

struct QuadratureParams {
  /// Half-width of the window around [a, b], measured in units of 1/delta.
  double z_window = 300.0;
  /// Nodes per unit of bandwidth: h = 1 / (oversample (delta + |y|)).
  double oversample = 2.5;
  /// Error estimates above this raise QuadratureError.
  double max_error = 1e-2;
};

struct FourierValue {
  std::complex<double> value;
  double error_estimate = 0.0;
  std::size_t nodes = 0;
};

/// Trapezoid rule for int g(x) e^{-2 pi i x y} dx over centre +- (core + margin)
/// with step h, g bandlimited. Returns the estimates on that window with steps
/// h and 2h, and on the window with the margin halved.
template <class G>
std::array<std::complex<double>, 3> fourier_trapezoid(G&& g, double centre, double core, double margin, double h, double y) {
  const auto n = static_cast<long long>(std::ceil((core + margin) / h));
  std::complex<double> full{0.0, 0.0}, coarse{0.0, 0.0}, half{0.0, 0.0};
  const auto n_half = static_cast<long long>(std::ceil((core + 0.5 * margin) / h));
  for (long long k = -n; k <= n; ++k) {
    const double x = centre + static_cast<double>(k) * h;
    const double w = (k == -n || k == n) ? 0.5 : 1.0;
    const std::complex<double> v = g(x) * std::polar(1.0, -2.0 * std::numbers::pi * x * y);
    full += w * v;
    if (k % 2 == 0) coarse += ((k == -n || k == n) ? 0.5 : 1.0) * v;
    if (k >= -n_half && k <= n_half) half += ((k == -n_half || k == n_half) ? 0.5 : 1.0) * v;
  }
  return {full * h, coarse * (2.0 * h), half * h};
}

/// Numerical Fourier transform of bs_F at y. The integrand is bandlimited to
/// delta + |y|, so the trapezoid rule with h below 1 / (delta + |y|) carries
/// no aliasing error; the remaining error is window truncation.
inline FourierValue bs_F_fourier(const BSFunction& f, double y, const QuadratureParams& params = {}) {
  f.validate();
  if (!(params.z_window > 0.0 && params.oversample > 1.0)) throw DomainError("bs_F_fourier: bad quadrature parameters");
  const double h = 1.0 / (params.oversample * (f.delta + std::abs(y)));
  const double centre = 0.5 * (f.a + f.b);
  const double core = 0.5 * (f.b - f.a), margin = params.z_window / f.delta;
  const double half_width = core + margin;
  const auto [full, coarse, half] = fourier_trapezoid([&](double x) { return bs_F(f, x); }, centre, core, margin, h, y);
  FourierValue out;
  out.value = full;
  out.error_estimate = std::abs(full - coarse) + std::abs(full - half);
  out.nodes = static_cast<std::size_t>(2 * std::ceil(half_width / h) + 1);
  if (!std::isfinite(out.error_estimate) || out.error_estimate > params.max_error) {
    throw QuadratureError("bs_F_fourier: error estimate " + std::to_string(out.error_estimate) + " above " +
                          std::to_string(params.max_error));
  }
  return out;
}

inline std::vector<FourierValue> bs_F_fourier(const BSFunction& f, const std::vector<double>& ys, const QuadratureParams& params = {},
                                              unsigned workers = 1) {
  std::vector<FourierValue> out(ys.size());
  parallel_for(ys.size(), workers, [&](std::size_t i) { out[i] = bs_F_fourier(f, ys[i], params); });
  return out;
}

// ---------------------------------------------------------------------------
// Certificate batch
// ---------------------------------------------------------------------------

struct BSCase {
  BSFunction f;
  double x = 0.0;
};

/// Case i of a random batch: b - a in [0.1, 10], delta in [1, 100], x within
/// a few lengths and a few 1/delta of [a, b].
inline BSCase bs_random_case(std::uint64_t seed, std::uint64_t i) {
  const CounterUniform uniform(seed, KeyDomain::bs_batch);
  const auto u01 = uniform.pair(i, 0);
  const auto u23 = uniform.pair(i, 1);
  BSCase c;
  c.f.a = -5.0 + 10.0 * u01[0];
  c.f.b = c.f.a + 0.1 + 9.9 * u01[1];
  c.f.delta = 1.0 + 99.0 * u23[0];
  const double len = c.f.b - c.f.a;
  const double margin = len + 5.0 / c.f.delta;
  c.x = c.f.a - margin + (len + 2.0 * margin) * u23[1];
  return c;
}

struct BSCheckReport {
  std::size_t cases = 0;
  std::size_t bound_violations = 0;     // |F| > 1 + slack
  std::size_t sandwich_violations = 0;  // 1_[a,b] - F outside [0, K + K] by more than slack
  double worst_excess = 0.0;
};

inline BSCheckReport bs_certificate_batch(std::size_t n, std::uint64_t seed, double slack = 1e-8, unsigned workers = 1) {
  std::vector<double> excess_bound(n), excess_lo(n), excess_hi(n);
  parallel_for(n, workers, [&](std::size_t i) {
    const BSCase c = bs_random_case(seed, i);
    const double F = bs_F(c.f, c.x);
    const double ind = (c.x >= c.f.a && c.x <= c.f.b) ? 1.0 : 0.0;
    const double gap = ind - F;
    const double env = bs_K(c.f.delta * (c.x - c.f.a)) + bs_K(c.f.delta * (c.f.b - c.x));
    excess_bound[i] = std::abs(F) - 1.0;
    excess_lo[i] = -gap;
    excess_hi[i] = gap - env;
  });
  BSCheckReport r;
  r.cases = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (excess_bound[i] > slack) ++r.bound_violations;
    if (excess_lo[i] > slack || excess_hi[i] > slack) ++r.sandwich_violations;
    r.worst_excess = std::max({r.worst_excess, excess_bound[i], excess_lo[i], excess_hi[i]});
  }
  return r;
}

struct BSFourierReport {
  std::size_t instances = 0;
  /// max |F^(y)| at |y| = 1.2 delta
  double worst_outside = 0.0;
  /// max delta |F^(y) - 1^_[a,b](y)| over |y| <= delta / 2; the bound is 3
  double worst_inside = 0.0;
  /// max |K^(y) - tent(y)| over the fixed tent points
  double worst_tent = 0.0;
  std::size_t failures = 0;
};

inline constexpr double kTentPoints[7] = {-1.5, -1.0, -0.5, 0.0, 0.3, 1.0, 2.0};

/// Support and indicator checks on `n` random instances plus the Fejer tent
/// transform at kTentPoints.
inline BSFourierReport bs_fourier_battery(std::size_t n, std::uint64_t seed, unsigned workers = 1, double support_tol = 1e-6,
                                          double tent_tol = 1e-6) {
  constexpr int kInside = 10;
  std::vector<double> outside(n), inside(n), tent(std::size(kTentPoints));
  parallel_for(n, workers, [&](std::size_t i) {
    const BSFunction f = bs_random_case(seed, i).f;
    for (double y : {1.2 * f.delta, -1.2 * f.delta}) outside[i] = std::max(outside[i], std::abs(bs_F_fourier(f, y).value));
    const CounterUniform uniform(seed, KeyDomain::synthetic);
    for (int k = 0; k < kInside; ++k) {
      const double y = 0.5 * f.delta * (2.0 * uniform(i, static_cast<std::uint64_t>(k)) - 1.0);
      inside[i] = std::max(inside[i], f.delta * std::abs(bs_F_fourier(f, y).value - indicator_fourier(f.a, f.b, y)));
    }
  });
  parallel_for(tent.size(), workers, [&](std::size_t k) {
    const double y = kTentPoints[k];
    const auto r = fourier_trapezoid([](double x) { return bs_K(x); }, 0.0, 0.0, 2e5, 1.0 / (2.5 * (1.0 + std::abs(y))), y);
    tent[k] = std::abs(r[0] - std::complex<double>(khat(y), 0.0));
  });
  BSFourierReport r;
  r.instances = n;
  for (std::size_t i = 0; i < n; ++i) {
    r.worst_outside = std::max(r.worst_outside, outside[i]);
    r.worst_inside = std::max(r.worst_inside, inside[i]);
    if (outside[i] > support_tol || inside[i] > 3.0) ++r.failures;
  }
  for (double d : tent) {
    r.worst_tent = std::max(r.worst_tent, d);
    if (d > tent_tol) ++r.failures;
  }
  return r;
}

}  // namespace lcrit
