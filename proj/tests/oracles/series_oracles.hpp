#pragma once

// Quad-precision reference values for zeta(s) and L(s, chi_4) from alternating
// series with a Boole summation tail:
//   sum_{n>=0} (-1)^n f(N+n) = f(N)/2 - sum_k (2^{2k}-1) B_{2k}/(2k)! f^{(2k-1)}(N).

#include <quadmath.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Rat = boost::multiprecision::cpp_rational;
using Q = __float128;

struct CQ {
  Q re = 0, im = 0;
  CQ operator+(const CQ& o) const { return {re + o.re, im + o.im}; }
  CQ operator-(const CQ& o) const { return {re - o.re, im - o.im}; }
  CQ operator*(const CQ& o) const { return {re * o.re - im * o.im, re * o.im + im * o.re}; }
  CQ operator*(Q s) const { return {re * s, im * s}; }
  CQ operator/(const CQ& o) const {
    const Q d = o.re * o.re + o.im * o.im;
    return {(re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d};
  }
  std::complex<double> to_double() const { return {static_cast<double>(re), static_cast<double>(im)}; }
};

/// Bernoulli numbers B_0..B_n by the Akiyama-Tanigawa algorithm (B_1 = +1/2 there;
/// only even indices are used below).
inline std::vector<Rat> akiyama_tanigawa(int n) {
  std::vector<Rat> a(static_cast<std::size_t>(n) + 1), out(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) {
    a[m] = Rat(1, m + 1);
    for (int j = m; j >= 1; --j) a[j - 1] = j * (a[j - 1] - a[j]);
    out[m] = a[0];
  }
  return out;
}

inline Q to_quad(const Rat& r) {
  // numerator / denominator via long double chunks keeps ~34 digits for the sizes used here
  using boost::multiprecision::cpp_int;
  cpp_int num = boost::multiprecision::numerator(r), den = boost::multiprecision::denominator(r);
  auto conv = [](cpp_int v) {
    const bool neg = v < 0;
    if (neg) v = -v;
    Q acc = 0, scale = 1;
    const cpp_int base = cpp_int(1) << 60;
    while (v > 0) {
      const cpp_int digit = v % base;
      acc += scale * static_cast<Q>(static_cast<unsigned long long>(digit));
      scale *= static_cast<Q>(1ull << 60);
      v /= base;
    }
    return neg ? -acc : acc;
  };
  return conv(num) / conv(den);
}

/// Coefficients (2^{2k} - 1) B_{2k} / (2k)! for k = 1..K.
inline const std::vector<Q>& boole_coeffs() {
  static const std::vector<Q> table = [] {
    constexpr int K = 60;
    const auto B = akiyama_tanigawa(2 * K);
    std::vector<Q> c(K + 1, 0);
    Rat fact = 1;
    for (int k = 1; k <= K; ++k) {
      fact *= (2 * k - 1) * (2 * k);
      const boost::multiprecision::cpp_int pow2 = boost::multiprecision::cpp_int(1) << (2 * k);
      c[k] = to_quad(Rat(pow2 - 1) * B[2 * k] / fact);
    }
    return c;
  }();
  return table;
}

/// x^{-s} for x > 0.
inline CQ qpow_neg(Q x, Q sigma, Q t) {
  const Q lx = logq(x);
  const Q mag = expq(-sigma * lx);
  const Q ph = t * lx;
  return {mag * cosq(ph), -mag * sinq(ph)};
}

// Tail of an alternating series with f(x) = (c x + d)^{-s}, starting at index M,
// i.e. sum_{m>=M} (-1)^{m-M} f(m).
inline CQ boole_tail(Q c, Q d, Q M, Q sigma, Q t) {
  const Q x = c * M + d;
  const CQ s{sigma, t};
  CQ acc = qpow_neg(x, sigma, t) * static_cast<Q>(0.5);
  // f^{(j)}(M) = (-c)^j (s)_j x^{-s-j}; odd j = 2k-1 contributes +c^{2k-1} (s)_{2k-1} x^{-s-2k+1}.
  CQ rising{1, 0};
  CQ base = qpow_neg(x, sigma, t);
  const auto& coef = boole_coeffs();
  Q cpow = c;
  Q xinv = 1 / x;
  Q xpow = xinv;
  CQ prev_term{static_cast<Q>(1e300), 0};
  for (std::size_t k = 1; k < coef.size(); ++k) {
    const Q j0 = 2 * static_cast<Q>(k) - 2;
    if (k == 1) {
      rising = s;
    } else {
      rising = rising * (s + CQ{j0 - 1, 0}) * (s + CQ{j0, 0});
    }
    const CQ term = base * rising * (coef[k] * cpow * xpow);
    const Q mag = fabsq(term.re) + fabsq(term.im);
    if (mag > fabsq(prev_term.re) + fabsq(prev_term.im)) break;  // asymptotic: stop at smallest term
    acc = acc + term;
    prev_term = term;
    if (mag < static_cast<Q>(1e-40)) break;
    cpow *= c * c;
    xpow *= xinv * xinv;
  }
  return acc;
}

// n^{-s} for n = 1..N via smallest-prime-factor multiplicativity.
inline std::vector<CQ> power_table(std::uint64_t N, Q sigma, Q t) {
  std::vector<std::uint32_t> spf(N + 1, 0);
  for (std::uint64_t i = 2; i <= N; ++i) {
    if (spf[i] == 0) {
      for (std::uint64_t j = i; j <= N; j += i) {
        if (spf[j] == 0) spf[j] = static_cast<std::uint32_t>(i);
      }
    }
  }
  std::vector<CQ> pw(N + 1);
  if (N >= 1) pw[1] = {1, 0};
  for (std::uint64_t n = 2; n <= N; ++n) {
    const std::uint64_t p = spf[n];
    pw[n] = (p == n) ? qpow_neg(static_cast<Q>(n), sigma, t) : pw[p] * pw[n / p];
  }
  return pw;
}

/// zeta(s) = eta(s) / (1 - 2^{1-s}).
inline std::complex<double> zeta(double sigma, double t) {
  const std::uint64_t N = static_cast<std::uint64_t>(2.0 * std::abs(t) / M_PI) + 40;
  const Q qs = sigma, qt = t;
  const auto pw = power_table(N, qs, qt);
  CQ eta{0, 0};
  for (std::uint64_t n = 1; n < N; ++n) eta = (n % 2 == 1) ? eta + pw[n] : eta - pw[n];
  const CQ tail = boole_tail(1, 0, static_cast<Q>(N), qs, qt);
  eta = (N % 2 == 1) ? eta + tail : eta - tail;
  // 1 - 2^{1-s} = 1 - 2 * 2^{-s}
  const CQ two = qpow_neg(2, qs, qt) * static_cast<Q>(2);
  return (eta / (CQ{1, 0} - two)).to_double();
}

/// L(s, chi_4) = sum_{m>=0} (-1)^m (2m+1)^{-s}.
inline std::complex<double> l_chi4(double sigma, double t) {
  // tail ratio ~ (2|s| / (pi (2M+1)))^2 must stay near 1/4
  const std::uint64_t M = static_cast<std::uint64_t>(2.0 * std::abs(t) / M_PI) + 40;
  const Q qs = sigma, qt = t;
  const auto pw = power_table(2 * M + 1, qs, qt);
  CQ acc{0, 0};
  for (std::uint64_t m = 0; m < M; ++m) acc = (m % 2 == 0) ? acc + pw[2 * m + 1] : acc - pw[2 * m + 1];
  const CQ tail = boole_tail(2, 1, static_cast<Q>(M), qs, qt);
  acc = (M % 2 == 0) ? acc + tail : acc - tail;
  return acc.to_double();
}

}  // namespace oracle
