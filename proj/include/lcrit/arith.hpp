#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "lcrit/errors.hpp"

namespace lcrit {

// ---------------------------------------------------------------------------
// Primes
// ---------------------------------------------------------------------------

struct PrimeTable {
  std::uint64_t limit = 0;
  std::vector<std::uint64_t> primes;

  std::size_t size() const noexcept { return primes.size(); }
  auto begin() const noexcept { return primes.begin(); }
  auto end() const noexcept { return primes.end(); }
  std::uint64_t operator[](std::size_t i) const noexcept { return primes[i]; }

  /// Index of the first prime strictly greater than x.
  std::size_t upper_index(std::uint64_t x) const noexcept {
    return static_cast<std::size_t>(std::upper_bound(primes.begin(), primes.end(), x) - primes.begin());
  }
};

inline bool is_prime(std::uint64_t n) noexcept {
  if (n < 2) return false;
  if (n < 4) return true;
  if (n % 2 == 0 || n % 3 == 0) return false;
  for (std::uint64_t d = 5; d * d <= n; d += 6) {
    if (n % d == 0 || n % (d + 2) == 0) return false;
  }
  return true;
}

namespace detail {

inline std::vector<std::uint64_t> simple_sieve(std::uint64_t limit) {
  std::vector<char> composite(limit + 1, 0);
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
  }
  return out;
}

inline std::uint64_t isqrt(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

}  // namespace detail

/// Segmented sieve of Eratosthenes over odd numbers.
inline PrimeTable primes_up_to(std::uint64_t limit) {
  if (limit < 2) throw DomainError("primes_up_to: limit must be >= 2");

  PrimeTable table;
  table.limit = limit;
  const std::uint64_t root = detail::isqrt(limit);
  const std::vector<std::uint64_t> base = detail::simple_sieve(std::max<std::uint64_t>(root, 2));

  if (limit < 1000) {
    table.primes = detail::simple_sieve(limit);
    return table;
  }

  table.primes.reserve(static_cast<std::size_t>(1.2 * limit / std::log(static_cast<double>(limit))) + 16);
  table.primes.push_back(2);

  // Segment k covers odd numbers lo, lo+2, ..., stored at index (n - lo) / 2.
  constexpr std::uint64_t kSegmentOdds = 1u << 17;
  std::vector<char> mark(kSegmentOdds);
  for (std::uint64_t lo = 3; lo <= limit; lo += 2 * kSegmentOdds) {
    const std::uint64_t hi = std::min(limit, lo + 2 * kSegmentOdds - 1);
    const std::uint64_t count = (hi - lo) / 2 + 1;
    std::fill(mark.begin(), mark.begin() + static_cast<std::ptrdiff_t>(count), 0);
    for (std::uint64_t p : base) {
      if (p == 2) continue;
      if (p * p > hi) break;
      std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
      if (start % 2 == 0) start += p;
      for (std::uint64_t j = start; j <= hi; j += 2 * p) mark[(j - lo) / 2] = 1;
    }
    for (std::uint64_t i = 0; i < count; ++i) {
      if (!mark[i]) table.primes.push_back(lo + 2 * i);
    }
  }
  return table;
}

// ---------------------------------------------------------------------------
// Bernoulli numbers
// ---------------------------------------------------------------------------

using Rational = boost::multiprecision::cpp_rational;

/// Exact B_0 .. B_{2 count}. Sign convention: B_1 = -1/2, i.e. the numbers
/// defined by x / (e^x - 1) = sum B_n x^n / n!. Odd indices above 1 are zero.
inline std::vector<Rational> bernoulli_numbers(int count) {
  if (count < 0) throw DomainError("bernoulli_numbers: count must be >= 0");
  const int m_max = 2 * count;
  std::vector<Rational> b(static_cast<std::size_t>(m_max) + 1);
  b[0] = 1;
  // sum_{k=0}^{m} C(m+1, k) B_k = 0 for m >= 1
  for (int m = 1; m <= m_max; ++m) {
    if (m > 1 && m % 2 == 1) {
      b[static_cast<std::size_t>(m)] = 0;
      continue;
    }
    Rational acc = 0;
    boost::multiprecision::cpp_int binom = 1;  // C(m+1, 0)
    for (int k = 0; k < m; ++k) {
      acc += Rational(binom) * b[static_cast<std::size_t>(k)];
      binom = binom * (m + 1 - k) / (k + 1);
    }
    b[static_cast<std::size_t>(m)] = -acc / (m + 1);
  }
  return b;
}

/// B_{2k} as double for 1 <= k <= 30 (B_2 .. B_60), computed once.
inline double bernoulli_even(int k) {
  static const std::vector<double> table = [] {
    const auto exact = bernoulli_numbers(30);
    std::vector<double> out(31);
    for (int i = 0; i <= 30; ++i) out[static_cast<std::size_t>(i)] = exact[static_cast<std::size_t>(2 * i)].convert_to<double>();
    return out;
  }();
  if (k < 0 || k > 30) throw DomainError("bernoulli_even: index outside stored range B_0..B_60");
  return table[static_cast<std::size_t>(k)];
}

/// B_{2k} / (2k)! as double for 1 <= k <= 31. The extra entry sizes the first omitted term.
inline double bernoulli_even_over_factorial(int k) {
  static const std::vector<double> table = [] {
    const auto exact = bernoulli_numbers(31);
    std::vector<double> out(32);
    boost::multiprecision::cpp_int fact = 1;
    for (int i = 0; i <= 31; ++i) {
      if (i > 0) fact *= (2 * i - 1) * (2 * i);
      out[static_cast<std::size_t>(i)] = Rational(exact[static_cast<std::size_t>(2 * i)] / Rational(fact)).convert_to<double>();
    }
    return out;
  }();
  if (k < 0 || k > 31) throw DomainError("bernoulli_even_over_factorial: index outside stored range");
  return table[static_cast<std::size_t>(k)];
}

// ---------------------------------------------------------------------------
// Dirichlet characters
// ---------------------------------------------------------------------------

struct DirichletCharacter {
  std::uint64_t modulus = 1;
  std::size_t index = 0;
  bool is_principal = true;
  /// Exponent of (Z/qZ)^*; every nonzero value is exp(2 pi i phase / order).
  std::uint64_t order = 1;
  /// phase[n] in [0, order) for gcd(n, q) = 1, -1 otherwise.
  std::vector<std::int64_t> phase;
  std::vector<std::complex<double>> values;

  std::complex<double> operator()(std::uint64_t n) const noexcept { return values[n % modulus]; }

  bool is_real() const noexcept {
    for (auto p : phase) {
      if (p > 0 && 2 * static_cast<std::uint64_t>(p) != order) return false;
    }
    return true;
  }
};

constexpr std::uint64_t kMaxCharacterModulus = 10000;

namespace detail {

inline std::uint64_t powmod(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = r * b % m;
    b = b * b % m;
    e >>= 1;
  }
  return r;
}

struct PrimeFactor {
  std::uint64_t p;
  int e;
};

inline std::vector<PrimeFactor> factorize(std::uint64_t n) {
  std::vector<PrimeFactor> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.push_back({p, e});
  }
  if (n > 1) out.push_back({n, 1});
  return out;
}

// One cyclic factor of (Z/qZ)^*: residues mod `pe` with a discrete-log table.
struct CyclicComponent {
  std::uint64_t pe;
  std::uint64_t order;
  std::vector<std::int64_t> dlog;  // indexed by residue mod pe, -1 if not in the subgroup chart
  bool sign_component = false;     // the <-1> factor of (Z/2^e Z)^*, e >= 3
  bool five_component = false;     // the <5> factor of (Z/2^e Z)^*, e >= 3
};

inline std::uint64_t unit_order(std::uint64_t g, std::uint64_t m, std::uint64_t group_order,
                                const std::vector<PrimeFactor>& fac) {
  std::uint64_t ord = group_order;
  for (const auto& f : fac) {
    for (int i = 0; i < f.e; ++i) {
      if (ord % f.p == 0 && powmod(g, ord / f.p, m) == 1) ord /= f.p;
    }
  }
  return ord;
}

inline std::vector<CyclicComponent> unit_group_components(std::uint64_t q) {
  std::vector<CyclicComponent> comps;
  for (const auto& [p, e] : factorize(q)) {
    std::uint64_t pe = 1;
    for (int i = 0; i < e; ++i) pe *= p;
    if (p == 2) {
      if (e == 1) continue;  // trivial group
      if (e == 2) {
        CyclicComponent c{4, 2, std::vector<std::int64_t>(4, -1)};
        c.dlog[1] = 0;
        c.dlog[3] = 1;
        comps.push_back(std::move(c));
        continue;
      }
      CyclicComponent sign{pe, 2, {}, true};
      comps.push_back(std::move(sign));
      CyclicComponent five{pe, pe / 4, std::vector<std::int64_t>(pe, -1), false, true};
      std::uint64_t x = 1;
      for (std::uint64_t k = 0; k < pe / 4; ++k) {
        five.dlog[x] = static_cast<std::int64_t>(k);
        x = x * 5 % pe;
      }
      comps.push_back(std::move(five));
      continue;
    }
    const std::uint64_t phi = pe / p * (p - 1);
    const auto phi_fac = factorize(phi);
    std::uint64_t g = 2;
    while (std::gcd(g, pe) != 1 || unit_order(g, pe, phi, phi_fac) != phi) ++g;
    CyclicComponent c{pe, phi, std::vector<std::int64_t>(pe, -1)};
    std::uint64_t x = 1;
    for (std::uint64_t k = 0; k < phi; ++k) {
      c.dlog[x] = static_cast<std::int64_t>(k);
      x = x * g % pe;
    }
    comps.push_back(std::move(c));
  }
  return comps;
}

inline std::int64_t component_log(const CyclicComponent& c, std::uint64_t n) {
  const std::uint64_t r = n % c.pe;
  if (c.sign_component) return (r % 4 == 3) ? 1 : 0;
  if (c.five_component) {
    // the <5> factor: fold r = -5^k into the sign component
    const std::uint64_t folded = (r % 4 == 3) ? c.pe - r : r;
    return c.dlog[folded];
  }
  return c.dlog[r];
}

}  // namespace detail

/// All phi(q) characters mod q, built from discrete logarithms on a generator
/// set of (Z/qZ)^*. Index 0 is the principal character; the remaining indices
/// enumerate exponent vectors in mixed radix over the cyclic factors ordered
/// by increasing prime.
inline std::vector<DirichletCharacter> characters_mod(std::uint64_t q) {
  if (q == 0) throw DomainError("characters_mod: modulus must be >= 1");
  if (q > kMaxCharacterModulus) throw DomainError("characters_mod: modulus above desk-scale limit 10^4");

  const auto comps = detail::unit_group_components(q);
  std::uint64_t exponent = 1;
  std::uint64_t count = 1;
  for (const auto& c : comps) {
    exponent = std::lcm(exponent, c.order);
    count *= c.order;
  }

  // logs[n][c] for n coprime to q
  std::vector<std::vector<std::int64_t>> logs(q);
  for (std::uint64_t n = 0; n < q; ++n) {
    if (std::gcd(n, q) != 1) continue;
    logs[n].reserve(comps.size());
    for (const auto& c : comps) logs[n].push_back(detail::component_log(c, n));
  }

  std::vector<std::complex<double>> roots(exponent);
  for (std::uint64_t k = 0; k < exponent; ++k) {
    if ((4 * k) % exponent == 0) {
      static constexpr std::complex<double> quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
      roots[k] = quarter[(4 * k / exponent) % 4];
    } else {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(exponent);
      roots[k] = {std::cos(angle), std::sin(angle)};
    }
  }

  std::vector<DirichletCharacter> out;
  out.reserve(count);
  for (std::uint64_t idx = 0; idx < count; ++idx) {
    std::vector<std::uint64_t> m(comps.size());
    std::uint64_t rest = idx;
    for (std::size_t c = 0; c < comps.size(); ++c) {
      m[c] = rest % comps[c].order;
      rest /= comps[c].order;
    }
    DirichletCharacter chi;
    chi.modulus = q;
    chi.index = idx;
    chi.is_principal = (idx == 0);
    chi.order = exponent;
    chi.phase.assign(q, -1);
    chi.values.assign(q, {0.0, 0.0});
    for (std::uint64_t n = 0; n < q; ++n) {
      if (std::gcd(n, q) != 1) continue;
      std::uint64_t ph = 0;
      for (std::size_t c = 0; c < comps.size(); ++c) {
        const auto scale = exponent / comps[c].order;
        ph = (ph + m[c] * static_cast<std::uint64_t>(logs[n][c]) % comps[c].order * scale) % exponent;
      }
      chi.phase[n] = static_cast<std::int64_t>(ph);
      chi.values[n] = roots[ph];
    }
    out.push_back(std::move(chi));
  }
  return out;
}

inline std::uint64_t euler_phi(std::uint64_t q) {
  std::uint64_t r = q;
  for (const auto& f : detail::factorize(q)) r = r / f.p * (f.p - 1);
  return r;
}

}  // namespace lcrit
