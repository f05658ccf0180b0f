#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lcrit/arith.hpp"
#include "lcrit/errors.hpp"

namespace lcrit {

/// Analytic data the artifact does not compute with: pole order, functional
/// equation shape and the zero-density hypothesis are carried for reference.
struct AnalyticMetadata {
  int pole_order = 0;
  std::string functional_equation;
  bool zero_density_assumed = true;
};

using LocalRoots = std::function<std::complex<double>(std::uint64_t p, int i)>;

/// An L-function described by its Euler product
///   L(s) = prod_p prod_{i<=d} (1 - alpha_i(p) p^{-s})^{-1}
/// with |alpha_i(p)| <= p^eta and Selberg orthogonality constant xi.
struct LFunctionSpec {
  std::string label;
  int degree = 1;
  LocalRoots alpha;
  double eta = 0.0;
  double xi = 1.0;
  /// Set for GL(1) instances; enables deterministic evaluation of L(s).
  std::optional<DirichletCharacter> character;
  AnalyticMetadata metadata;

  void validate() const {
    if (degree < 1) throw DomainError("LFunctionSpec '" + label + "': degree must be >= 1");
    if (!(eta >= 0.0 && eta < 0.5)) throw DomainError("LFunctionSpec '" + label + "': eta must lie in [0, 1/2)");
    if (!(xi > 0.0)) throw DomainError("LFunctionSpec '" + label + "': xi must be positive");
    if (!alpha) throw DomainError("LFunctionSpec '" + label + "': no local-root provider");
  }
};

inline LFunctionSpec dirichlet_spec(const DirichletCharacter& chi) {
  LFunctionSpec spec;
  spec.label = chi.modulus == 1 ? "zeta" : "dirichlet:q=" + std::to_string(chi.modulus) + ":index=" + std::to_string(chi.index);
  spec.degree = 1;
  spec.eta = 0.0;
  spec.xi = 1.0;
  spec.character = chi;
  auto values = std::make_shared<const std::vector<std::complex<double>>>(chi.values);
  const std::uint64_t q = chi.modulus;
  spec.alpha = [values, q](std::uint64_t p, int) { return (*values)[p % q]; };
  spec.metadata.pole_order = chi.is_principal ? 1 : 0;
  spec.metadata.functional_equation = "GL(1): Q = sqrt(q/pi), one Gamma factor";
  return spec;
}

inline LFunctionSpec zeta_spec() {
  return dirichlet_spec(characters_mod(1).front());
}

// ---------------------------------------------------------------------------
// Coefficients of log L
// ---------------------------------------------------------------------------

namespace detail {

inline std::complex<double> ipow(std::complex<double> z, int r) {
  std::complex<double> out{1.0, 0.0};
  std::complex<double> base = z;
  while (r > 0) {
    if (r & 1) out *= base;
    base *= base;
    r >>= 1;
  }
  return out;
}

/// beta(p^r) without the primality check.
inline std::complex<double> beta_unchecked(const LFunctionSpec& spec, std::uint64_t p, int r) {
  std::complex<double> acc{0.0, 0.0};
  for (int i = 1; i <= spec.degree; ++i) acc += ipow(spec.alpha(p, i), r);
  return acc / static_cast<double>(r);
}

}  // namespace detail

/// beta_L(p^r) = (1/r) sum_i alpha_i(p)^r, the coefficient of p^{-rs} in log L(s).
inline std::complex<double> beta_coeff(const LFunctionSpec& spec, std::uint64_t p, int r) {
  if (!is_prime(p)) throw DomainError("beta_coeff: " + std::to_string(p) + " is not prime");
  if (r < 1) throw DomainError("beta_coeff: r must be >= 1");
  return detail::beta_unchecked(spec, p, r);
}

/// Largest r with 2^r <= Y.
inline int max_prime_power_exponent(double Y) {
  if (Y < 2.0) return 0;
  int r = 0;
  double v = 2.0;
  while (v <= Y) {
    ++r;
    v *= 2.0;
  }
  return r;
}

/// The Dirichlet polynomial R_Y(s) = sum_{p^r <= Y} beta(p^r) p^{-rs}, with its
/// prime-power terms enumerated once.
class DirichletPolynomial {
 public:
  struct Term {
    std::uint64_t n;
    std::uint64_t p;
    int r;
    long double log_n;
    std::complex<double> coeff;
  };

  DirichletPolynomial(const LFunctionSpec& spec, double Y) : Y_(Y) {
    if (!(Y >= 0.0)) throw DomainError("DirichletPolynomial: Y must be >= 0");
    if (Y < 2.0) return;
    const auto limit = static_cast<std::uint64_t>(std::floor(Y));
    const PrimeTable table = primes_up_to(limit);
    const int r_cap = max_prime_power_exponent(Y);
    for (std::uint64_t p : table) {
      std::uint64_t n = p;
      for (int r = 1; r <= r_cap; ++r) {
        if (static_cast<double>(n) > Y) break;
        terms_.push_back({n, p, r, std::log(static_cast<long double>(n)), detail::beta_unchecked(spec, p, r)});
        if (n > limit / p) break;
        n *= p;
      }
    }
  }

  double cutoff() const noexcept { return Y_; }
  const std::vector<Term>& terms() const noexcept { return terms_; }

  std::complex<double> operator()(std::complex<double> s) const {
    if (!(s.real() > 0.0)) throw DomainError("R_Y: Re(s) must be positive");
    const long double t = s.imag();
    const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    double re = 0.0, im = 0.0;
    for (const auto& term : terms_) {
      const double mag = std::exp(-s.real() * static_cast<double>(term.log_n));
      const double phase = static_cast<double>(std::fmod(t * term.log_n, two_pi));
      const std::complex<double> v = term.coeff * std::complex<double>(mag * std::cos(phase), -mag * std::sin(phase));
      re += v.real();
      im += v.imag();
    }
    return {re, im};
  }

 private:
  double Y_;
  std::vector<Term> terms_;
};

inline std::complex<double> ry_eval(const LFunctionSpec& spec, double Y, std::complex<double> s) {
  return DirichletPolynomial(spec, Y)(s);
}

/// sum_{p <= x} |beta(p)|^2 / p
inline double selberg_partial_sum(const LFunctionSpec& spec, double x) {
  if (x < 2.0) throw DomainError("selberg_partial_sum: x must be >= 2");
  double acc = 0.0;
  for (std::uint64_t p : primes_up_to(static_cast<std::uint64_t>(std::floor(x)))) {
    acc += std::norm(detail::beta_unchecked(spec, p, 1)) / static_cast<double>(p);
  }
  return acc;
}

/// sum_{p <= x} beta_j(p) conj(beta_k(p)) / p, the cross term of Selberg orthogonality.
inline std::complex<double> selberg_cross_sum(const LFunctionSpec& spec_j, const LFunctionSpec& spec_k, double x) {
  if (x < 2.0) throw DomainError("selberg_cross_sum: x must be >= 2");
  std::complex<double> acc{0.0, 0.0};
  for (std::uint64_t p : primes_up_to(static_cast<std::uint64_t>(std::floor(x)))) {
    acc += detail::beta_unchecked(spec_j, p, 1) * std::conj(detail::beta_unchecked(spec_k, p, 1)) / static_cast<double>(p);
  }
  return acc;
}

/// sum_{p <= x} sum_i |alpha_i(p)|^2, the quantity bounded by the
/// Ramanujan-on-average hypothesis.
inline double ramanujan_average_sum(const LFunctionSpec& spec, double x) {
  if (x < 2.0) throw DomainError("ramanujan_average_sum: x must be >= 2");
  double acc = 0.0;
  for (std::uint64_t p : primes_up_to(static_cast<std::uint64_t>(std::floor(x)))) {
    for (int i = 1; i <= spec.degree; ++i) acc += std::norm(spec.alpha(p, i));
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

constexpr std::uint64_t kShippedCharacterModulus = 100;

/// Label -> spec lookup. Built-in labels are "zeta" and
/// "dirichlet:q=<q>:index=<i>" for q <= 100; further providers can be registered.
class SpecRegistry {
 public:
  using Factory = std::function<LFunctionSpec()>;

  void register_spec(const std::string& label, Factory factory) { custom_[label] = std::move(factory); }

  bool contains(const std::string& label) const {
    if (custom_.count(label)) return true;
    try {
      resolve(label);
      return true;
    } catch (const DomainError&) {
      return false;
    }
  }

  LFunctionSpec resolve(const std::string& label) const {
    if (auto it = custom_.find(label); it != custom_.end()) {
      LFunctionSpec spec = it->second();
      spec.label = label;
      spec.validate();
      return spec;
    }
    if (label == "zeta") return zeta_spec();
    const std::string prefix = "dirichlet:q=";
    if (label.rfind(prefix, 0) == 0) {
      const auto sep = label.find(":index=", prefix.size());
      if (sep == std::string::npos) throw DomainError("unknown spec label '" + label + "'");
      std::uint64_t q = 0, index = 0;
      try {
        std::size_t used = 0;
        const std::string qs = label.substr(prefix.size(), sep - prefix.size());
        q = std::stoull(qs, &used);
        if (used != qs.size()) throw std::invalid_argument("q");
        const std::string is = label.substr(sep + 7);
        index = std::stoull(is, &used);
        if (used != is.size()) throw std::invalid_argument("index");
      } catch (const std::exception&) {
        throw DomainError("malformed spec label '" + label + "'");
      }
      if (q < 1 || q > kShippedCharacterModulus) throw DomainError("spec label '" + label + "': modulus outside 1..100");
      auto chars = characters_mod(q);
      if (index >= chars.size()) throw DomainError("spec label '" + label + "': character index out of range");
      LFunctionSpec spec = dirichlet_spec(chars[index]);
      spec.label = label;
      return spec;
    }
    throw DomainError("unknown spec label '" + label + "'");
  }

 private:
  std::map<std::string, Factory> custom_;
};

}  // namespace lcrit
