#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "lcrit/arith.hpp"
#include "lcrit/errors.hpp"
#include "lcrit/lfunction.hpp"

namespace lcrit {

struct EvalParams {
  /// Direct-sum length N = ceil(factor * (|t| / 2 pi + 10)) per residue class.
  double em_cutoff_factor = 2.0;
  /// Maximum number of Bernoulli correction terms K.
  int bernoulli_terms = 30;
  double target_abs_error = 1e-12;

  void validate() const {
    if (!(em_cutoff_factor >= 1.0)) throw DomainError("EvalParams: em_cutoff_factor must be >= 1");
    if (bernoulli_terms < 1 || bernoulli_terms > 30) throw DomainError("EvalParams: bernoulli_terms must lie in [1, 30]");
    if (!(target_abs_error > 0.0)) throw DomainError("EvalParams: target_abs_error must be positive");
  }
};

struct EMValue {
  std::complex<double> value;
  /// Sum over residue classes of the first omitted Euler-Maclaurin term.
  double error_estimate = 0.0;
  std::uint64_t cutoff = 0;
};

constexpr double kMaxOrdinate = 1e7;

namespace detail {

// Shared table of log(n) in extended precision; grows on demand.
class LogTable {
 public:
  static std::shared_ptr<const std::vector<long double>> get(std::size_t n) {
    static LogTable instance;
    std::lock_guard<std::mutex> lock(instance.mutex_);
    if (!instance.table_ || instance.table_->size() <= n) {
      auto grown = std::make_shared<std::vector<long double>>();
      const std::size_t size = std::max<std::size_t>(n + 1, instance.table_ ? 2 * instance.table_->size() : 1024);
      grown->resize(size);
      std::size_t start = 0;
      if (instance.table_) {
        std::copy(instance.table_->begin(), instance.table_->end(), grown->begin());
        start = instance.table_->size();
      }
      for (std::size_t i = std::max<std::size_t>(start, 1); i < size; ++i) (*grown)[i] = std::log(static_cast<long double>(i));
      instance.table_ = std::move(grown);
    }
    return instance.table_;
  }

 private:
  std::mutex mutex_;
  std::shared_ptr<const std::vector<long double>> table_;
};

inline std::complex<double> unit_phase(long double t, long double log_n) {
  // e^{-i t log n}, reduced in extended precision
  constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  const double theta = static_cast<double>(std::fmod(t * log_n, two_pi));
  return {std::cos(theta), -std::sin(theta)};
}

/// (e^z - 1) / z
inline std::complex<double> expm1_over(std::complex<double> z) {
  if (std::abs(z) < 1e-5) return 1.0 + z / 2.0 + z * z / 6.0;
  const double x = z.real(), y = z.imag();
  const double s = std::sin(0.5 * y);
  const std::complex<double> em1{std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
  return em1 / z;
}

struct KahanComplex {
  double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;
  void add(double a, double b) noexcept {
    const double yr = a - cre;
    const double tr = re + yr;
    cre = (tr - re) - yr;
    re = tr;
    const double yi = b - cim;
    const double ti = im + yi;
    cim = (ti - im) - yi;
    im = ti;
  }
  std::complex<double> value() const noexcept { return {re, im}; }
};

}  // namespace detail

/// Euler-Maclaurin evaluation of L(sigma + i t, chi) for one fixed ordinate t.
///
/// With N from EvalParams, L(s, chi) = sum_{m <= qN} chi(m) m^{-s} plus, for each
/// residue class a, the Hurwitz tail q^{-s} sum_{n >= N} (n + a/q)^{-s} written as
///   X^{-s} [ x/(s-1) + 1/2 + sum_k B_2k/(2k)! (s)_{2k-1} x^{1-2k} ],
/// x = N + a/q, X = qN + a. The phases m^{-it} are computed once, so evaluating
/// many sigma at the same t costs one pass over the stored terms each.
class OrdinateEvaluator {
 public:
  OrdinateEvaluator(const DirichletCharacter& chi, double t, const EvalParams& params)
      : chi_(&chi), t_(t), params_(params) {
    params_.validate();
    if (!(std::abs(t) <= kMaxOrdinate)) throw DomainError("OrdinateEvaluator: |t| exceeds 10^7");
    const std::uint64_t q = chi.modulus;
    N_ = static_cast<std::uint64_t>(std::ceil(params.em_cutoff_factor * (std::abs(t) / (2.0 * std::numbers::pi) + 10.0)));
    const std::uint64_t M = q * N_;
    logs_ = detail::LogTable::get(M + q);
    const auto& L = *logs_;

    terms_.reserve(static_cast<std::size_t>(M));
    for (std::uint64_t m = 1; m <= M; ++m) {
      const auto c = chi(m);
      if (c == std::complex<double>{0.0, 0.0}) continue;
      terms_.push_back({static_cast<double>(L[m]), c * detail::unit_phase(t, L[m])});
    }
    for (std::uint64_t a = 1; a <= q; ++a) {
      const auto c = chi(a);
      if (c == std::complex<double>{0.0, 0.0}) continue;
      const std::uint64_t X = M + a;
      const double x = static_cast<double>(N_) + static_cast<double>(a) / static_cast<double>(q);
      tails_.push_back({c, x, static_cast<double>(L[X]), detail::unit_phase(t, L[X])});
    }
  }

  double ordinate() const noexcept { return t_; }
  std::uint64_t cutoff() const noexcept { return N_; }
  const DirichletCharacter& character() const noexcept { return *chi_; }

  EMValue evaluate(double sigma) const {
    const std::complex<double> s{sigma, t_};
    if (!(sigma > 0.0)) throw DomainError("Euler-Maclaurin evaluation requires Re(s) > 0");
    const bool principal = chi_->is_principal;
    if (principal && s == std::complex<double>{1.0, 0.0}) throw PoleError("L(s) has a pole at s = 1");

    detail::KahanComplex acc;
    for (const auto& term : terms_) {
      const double mag = std::exp(-sigma * term.log_m);
      acc.add(mag * term.coeff.real(), mag * term.coeff.imag());
    }

    const int K = params_.bernoulli_terms;
    const double class_target = params_.target_abs_error / static_cast<double>(std::max<std::size_t>(tails_.size(), 1));
    const double q = static_cast<double>(chi_->modulus);
    const bool near_one = !principal && std::abs(s - 1.0) < 0.5;
    const std::complex<double> q_pow = std::exp(-s * std::log(q));
    double error = 0.0;

    for (const auto& tail : tails_) {
      const double mag = std::exp(-sigma * tail.log_X);
      const std::complex<double> X_pow = mag * tail.phase;  // X^{-s}
      const double x = tail.x;

      std::complex<double> body = 0.5;
      if (!near_one) body += x / (s - 1.0);

      // Bernoulli corrections
      std::complex<double> rising = s;  // (s)_{2k-1}
      double x_pow = 1.0 / x;           // x^{1-2k}
      double prev = std::numeric_limits<double>::infinity();
      double omitted = -1.0;
      for (int k = 1; k <= K + 1; ++k) {
        const std::complex<double> term = bernoulli_even_over_factorial(k) * rising * x_pow;
        const double size = std::abs(term) * mag;
        if (k == K + 1 || size <= 0.1 * class_target || size > prev) {
          omitted = size;
          break;
        }
        body += term;
        prev = size;
        rising *= (s + static_cast<double>(2 * k - 1)) * (s + static_cast<double>(2 * k));
        x_pow /= x * x;
      }
      error += omitted;

      const std::complex<double> contrib = tail.chi * X_pow * body;
      acc.add(contrib.real(), contrib.imag());

      if (near_one) {
        // sum_a chi(a) q^{-s} (x^{1-s} - 1)/(s-1), valid because sum_a chi(a) = 0
        const double lx = std::log(x);
        const std::complex<double> pole_free = -q_pow * lx * detail::expm1_over((1.0 - s) * lx);
        const std::complex<double> c = tail.chi * pole_free;
        acc.add(c.real(), c.imag());
      }
    }

    if (error > params_.target_abs_error) {
      throw PrecisionError("Euler-Maclaurin tail estimate " + std::to_string(error) + " exceeds target " +
                           std::to_string(params_.target_abs_error) + " at s = " + std::to_string(sigma) + " + " +
                           std::to_string(t_) + "i; raise em_cutoff_factor");
    }
    return {acc.value(), error, N_};
  }

  std::complex<double> operator()(double sigma) const { return evaluate(sigma).value; }

 private:
  struct Term {
    double log_m;
    std::complex<double> coeff;  // chi(m) m^{-it}
  };
  struct Tail {
    std::complex<double> chi;
    double x;
    double log_X;
    std::complex<double> phase;  // X^{-it}
  };

  const DirichletCharacter* chi_;
  double t_;
  EvalParams params_;
  std::uint64_t N_ = 0;
  std::shared_ptr<const std::vector<long double>> logs_;
  std::vector<Term> terms_;
  std::vector<Tail> tails_;
};

namespace detail {

inline const DirichletCharacter& trivial_character() {
  static const DirichletCharacter chi = characters_mod(1).front();
  return chi;
}

inline void check_point(std::complex<double> s) {
  if (!(s.real() > 0.0)) throw DomainError("Euler-Maclaurin evaluation requires Re(s) > 0");
  if (!(std::abs(s.imag()) <= kMaxOrdinate)) throw DomainError("|Im(s)| exceeds 10^7");
}

}  // namespace detail

inline EMValue dirichlet_l_em_detailed(const DirichletCharacter& chi, std::complex<double> s, const EvalParams& params = {}) {
  detail::check_point(s);
  if (chi.is_principal && s == std::complex<double>{1.0, 0.0}) throw PoleError("L(s, chi) has a pole at s = 1 for principal chi");
  return OrdinateEvaluator(chi, s.imag(), params).evaluate(s.real());
}

inline std::complex<double> dirichlet_l_em(const DirichletCharacter& chi, std::complex<double> s, const EvalParams& params = {}) {
  return dirichlet_l_em_detailed(chi, s, params).value;
}

inline EMValue zeta_em_detailed(std::complex<double> s, const EvalParams& params = {}) {
  return dirichlet_l_em_detailed(detail::trivial_character(), s, params);
}

inline std::complex<double> zeta_em(std::complex<double> s, const EvalParams& params = {}) {
  return zeta_em_detailed(s, params).value;
}

// ---------------------------------------------------------------------------
// log L with a continuous argument
// ---------------------------------------------------------------------------

struct PathParams {
  double start_sigma = 2.0;
  double initial_step = 0.05;
  /// Maximum number of L evaluations along one path.
  int max_evaluations = 4000;
};

struct LogLValue {
  double sigma = 0.0;
  double t = 0.0;
  double re_log = 0.0;  // log |L|
  double im_log = 0.0;  // arg L, continuous along the horizontal path from start_sigma
};

namespace detail {

inline double near_zero_threshold(const EvalParams& params) { return 1e3 * params.target_abs_error; }

inline void check_not_small(std::complex<double> v, double sigma, double t, const EvalParams& params) {
  if (std::abs(v) < near_zero_threshold(params)) {
    throw NearZeroError("|L| below near-zero threshold at s = " + std::to_string(sigma) + " + " + std::to_string(t) + "i");
  }
}

}  // namespace detail

/// log L at every requested sigma on one ordinate, walking horizontally from
/// start_sigma (where |arg L| < pi/2) and accumulating the phase of successive
/// ratios. Steps are halved until every phase jump is below pi/4. Results are
/// returned in the order of `sigmas`.
inline std::vector<LogLValue> log_l_path(const OrdinateEvaluator& ev, std::span<const double> sigmas, const EvalParams& params,
                                         const PathParams& path = {}) {
  const double t = ev.ordinate();
  for (double s : sigmas) {
    if (!(s > 0.5)) throw DomainError("log_l_continuous: sigma must exceed 1/2");
  }
  std::vector<LogLValue> out(sigmas.size());
  std::vector<std::size_t> order(sigmas.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sigmas[a] > sigmas[b]; });

  int evaluations = 0;
  auto eval = [&](double sigma) {
    if (++evaluations > path.max_evaluations) {
      throw PathError("argument unwinding exceeded " + std::to_string(path.max_evaluations) + " evaluations at t = " + std::to_string(t));
    }
    const auto v = ev.evaluate(sigma).value;
    detail::check_not_small(v, sigma, t, params);
    return v;
  };

  double cur_sigma = path.start_sigma;
  std::complex<double> cur = eval(cur_sigma);
  double arg = std::arg(cur);
  double step = path.initial_step;

  for (std::size_t idx : order) {
    const double target = sigmas[idx];
    if (target >= path.start_sigma) {
      // Absolutely convergent region: the principal branch is the continuous one.
      const auto v = eval(target);
      out[idx] = {target, t, std::log(std::abs(v)), std::arg(v)};
      continue;
    }
    while (cur_sigma > target) {
      const double next_sigma = std::max(target, cur_sigma - step);
      const auto next = eval(next_sigma);
      const double jump = std::arg(next / cur);
      if (std::abs(jump) >= std::numbers::pi / 4.0) {
        step *= 0.5;
        continue;
      }
      arg += jump;
      cur = next;
      cur_sigma = next_sigma;
      step = std::min(path.initial_step, 2.0 * step);
    }
    out[idx] = {target, t, std::log(std::abs(cur)), arg};
  }
  return out;
}

inline LogLValue log_l_continuous(const DirichletCharacter& chi, double sigma, double t, const EvalParams& params = {},
                                  const PathParams& path = {}) {
  if (!(sigma > 0.5)) throw DomainError("log_l_continuous: sigma must exceed 1/2");
  const OrdinateEvaluator ev(chi, t, params);
  const double s[1] = {sigma};
  return log_l_path(ev, s, params, path).front();
}

inline const DirichletCharacter& evaluable_character(const LFunctionSpec& spec) {
  if (!spec.character) throw DomainError("spec '" + spec.label + "' has no deterministic evaluator");
  return *spec.character;
}

inline LogLValue log_l_continuous(const LFunctionSpec& spec, double sigma, double t, const EvalParams& params = {},
                                  const PathParams& path = {}) {
  return log_l_continuous(evaluable_character(spec), sigma, t, params, path);
}

}  // namespace lcrit
