#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "lcrit/arith.hpp"
#include "lcrit/errors.hpp"
#include "lcrit/lfunction.hpp"
#include "lcrit/parallel.hpp"
#include "lcrit/philox.hpp"

namespace lcrit {

/// One realization of X: X(p) = e^{i theta_p} for every prime p <= cutoff.
/// theta_p depends only on (seed, stream_id, p), so raising the cutoff extends
/// an assignment without changing existing angles.
struct RandomAssignment {
  std::uint64_t cutoff = 0;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  std::shared_ptr<const PrimeTable> primes;
  std::vector<double> theta;  // aligned with primes->primes

  std::complex<double> value(std::size_t i) const { return std::polar(1.0, theta[i]); }
};

inline double prime_angle(const CounterUniform& uniform, std::uint64_t p, std::uint64_t stream_id) noexcept {
  return 2.0 * std::numbers::pi * uniform(p, stream_id);
}

inline RandomAssignment sample_assignment(std::uint64_t seed, std::uint64_t stream_id, std::shared_ptr<const PrimeTable> primes) {
  RandomAssignment x;
  x.cutoff = primes->limit;
  x.seed = seed;
  x.stream_id = stream_id;
  x.primes = std::move(primes);
  const CounterUniform uniform(seed, KeyDomain::prime_angles);
  x.theta.reserve(x.primes->size());
  for (std::uint64_t p : *x.primes) x.theta.push_back(prime_angle(uniform, p, stream_id));
  return x;
}

inline RandomAssignment sample_assignment(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t cutoff) {
  if (cutoff < 2) throw DomainError("sample_assignment: cutoff must be >= 2");
  return sample_assignment(seed, stream_id, std::make_shared<const PrimeTable>(primes_up_to(cutoff)));
}

/// The degenerate assignment X(p) = 1 for all p.
inline RandomAssignment unit_assignment(std::shared_ptr<const PrimeTable> primes) {
  RandomAssignment x;
  x.cutoff = primes->limit;
  x.theta.assign(primes->size(), 0.0);
  x.primes = std::move(primes);
  return x;
}

struct ModelOptions {
  /// Maximum admissible RMS size of the omitted primes p > cutoff.
  double tail_tolerance = 0.25;
  /// Powers r > 2 are dropped once (d/r) p^{r(eta - sigma)} falls below this.
  double r_cap_threshold = 1e-16;
};

/// Upper bound on sum_{p > P} sum_r |beta(p^r)|^2 p^{-2 r sigma}, using
/// pi(x) <= 1.25506 x / log x and |beta(p^r)| <= (d/r) p^{r eta}.
inline double random_model_tail_variance(int degree, double eta, double sigma, std::uint64_t P) {
  const double a = 2.0 * (sigma - eta);
  if (!(a > 1.0)) throw DomainError("random model requires sigma > 1/2 + eta");
  const double logP = std::log(static_cast<double>(P));
  const double Pd = static_cast<double>(P);
  const double first = 1.25506 * a * std::pow(Pd, 1.0 - a) / ((a - 1.0) * logP);
  const double higher = std::pow(Pd, 1.0 - 2.0 * a) / ((2.0 * a - 1.0) * 4.0 * (1.0 - std::pow(2.0, -a)));
  return static_cast<double>(degree) * degree * (first + higher);
}

struct RandomLogL {
  std::string label;
  double sigma = 0.0;
  std::complex<double> value;
  /// RMS bound of the omitted primes p > cutoff. The absolute tail diverges
  /// for sigma <= 1, so the L^2 size is what is reported.
  double tail_bound = 0.0;
};

/// Precomputed coefficients c_{p,r} = beta(p^r) p^{-r sigma} for one spec and
/// sigma; log L(sigma, X) = sum_p sum_r c_{p,r} X(p)^r.
class RandomModel {
 public:
  RandomModel(const LFunctionSpec& spec, double sigma, std::shared_ptr<const PrimeTable> primes, const ModelOptions& options = {})
      : label_(spec.label), sigma_(sigma), primes_(std::move(primes)) {
    spec.validate();
    if (!(sigma > 0.5)) throw DomainError("random model requires sigma > 1/2");
    tail_variance_ = random_model_tail_variance(spec.degree, spec.eta, sigma, primes_->limit);
    if (std::sqrt(tail_variance_) > options.tail_tolerance) {
      throw InsufficientCutoffError("random model tail bound " + std::to_string(std::sqrt(tail_variance_)) + " exceeds tolerance " +
                                    std::to_string(options.tail_tolerance) + " at sigma = " + std::to_string(sigma) +
                                    ", cutoff = " + std::to_string(primes_->limit) + "; raise the cutoff");
    }
    offsets_.reserve(primes_->size() + 1);
    offsets_.push_back(0);
    const double d = spec.degree;
    for (std::uint64_t p : *primes_) {
      const double logp = std::log(static_cast<double>(p));
      for (int r = 1;; ++r) {
        const double envelope = d / r * std::exp(r * (spec.eta - sigma) * logp);
        if (r > 2 && envelope < options.r_cap_threshold) break;
        coeffs_.push_back(detail::beta_unchecked(spec, p, r) * std::exp(-r * sigma * logp));
      }
      offsets_.push_back(static_cast<std::uint32_t>(coeffs_.size()));
    }
  }

  const std::string& label() const noexcept { return label_; }
  double sigma() const noexcept { return sigma_; }
  const PrimeTable& primes() const noexcept { return *primes_; }
  std::shared_ptr<const PrimeTable> prime_table() const noexcept { return primes_; }
  double tail_variance() const noexcept { return tail_variance_; }
  double tail_bound() const noexcept { return std::sqrt(tail_variance_); }

  /// sum_{p <= P} sum_r |c_{p,r}|^2 = E |log L(sigma, X)|^2 for the truncated model.
  double second_moment() const {
    double acc = 0.0;
    for (const auto& c : coeffs_) acc += std::norm(c);
    return acc;
  }

  std::complex<double> log_l(std::span<const double> theta) const {
    if (theta.size() != primes_->size()) throw DimensionError("random model: assignment size does not match prime table");
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) accumulate(i, theta[i], re, im);
    return {re, im};
  }

  std::complex<double> log_l(const RandomAssignment& x) const { return log_l(std::span<const double>(x.theta)); }

  /// log L for the assignment (seed, stream_id), generating angles on the fly.
  std::complex<double> log_l_stream(std::uint64_t seed, std::uint64_t stream_id) const {
    const CounterUniform uniform(seed, KeyDomain::prime_angles);
    double re = 0.0, im = 0.0;
    const auto& ps = primes_->primes;
    for (std::size_t i = 0; i < ps.size(); ++i) accumulate(i, prime_angle(uniform, ps[i], stream_id), re, im);
    return {re, im};
  }

 private:
  void accumulate(std::size_t i, double theta, double& re, double& im) const {
    const std::uint32_t lo = offsets_[i], hi = offsets_[i + 1];
    if (lo == hi) return;
    const std::complex<double> x{std::cos(theta), std::sin(theta)};
    std::complex<double> power = x;
    std::complex<double> acc = coeffs_[lo] * power;
    for (std::uint32_t k = lo + 1; k < hi; ++k) {
      power *= x;
      acc += coeffs_[k] * power;
    }
    re += acc.real();
    im += acc.imag();
  }

  std::string label_;
  double sigma_;
  std::shared_ptr<const PrimeTable> primes_;
  double tail_variance_ = 0.0;
  std::vector<std::uint32_t> offsets_;
  std::vector<std::complex<double>> coeffs_;
};

inline RandomLogL random_log_l(const LFunctionSpec& spec, double sigma, const RandomAssignment& x, const ModelOptions& options = {}) {
  const RandomModel model(spec, sigma, x.primes, options);
  return {spec.label, sigma, model.log_l(x), model.tail_bound()};
}

struct AnalyticMoment {
  double value = 0.0;
  /// Bound on the variance carried by primes above the cutoff.
  double tail_bound = 0.0;
};

/// E |log L(sigma, X)|^2 = sum_{p <= P} sum_r |beta(p^r)|^2 p^{-2 r sigma}
/// for the model truncated at P (independence of the X(p) kills cross terms).
inline AnalyticMoment analytic_moment2(const LFunctionSpec& spec, double sigma, std::uint64_t P) {
  ModelOptions options;
  options.tail_tolerance = std::numeric_limits<double>::infinity();
  const RandomModel model(spec, sigma, std::make_shared<const PrimeTable>(primes_up_to(P)), options);
  return {model.second_moment(), model.tail_variance()};
}

struct SampleOptions {
  std::uint64_t cutoff = 1000000;
  unsigned workers = 1;
  ModelOptions model;
};

/// log L(sigma, X_i) for streams i = 0 .. n-1, in stream order.
inline std::vector<std::complex<double>> sample_log_l(const RandomModel& model, std::size_t n, std::uint64_t seed, unsigned workers) {
  std::vector<std::complex<double>> out(n);
  parallel_for(n, workers, [&](std::size_t i) { out[i] = model.log_l_stream(seed, i); });
  return out;
}

struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

inline MomentEstimate mean_and_error(const std::vector<double>& v) {
  const double n = static_cast<double>(v.size());
  const double mean = pairwise_sum(v) / n;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  const double var = v.size() > 1 ? pairwise_sum(sq) / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var / n), v.size()};
}

/// Monte Carlo estimate of E |log L(sigma, X)|^{2k} with its standard error.
inline MomentEstimate empirical_moment(const LFunctionSpec& spec, double sigma, int k, std::size_t n_samples, std::uint64_t seed,
                                       const SampleOptions& options = {}) {
  if (k < 1) throw DomainError("empirical_moment: k must be >= 1");
  if (n_samples < 1000) throw DomainError("empirical_moment: at least 10^3 samples required");
  const RandomModel model(spec, sigma, std::make_shared<const PrimeTable>(primes_up_to(options.cutoff)), options.model);
  const auto values = sample_log_l(model, n_samples, seed, options.workers);
  std::vector<double> powers(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) powers[i] = std::pow(std::norm(values[i]), k);
  return mean_and_error(powers);
}

}  // namespace lcrit
