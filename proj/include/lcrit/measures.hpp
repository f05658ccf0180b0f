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

#include "lcrit/errors.hpp"
#include "lcrit/lfunction.hpp"
#include "lcrit/parallel.hpp"
#include "lcrit/philox.hpp"
#include "lcrit/random_model.hpp"
#include "lcrit/zeta_eval.hpp"

namespace lcrit {

/// Parameters of one experiment at height T on the line sigma_T = 1/2 + 1/G.
struct RunConfig {
  double T = 1e4;
  double G = 4.0;
  double Y = 100.0;
  std::size_t n_t = 200;
  std::size_t n_rand = 200;
  std::uint64_t P = 1000000;
  std::uint64_t seed = 1;
  std::vector<std::string> specs{"zeta"};

  double sigma() const noexcept { return 0.5 + 1.0 / G; }
  std::size_t J() const noexcept { return specs.size(); }
  std::size_t dim() const noexcept { return 2 * specs.size(); }

  /// log log T <= G <= log T / (log log T)^2
  bool regime_flag() const noexcept {
    const double lt = std::log(T);
    const double llt = std::log(lt);
    return llt <= G && G <= lt / (llt * llt);
  }

  /// sqrt(G) log log T / sqrt(log T), the shape of the discrepancy bound.
  double bound_shape() const noexcept {
    const double lt = std::log(T);
    return std::sqrt(G) * std::log(lt) / std::sqrt(lt);
  }

  void validate() const {
    if (!(T >= 100.0)) throw DomainError("RunConfig: T must be >= 100");
    if (!(G > 2.0)) throw DomainError("RunConfig: G must exceed 2 so that sigma_T lies in (1/2, 1)");
    if (!(Y >= 0.0)) throw DomainError("RunConfig: Y must be >= 0");
    if (specs.empty()) throw DomainError("RunConfig: at least one spec label required");
    if (P < 2) throw DomainError("RunConfig: prime cutoff must be >= 2");
  }
};

enum class Provenance { deterministic, random, synthetic };

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::deterministic: return "deterministic";
    case Provenance::random: return "random";
    case Provenance::synthetic: return "synthetic";
  }
  return "unknown";
}

inline Provenance provenance_from_string(const std::string& s) {
  if (s == "deterministic") return Provenance::deterministic;
  if (s == "random") return Provenance::random;
  if (s == "synthetic") return Provenance::synthetic;
  throw DomainError("unknown provenance '" + s + "'");
}

/// Equal-weight point masses in R^dim. Coordinates of point i are
/// (log|L_1|, arg L_1, log|L_2|, arg L_2, ...), stored row-major.
struct EmpiricalMeasure {
  std::size_t dim = 2;
  std::vector<double> data;
  Provenance provenance = Provenance::deterministic;

  EmpiricalMeasure() = default;
  EmpiricalMeasure(std::size_t d, Provenance p) : dim(d), provenance(p) {}

  std::size_t size() const noexcept { return dim == 0 ? 0 : data.size() / dim; }
  std::span<const double> point(std::size_t i) const { return {data.data() + i * dim, dim}; }
  void push(std::span<const double> x) {
    if (x.size() != dim) throw DimensionError("EmpiricalMeasure::push: dimension mismatch");
    data.insert(data.end(), x.begin(), x.end());
  }

  void validate() const {
    if (dim == 0 || data.size() % dim != 0) throw DimensionError("EmpiricalMeasure: ragged data");
    if (size() < 1) throw DomainError("EmpiricalMeasure: at least one point required");
    for (double v : data) {
      if (!std::isfinite(v)) throw DomainError("EmpiricalMeasure: non-finite coordinate");
    }
  }
};

/// Closed axis-parallel box; infinite bounds give unbounded sides.
struct Rectangle {
  std::vector<double> lower;
  std::vector<double> upper;

  static Rectangle whole_space(std::size_t dim) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return {std::vector<double>(dim, -inf), std::vector<double>(dim, inf)};
  }

  std::size_t dim() const noexcept { return lower.size(); }

  bool contains(std::span<const double> x) const noexcept {
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (x[k] < lower[k] || x[k] > upper[k]) return false;
    }
    return true;
  }

  void validate() const {
    if (lower.size() != upper.size()) throw DimensionError("Rectangle: bound vectors differ in length");
    for (std::size_t k = 0; k < lower.size(); ++k) {
      if (!(lower[k] <= upper[k])) throw DomainError("Rectangle: lower bound exceeds upper bound");
    }
  }
};

inline double measure_rect(const EmpiricalMeasure& m, const Rectangle& r) {
  r.validate();
  if (r.dim() != m.dim) throw DimensionError("measure_rect: dimension mismatch");
  std::size_t inside = 0;
  for (std::size_t i = 0; i < m.size(); ++i) inside += r.contains(m.point(i)) ? 1 : 0;
  return static_cast<double>(inside) / static_cast<double>(m.size());
}

// ---------------------------------------------------------------------------
// Collection
// ---------------------------------------------------------------------------

struct CollectOptions {
  unsigned workers = 1;
  EvalParams eval;
  PathParams path;
  /// Evaluate at sigma - it instead of sigma + it.
  bool conjugate = false;
  int max_rejections_per_stratum = 100;
  ModelOptions model;
};

struct DeterministicSample {
  EmpiricalMeasure measure;
  std::vector<double> ordinates;
  std::vector<int> rejections;  // per stratum

  std::size_t total_rejections() const {
    std::size_t n = 0;
    for (int r : rejections) n += static_cast<std::size_t>(r);
    return n;
  }
};

/// t for stratum i of n on [T, 2T], attempt a (redraws after near-zero rejections).
inline double stratified_ordinate(const RunConfig& config, std::size_t i, int attempt) {
  const CounterUniform uniform(config.seed, KeyDomain::ordinates);
  const double u = uniform(i, static_cast<std::uint64_t>(attempt));
  return config.T + config.T * (static_cast<double>(i) + u) / static_cast<double>(config.n_t);
}

namespace detail {

inline std::vector<LFunctionSpec> resolve_specs(const RunConfig& config, const SpecRegistry& registry) {
  std::vector<LFunctionSpec> specs;
  for (const auto& label : config.specs) specs.push_back(registry.resolve(label));
  return specs;
}

// Evaluates every spec at one stratum, redrawing t on near-zero or path failures.
template <class OnPoint>
int collect_stratum(const RunConfig& config, const std::vector<LFunctionSpec>& specs, std::span<const double> sigmas,
                    std::size_t i, const CollectOptions& options, OnPoint&& on_point) {
  for (int attempt = 0; attempt <= options.max_rejections_per_stratum; ++attempt) {
    double t = stratified_ordinate(config, i, attempt);
    if (options.conjugate) t = -t;
    try {
      std::vector<std::vector<LogLValue>> values;
      values.reserve(specs.size());
      for (const auto& spec : specs) {
        const OrdinateEvaluator ev(evaluable_character(spec), t, options.eval);
        values.push_back(log_l_path(ev, sigmas, options.eval, options.path));
      }
      on_point(t, values);
      return attempt;
    } catch (const NearZeroError&) {
    } catch (const PathError&) {
    }
  }
  throw EvaluationError("stratum " + std::to_string(i) + ": more than " + std::to_string(options.max_rejections_per_stratum) +
                        " near-zero rejections");
}

}  // namespace detail

/// Phi_T as an empirical measure: one stratified ordinate per equal subinterval
/// of [T, 2T], coordinates (log|L_j|, arg L_j) at sigma_T + it.
inline DeterministicSample collect_deterministic(const RunConfig& config, const SpecRegistry& registry,
                                                 const CollectOptions& options = {}) {
  config.validate();
  const auto specs = detail::resolve_specs(config, registry);
  const std::size_t dim = config.dim();
  DeterministicSample out;
  out.measure = EmpiricalMeasure(dim, Provenance::deterministic);
  out.measure.data.assign(config.n_t * dim, 0.0);
  out.ordinates.assign(config.n_t, 0.0);
  out.rejections.assign(config.n_t, 0);
  const double sigmas[1] = {config.sigma()};

  parallel_for(config.n_t, options.workers, [&](std::size_t i) {
    out.rejections[i] = detail::collect_stratum(config, specs, sigmas, i, options, [&](double t, const auto& values) {
      out.ordinates[i] = t;
      for (std::size_t j = 0; j < specs.size(); ++j) {
        out.measure.data[i * dim + 2 * j] = values[j][0].re_log;
        out.measure.data[i * dim + 2 * j + 1] = values[j][0].im_log;
      }
    });
  });
  return out;
}

struct RandomSample {
  EmpiricalMeasure measure;
  std::vector<double> tail_bounds;  // per spec
};

/// Phi_T^rand: n_rand draws of the joint model, one assignment X per point
/// shared by all J specs.
inline RandomSample collect_random(const RunConfig& config, const SpecRegistry& registry, const CollectOptions& options = {}) {
  config.validate();
  const auto specs = detail::resolve_specs(config, registry);
  auto primes = std::make_shared<const PrimeTable>(primes_up_to(config.P));
  std::vector<RandomModel> models;
  RandomSample out;
  for (const auto& spec : specs) {
    models.emplace_back(spec, config.sigma(), primes, options.model);
    out.tail_bounds.push_back(models.back().tail_bound());
  }
  const std::size_t dim = config.dim();
  out.measure = EmpiricalMeasure(dim, Provenance::random);
  out.measure.data.assign(config.n_rand * dim, 0.0);

  parallel_for(config.n_rand, options.workers, [&](std::size_t i) {
    if (models.size() == 1) {
      const auto v = models[0].log_l_stream(config.seed, i);
      out.measure.data[i * dim] = v.real();
      out.measure.data[i * dim + 1] = v.imag();
      return;
    }
    const RandomAssignment x = sample_assignment(config.seed, i, primes);
    for (std::size_t j = 0; j < models.size(); ++j) {
      const auto v = models[j].log_l(x);
      out.measure.data[i * dim + 2 * j] = v.real();
      out.measure.data[i * dim + 2 * j + 1] = v.imag();
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Characteristic functions
// ---------------------------------------------------------------------------

/// Empirical mean of exp(2 pi i (x.u + y.v)), u = log-modulus coordinates,
/// v = argument coordinates.
inline std::complex<double> char_fn(const EmpiricalMeasure& m, std::span<const double> x, std::span<const double> y) {
  const std::size_t J = m.dim / 2;
  if (x.size() != J || y.size() != J || m.dim % 2 != 0) throw DimensionError("char_fn: frequency vectors must have length J");
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto p = m.point(i);
    double phase = 0.0;
    for (std::size_t j = 0; j < J; ++j) phase += x[j] * p[2 * j] + y[j] * p[2 * j + 1];
    phase *= 2.0 * std::numbers::pi;
    re += std::cos(phase);
    im += std::sin(phase);
  }
  const double n = static_cast<double>(m.size());
  return {re / n, im / n};
}

struct CharFnGap {
  double gap = 0.0;
  /// 1/sqrt(n1) + 1/sqrt(n2)
  double noise_floor = 0.0;
  std::vector<double> argmax;  // (x_1..x_J, y_1..y_J)
};

/// max over a grid_n-per-axis lattice of [-M, M]^{2J} of |char_fn(m1) - char_fn(m2)|.
inline CharFnGap char_fn_gap(const EmpiricalMeasure& m1, const EmpiricalMeasure& m2, double M, int grid_n, unsigned workers = 1) {
  if (m1.dim != m2.dim || m1.dim % 2 != 0) throw DimensionError("char_fn_gap: dimension mismatch");
  if (!(M > 0.0)) throw DomainError("char_fn_gap: M must be positive");
  if (grid_n < 2) throw DomainError("char_fn_gap: grid_n must be >= 2");
  const std::size_t dim = m1.dim, J = dim / 2;
  std::size_t cells = 1;
  for (std::size_t k = 0; k < dim; ++k) cells *= static_cast<std::size_t>(grid_n);

  auto node = [&](std::size_t cell) {
    std::vector<double> z(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const auto idx = cell % static_cast<std::size_t>(grid_n);
      cell /= static_cast<std::size_t>(grid_n);
      z[k] = -M + 2.0 * M * static_cast<double>(idx) / static_cast<double>(grid_n - 1);
    }
    return z;
  };

  std::vector<double> gaps(cells);
  parallel_for(cells, workers, [&](std::size_t c) {
    const auto z = node(c);
    const std::span<const double> x(z.data(), J), y(z.data() + J, J);
    gaps[c] = std::abs(char_fn(m1, x, y) - char_fn(m2, x, y));
  });
  CharFnGap out;
  std::size_t best = 0;
  for (std::size_t c = 0; c < cells; ++c) {
    if (gaps[c] > gaps[best]) best = c;
  }
  out.gap = gaps[best];
  out.argmax = node(best);
  out.noise_floor = 1.0 / std::sqrt(static_cast<double>(m1.size())) + 1.0 / std::sqrt(static_cast<double>(m2.size()));
  return out;
}

// ---------------------------------------------------------------------------
// log L - R_Y
// ---------------------------------------------------------------------------

struct GapEstimate {
  double Y = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
};

struct SecondMomentGap {
  std::vector<GapEstimate> rows;
  std::size_t rejections = 0;
};

/// Mean over the stratified ordinates of |log L(sigma_T + it) - R_Y(sigma_T + it)|^2
/// for every Y in `cutoffs`, using the first spec of the config.
inline SecondMomentGap second_moment_gap(const RunConfig& config, const SpecRegistry& registry, std::span<const double> cutoffs,
                                         const CollectOptions& options = {}) {
  config.validate();
  RunConfig single = config;
  single.specs = {config.specs.front()};
  const auto specs = detail::resolve_specs(single, registry);
  std::vector<DirichletPolynomial> polys;
  for (double Y : cutoffs) polys.emplace_back(specs.front(), Y);

  const double sigma = config.sigma();
  const double sigmas[1] = {sigma};
  std::vector<std::vector<double>> gaps(cutoffs.size(), std::vector<double>(config.n_t));
  std::vector<int> rejections(config.n_t, 0);

  parallel_for(config.n_t, options.workers, [&](std::size_t i) {
    rejections[i] = detail::collect_stratum(single, specs, sigmas, i, options, [&](double t, const auto& values) {
      const std::complex<double> log_l{values[0][0].re_log, values[0][0].im_log};
      for (std::size_t k = 0; k < polys.size(); ++k) gaps[k][i] = std::norm(log_l - polys[k]({sigma, t}));
    });
  });

  SecondMomentGap out;
  for (int r : rejections) out.rejections += static_cast<std::size_t>(r);
  for (std::size_t k = 0; k < cutoffs.size(); ++k) {
    const auto est = mean_and_error(gaps[k]);
    out.rows.push_back({cutoffs[k], est.mean, est.std_error});
  }
  return out;
}

inline GapEstimate second_moment_gap(const RunConfig& config, const SpecRegistry& registry, const CollectOptions& options = {}) {
  const double Y[1] = {config.Y};
  return second_moment_gap(config, registry, Y, options).rows.front();
}

/// sum_{n > Y} |beta(n)|^2 n^{-2 sigma} over prime powers, summed to `limit`
/// with the remainder bounded analytically.
inline double dirichlet_tail_sum(const LFunctionSpec& spec, double sigma, double Y, std::uint64_t limit = 10000000) {
  const PrimeTable primes = primes_up_to(limit);
  double acc = 0.0;
  for (std::uint64_t p : primes) {
    const double logp = std::log(static_cast<double>(p));
    double n = static_cast<double>(p);
    for (int r = 1; n <= static_cast<double>(limit); ++r, n *= static_cast<double>(p)) {
      if (n > Y) acc += std::norm(detail::beta_unchecked(spec, p, r)) * std::exp(-2.0 * sigma * r * logp);
    }
  }
  return acc + random_model_tail_variance(spec.degree, spec.eta, sigma, limit);
}

}  // namespace lcrit
