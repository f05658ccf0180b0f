#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lcrit/philox.hpp"
#include "lcrit/zeta_eval.hpp"
#include "series_oracles.hpp"

using namespace lcrit;

namespace {

const DirichletCharacter& chi4() {
  static const auto chi = characters_mod(4)[1];
  return chi;
}

}  // namespace

TEST(ZetaEM, Examples) {
  EXPECT_NEAR(zeta_em({2.0, 0.0}).real(), 1.6449340668482264, 1e-13);
  const auto v = zeta_em({0.75, 10.0});
  EXPECT_LE(std::abs(v - oracle::zeta(0.75, 10.0)), 1e-9);
  EXPECT_THROW(zeta_em({1.0, 0.0}), PoleError);
  EXPECT_THROW(zeta_em({0.0, 5.0}), DomainError);
  EXPECT_THROW(zeta_em({0.7, 2e7}), DomainError);
}

TEST(ZetaEM, ErrorBudgetAgainstOracle) {
  const CounterUniform u(11, KeyDomain::synthetic);
  for (std::uint64_t i = 0; i < 40; ++i) {
    const auto r = u.pair(i, 0);
    const double sigma = 0.55 + 1.45 * r[0];
    const double t = 2e4 * (2 * r[1] - 1);
    const auto d = zeta_em_detailed({sigma, t});
    const auto ref = oracle::zeta(sigma, t);
    EXPECT_LE(std::abs(d.value - ref), 1e-12) << sigma << " " << t;
    EXPECT_LE(d.error_estimate, 1e-12);
  }
}

TEST(DirichletEM, Examples) {
  EXPECT_NEAR(dirichlet_l_em(chi4(), {2.0, 0.0}).real(), 0.9159655941772190, 1e-13);
  EXPECT_NEAR(dirichlet_l_em(chi4(), {2.0, 0.0}).real(), oracle::l_chi4(2.0, 0.0).real(), 1e-14);
  EXPECT_NEAR(dirichlet_l_em(chi4(), {1.0, 0.0}).real(), std::numbers::pi / 4, 1e-13);
  EXPECT_LE(std::abs(dirichlet_l_em(characters_mod(1)[0], {2.0, 0.0}) - zeta_em({2.0, 0.0})), 1e-14);
  EXPECT_THROW(dirichlet_l_em(characters_mod(4)[0], {1.0, 0.0}), PoleError);
}

TEST(DirichletEM, PrincipalCharacterRemovesEulerFactors) {
  // L(s, chi_0 mod 6) = zeta(s) (1 - 2^{-s}) (1 - 3^{-s})
  const auto chi0 = characters_mod(6)[0];
  for (double t : {0.0, 7.5, 321.0}) {
    const std::complex<double> s{0.8, t};
    const auto expect = zeta_em(s) * (1.0 - std::pow(2.0, -s)) * (1.0 - std::pow(3.0, -s));
    EXPECT_LE(std::abs(dirichlet_l_em(chi0, s) - expect), 1e-11);
  }
}

TEST(DirichletEM, AgainstLeibnizOracle) {
  const CounterUniform u(12, KeyDomain::synthetic);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto r = u.pair(i, 0);
    const double sigma = 0.55 + 1.45 * r[0];
    const double t = 2e4 * (2 * r[1] - 1);
    EXPECT_LE(std::abs(dirichlet_l_em(chi4(), {sigma, t}) - oracle::l_chi4(sigma, t)), 1e-12) << sigma << " " << t;
  }
}

TEST(EvalParamsTest, Validation) {
  EvalParams p;
  p.em_cutoff_factor = 0.5;
  EXPECT_THROW(p.validate(), DomainError);
  p = {};
  p.bernoulli_terms = 31;
  EXPECT_THROW(p.validate(), DomainError);
  p = {};
  p.target_abs_error = 0;
  EXPECT_THROW(p.validate(), DomainError);
}

TEST(EvalParamsTest, UnreachableTargetRaises) {
  EvalParams p;
  p.em_cutoff_factor = 1.0;
  p.bernoulli_terms = 2;
  p.target_abs_error = 1e-15;
  EXPECT_THROW(zeta_em({0.6, 1e4}, p), PrecisionError);
  EXPECT_NO_THROW(zeta_em({0.6, 1e4}));
}

TEST(LogL, Examples) {
  const auto v = log_l_continuous(characters_mod(1)[0], 2.0, 0.0);
  EXPECT_EQ(v.im_log, 0.0);
  EXPECT_NEAR(v.re_log, std::log(std::numbers::pi * std::numbers::pi / 6), 1e-13);
  EXPECT_THROW(log_l_continuous(characters_mod(1)[0], 0.5, 100.0), DomainError);
}

TEST(LogL, ConsistencyWithDirectEvaluation) {
  const CounterUniform u(13, KeyDomain::synthetic);
  const auto zeta = characters_mod(1)[0];
  for (std::uint64_t i = 0; i < 25; ++i) {
    const auto r = u.pair(i, 0);
    const double sigma = 0.6 + 0.4 * r[0];
    const double t = 1e3 + (1e5 - 1e3) * r[1];
    const auto lv = log_l_continuous(zeta, sigma, t);
    const auto direct = zeta_em({sigma, t});
    const auto rebuilt = std::exp(std::complex<double>(lv.re_log, lv.im_log));
    EXPECT_LE(std::abs(rebuilt - direct) / std::abs(direct), 1e-8);
  }
}

TEST(LogL, StepRefinementAndConjugateSymmetry) {
  const CounterUniform u(14, KeyDomain::synthetic);
  const auto zeta = characters_mod(1)[0];
  PathParams fine;
  fine.initial_step = 0.025;
  for (std::uint64_t i = 0; i < 15; ++i) {
    const auto r = u.pair(i, 0);
    const double sigma = 0.6 + 0.4 * r[0];
    const double t = 1e3 + 2e4 * r[1];
    const auto a = log_l_continuous(zeta, sigma, t);
    const auto b = log_l_continuous(zeta, sigma, t, {}, fine);
    EXPECT_LT(std::abs(a.im_log - b.im_log), 1e-6);
    const auto c = log_l_continuous(zeta, sigma, -t);
    EXPECT_NEAR(c.re_log, a.re_log, 1e-8);
    EXPECT_NEAR(c.im_log, -a.im_log, 1e-8);
  }
}

TEST(LogL, EulerProductInAbsoluteConvergence) {
  const auto spec = dirichlet_spec(chi4());
  const double sigma = 1.5;
  const double bound = 1.0 * std::pow(1e6, -0.5) / 0.5 / std::log(2.0);  // sum_{n > 10^6} n^{-1.5} / log 2
  const DirichletPolynomial poly(spec, 1e6);
  for (double t : {0.0, 17.0, 2500.0}) {
    const auto lv = log_l_continuous(spec, sigma, t);
    const auto series = poly({sigma, t});
    EXPECT_LE(std::abs(std::complex<double>(lv.re_log, lv.im_log) - series), bound);
  }
}

TEST(LogL, MultipleSigmasShareOnePath) {
  const auto zeta = characters_mod(1)[0];
  const OrdinateEvaluator ev(zeta, 5000.0, {});
  const double sigmas[3] = {0.9, 0.6, 0.75};
  const auto path = log_l_path(ev, sigmas, {});
  for (int k = 0; k < 3; ++k) {
    const auto single = log_l_continuous(zeta, sigmas[k], 5000.0);
    EXPECT_NEAR(path[k].re_log, single.re_log, 1e-12);
    EXPECT_NEAR(path[k].im_log, single.im_log, 1e-9);
  }
}
