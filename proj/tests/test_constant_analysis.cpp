#include "tracethresh/constant_analysis.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "doctest.h"
#include "tracethresh/bdp_sim.hpp"
#include "tracethresh/errors.hpp"
#include "tracethresh/exponential_analysis.hpp"

using namespace tracethresh;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ModelParams const_base() {
  ModelParams p;
  p.infectious = DistributionSpec::constant(1.0);
  p.latent = DistributionSpec::zero();
  p.delay = DistributionSpec::zero();
  p.pi_t = 0.0;
  return p;
}

// One-sided derivative at 1, two Richardson levels (O(h^3) truncation).
double partial_at_one(const std::function<double(double)>& f) {
  const double h = 1e-3;
  const double f0 = f(1.0);
  auto d = [&](double step) { return (f0 - f(1.0 - step)) / step; };
  return (8.0 * d(0.25 * h) - 6.0 * d(0.5 * h) + d(h)) / 3.0;
}

}  // namespace

TEST_CASE("fate probabilities for degenerate and exponential delays") {
  ModelParams p = const_base();
  p.lambda = 1.0;
  p.p = 0.5;
  p.pi_r = 1.0;

  SUBCASE("zero delay, zero latent") {
    const auto fate = fate_probs(p);
    CHECK(fate.p_n == doctest::Approx(0.0));
    CHECK(fate.p_t == doctest::Approx(0.0));
  }
  SUBCASE("exponential delay, zero latent") {
    p.delay = DistributionSpec::exponential(1.0);
    const auto fate = fate_probs(p);
    CHECK(fate.p_n == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    CHECK(fate.p_t == doctest::Approx(0.0));
  }
  SUBCASE("zero delay, long constant latent: always traced while latent") {
    p.latent = DistributionSpec::constant(2.0);
    const auto fate = fate_probs(p);
    CHECK(fate.p_n == doctest::Approx(0.0));
    CHECK(fate.p_t == doctest::Approx(1.0));
  }
  SUBCASE("p_n + p_t never exceed 1") {
    for (double rate : {0.3, 1.0, 3.0}) {
      p.delay = DistributionSpec::exponential(rate);
      p.latent = DistributionSpec::exponential(2.0);
      const auto fate = fate_probs(p);
      CHECK(fate.p_n >= 0.0);
      CHECK(fate.p_t >= 0.0);
      CHECK(fate.p_n + fate.p_t <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("mean matrix closed forms") {
  SUBCASE("tracing disabled") {
    ModelParams p = const_base();
    p.lambda = 2.0;
    p.p = 0.0;
    p.pi_r = 0.8;
    const auto m = mean_matrix(p);
    CHECK(m.m_uu == doctest::Approx(2.0));
    CHECK(m.m_un == doctest::Approx(0.0));
    CHECK(m.m_nu == doctest::Approx(0.0));
    CHECK(m.m_nn == doctest::Approx(0.0));
  }
  SUBCASE("immediate naming, no delay or latency") {
    ModelParams p = const_base();
    p.lambda = 2.0;
    p.p = 1.0;
    p.pi_r = 1.0;
    const auto m = mean_matrix(p);
    CHECK(m.m_uu == doctest::Approx(0.0));
    CHECK(m.m_un == doctest::Approx(2.0));
    CHECK(m.m_nu == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(m.m_nn == doctest::Approx(0.0));
  }
  SUBCASE("exponential delay closed entries") {
    ModelParams p = const_base();
    p.lambda = 1.5;
    p.p = 0.5;
    p.pi_r = 1.0;
    p.delay = DistributionSpec::exponential(1.0);
    const auto m = mean_matrix(p);
    CHECK(m.m_uu == doctest::Approx(0.75));
    CHECK(m.m_un == doctest::Approx(0.75));
    CHECK(m.m_nn == doctest::Approx(0.75 * (1.0 - std::exp(-1.0))).epsilon(1e-12));
  }
}

TEST_CASE("mean matrix agrees with first-generation Monte Carlo") {
  ModelParams p = const_base();
  p.lambda = 1.5;
  p.p = 0.5;
  p.pi_r = 1.0;
  p.delay = DistributionSpec::exponential(1.0);
  const auto m = mean_matrix(p);
  const double iota = p.infectious.value();

  const std::size_t n = 1000000;
  RngStream rng(2024);
  double sum_uu = 0, sum_un = 0, sum_nu = 0, sum_nn = 0;
  double sq_uu = 0, sq_un = 0, sq_nu = 0, sq_nn = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto u = simulate_unnamed_generation(p, rng);
    sum_uu += u.unnamed;
    sq_uu += double(u.unnamed) * u.unnamed;
    sum_un += u.named;
    sq_un += double(u.named) * u.named;
    const double v = iota * rng.uniform();
    const auto nm = simulate_named_generation(p, v, rng);
    sum_nu += nm.unnamed;
    sq_nu += double(nm.unnamed) * nm.unnamed;
    sum_nn += nm.named;
    sq_nn += double(nm.named) * nm.named;
  }
  auto check_entry = [n](double sum, double sq, double expected) {
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    const double se = std::sqrt(var / n);
    CHECK(std::abs(mean - expected) <= 4.0 * se + 1e-12);
  };
  check_entry(sum_uu, sq_uu, m.m_uu);
  check_entry(sum_un, sq_un, m.m_un);
  check_entry(sum_nu, sq_nu, m.m_nu);
  check_entry(sum_nn, sq_nn, m.m_nn);
}

TEST_CASE("r0 examples") {
  ModelParams p = const_base();
  SUBCASE("diagonal matrix") {
    p.lambda = 2.0;
    p.p = 0.0;
    p.pi_r = 0.5;
    CHECK(r0(p) == doctest::Approx(2.0));
  }
  SUBCASE("pure naming gives sqrt(m_un m_nu)") {
    p.lambda = 2.0;
    p.p = 1.0;
    p.pi_r = 1.0;
    // Growth-rate oracle on [[0,2],[1,0]]: the matrix is 2-periodic, so
    // measure the per-step factor over double applications.
    double x = 1.0, y = 1.0;
    double eig = 0.0;
    for (int it = 0; it < 64; ++it) {
      const double ax = 2.0 * y, ay = x;        // M v
      const double bx = 2.0 * ay, by = ax;      // M^2 v
      eig = std::sqrt(std::sqrt(bx * bx + by * by) / std::sqrt(x * x + y * y));
      x = bx / std::sqrt(bx * bx + by * by);
      y = by / std::sqrt(bx * bx + by * by);
    }
    CHECK(r0(p) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(eig == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  }
  SUBCASE("lambda zero") {
    p.lambda = 0.0;
    p.p = 1.0;
    p.pi_r = 1.0;
    CHECK(r0(p) == doctest::Approx(0.0));
  }
}

TEST_CASE("pgf values and normalization") {
  ModelParams p = const_base();
  p.lambda = 2.0;
  p.p = 0.5;
  p.pi_r = 0.8;
  p.delay = DistributionSpec::exponential(1.0);
  p.latent = DistributionSpec::exponential(2.0);
  CHECK(pgf_u(p, 1.0, 1.0) == doctest::Approx(1.0));
  CHECK(pgf_n(p, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-10));

  ModelParams poisson = const_base();
  poisson.lambda = 2.0;
  poisson.p = 0.5;
  poisson.pi_r = 0.0;
  CHECK(pgf_u(poisson, 0.5, 0.3) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("pgf_n matches a Monte Carlo generating-function estimate") {
  ModelParams p = const_base();
  p.lambda = 1.5;
  p.p = 0.5;
  p.pi_r = 1.0;
  p.delay = DistributionSpec::exponential(1.0);
  const double s_u = 0.5, s_n = 0.5;
  const double analytic = pgf_n(p, s_u, s_n);

  const std::size_t n = 1000000;
  RngStream rng(555);
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = p.infectious.value() * rng.uniform();
    const auto out = simulate_named_generation(p, v, rng);
    const double val = std::pow(s_u, double(out.unnamed)) * std::pow(s_n, double(out.named));
    sum += val;
    sq += val * val;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sq / n - mean * mean) / n);
  CHECK(std::abs(analytic - mean) <= 3.0 * se);
}

TEST_CASE("pgfs are nondecreasing in each argument") {
  ModelParams p = const_base();
  p.lambda = 1.8;
  p.p = 0.6;
  p.pi_r = 0.9;
  p.delay = DistributionSpec::exponential(0.8);
  p.latent = DistributionSpec::constant(0.3);
  for (double s = 0.0; s < 1.0; s += 0.2) {
    for (double t = 0.0; t < 1.0; t += 0.2) {
      CHECK(pgf_u(p, s + 0.2, t) >= pgf_u(p, s, t) - 1e-12);
      CHECK(pgf_u(p, s, t + 0.2) >= pgf_u(p, s, t) - 1e-12);
      CHECK(pgf_n(p, s + 0.2, t) >= pgf_n(p, s, t) - 1e-12);
      CHECK(pgf_n(p, s, t + 0.2) >= pgf_n(p, s, t) - 1e-12);
    }
  }
}

TEST_CASE("pgf partial derivatives at (1,1) reproduce the mean matrix") {
  ModelParams p = const_base();
  p.lambda = 1.6;
  p.p = 0.55;
  p.pi_r = 0.85;
  p.delay = DistributionSpec::exponential(1.2);
  p.latent = DistributionSpec::exponential(1.9);
  const auto m = mean_matrix(p);
  CHECK(std::abs(partial_at_one([&](double s) { return pgf_u(p, s, 1.0); }) - m.m_uu) < 1e-6);
  CHECK(std::abs(partial_at_one([&](double s) { return pgf_u(p, 1.0, s); }) - m.m_un) < 1e-6);
  CHECK(std::abs(partial_at_one([&](double s) { return pgf_n(p, s, 1.0); }) - m.m_nu) < 1e-6);
  CHECK(std::abs(partial_at_one([&](double s) { return pgf_n(p, 1.0, s); }) - m.m_nn) < 1e-6);
}

TEST_CASE("extinction probabilities") {
  SUBCASE("subcritical process dies out surely") {
    ModelParams p = const_base();
    p.lambda = 0.5;
    p.p = 0.4;
    p.pi_r = 0.7;
    const auto ext = extinction_const(p);
    CHECK(ext.q_u == 1.0);
    CHECK(ext.q_n == 1.0);
    CHECK(ext.p_ext == 1.0);
  }
  SUBCASE("no tracing reduces to the Poisson offspring fixed point") {
    ModelParams p = const_base();
    p.lambda = 2.0;
    p.p = 0.0;
    p.pi_r = 0.5;
    p.initial_infectives = 2;
    // Scalar oracle: smallest root of q = exp(-2(1-q)).
    double q = 0.0;
    for (int i = 0; i < 100000; ++i) q = std::exp(-2.0 * (1.0 - q));
    const auto ext = extinction_const(p);
    CHECK(ext.q_u == doctest::Approx(q).epsilon(1e-9));
    CHECK(ext.q_u == doctest::Approx(0.203188).epsilon(1e-5));
    CHECK(ext.p_ext == doctest::Approx(q * q).epsilon(1e-9));
  }
  SUBCASE("fixed point satisfies both equations to 1e-10") {
    ModelParams p = const_base();
    p.lambda = 2.2;
    p.p = 0.5;
    p.pi_r = 0.8;
    p.delay = DistributionSpec::exponential(1.0);
    p.latent = DistributionSpec::exponential(1.0);
    const auto ext = extinction_const(p);
    CHECK(ext.q_u > 0.0);
    CHECK(ext.q_u < 1.0);
    CHECK(std::abs(pgf_u(p, ext.q_u, ext.q_n) - ext.q_u) < 1e-10);
    CHECK(std::abs(pgf_n(p, ext.q_u, ext.q_n) - ext.q_n) < 1e-10);
  }
}

TEST_CASE("extinction probability moves the right way with the parameters") {
  ModelParams base = const_base();
  base.p = 0.5;
  base.pi_r = 0.8;
  base.delay = DistributionSpec::exponential(1.0);
  base.latent = DistributionSpec::exponential(1.0);

  double prev = 1.1;
  for (double lam : {1.5, 2.0, 2.5, 3.0}) {
    const double ext = extinction_const(base.with_lambda(lam)).p_ext;
    CHECK(ext <= prev + 1e-12);
    prev = ext;
  }
  ModelParams p = base.with_lambda(2.0);
  prev = -0.1;
  for (double naming : {0.0, 0.3, 0.6, 0.9}) {
    p.p = naming;
    const double ext = extinction_const(p).p_ext;
    CHECK(ext >= prev - 1e-12);
    prev = ext;
  }
  p = base.with_lambda(2.0);
  prev = -0.1;
  for (double pi : {0.0, 0.4, 0.8, 1.0}) {
    p.pi_r = pi;
    const double ext = extinction_const(p).p_ext;
    CHECK(ext >= prev - 1e-12);
    prev = ext;
  }
}

TEST_CASE("unnamed-type reproduction number, constant case") {
  SUBCASE("no tracing") {
    ModelParams p = const_base();
    p.lambda = 2.0;
    p.p = 0.0;
    p.pi_r = 0.6;
    CHECK(ru_const(p) == doctest::Approx(2.0));
  }
  SUBCASE("chain through named individuals") {
    ModelParams p = const_base();
    p.lambda = 2.0;
    p.p = 1.0;
    p.pi_r = 1.0;
    CHECK(ru_const(p) == doctest::Approx(2.0).epsilon(1e-12));
  }
  SUBCASE("infinite beyond the chain threshold") {
    ModelParams p = const_base();
    p.lambda = 4.0;
    p.p = 1.0;
    p.pi_r = 1.0;
    p.delay = DistributionSpec::exponential(0.001);  // delays long: p_n near 1
    CHECK(ru_const(p) == kInf);
  }
}

TEST_CASE("contact-rate threshold for finiteness, constant case") {
  ModelParams p = const_base();
  p.p = 1.0;
  p.pi_r = 1.0;
  p.delay = DistributionSpec::exponential(1.0);
  CHECK(lambda_star_const(p) == doctest::Approx(1.0 / (1.0 - std::exp(-1.0))).epsilon(1e-12));

  p.p = 0.0;
  CHECK(lambda_star_const(p) == kInf);

  p.p = 1.0;
  p.delay = DistributionSpec::zero();
  CHECK(lambda_star_const(p) == kInf);  // p_n = 0
}

TEST_CASE("r0 and ru cross 1 in the same bracket") {
  ModelParams p = const_base();
  p.p = 0.7;
  p.pi_r = 0.9;
  p.delay = DistributionSpec::exponential(1.0);
  p.latent = DistributionSpec::exponential(2.0);
  const double crit = lambda_crit(p, CritCase::ConstR0);
  const double half = 5e-7;
  const double lo = crit - half, hi = crit + half;
  CHECK((r0(p.with_lambda(lo)) - 1.0) * (r0(p.with_lambda(hi)) - 1.0) <= 0.0);
  CHECK((ru_const(p.with_lambda(lo)) - 1.0) * (ru_const(p.with_lambda(hi)) - 1.0) <= 0.0);
}

TEST_CASE("constant-case preconditions are enforced") {
  ModelParams p = const_base();
  p.pi_t = 0.5;
  CHECK_THROWS_AS(mean_matrix(p), InvalidConfig);
  ModelParams q = const_base();
  q.infectious = DistributionSpec::exponential(1.0);
  CHECK_THROWS_AS(r0(q), InvalidConfig);
}
