#include "tracethresh/distributions.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <nlohmann/json.hpp>

#include "doctest.h"
#include "tracethresh/errors.hpp"
#include "tracethresh/rng.hpp"

using namespace tracethresh;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Simpson oracle used to validate mgf values independently of the
// library's own quadrature.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("sampling degenerate laws") {
  RngStream rng(7);
  const auto c = DistributionSpec::constant(1.0);
  const auto z = DistributionSpec::zero();
  for (int i = 0; i < 100; ++i) {
    CHECK(c.sample(rng) == 1.0);
    CHECK(z.sample(rng) == 0.0);
  }
}

TEST_CASE("sample moments match spec moments within 5 standard errors") {
  const std::size_t n = 1000000;
  const std::vector<DistributionSpec> laws = {
      DistributionSpec::exponential(1.0),
      DistributionSpec::exponential(0.4),
      DistributionSpec::gamma(1.0, 2.0),
      DistributionSpec::gamma(2.5, 0.7),
  };
  for (std::size_t li = 0; li < laws.size(); ++li) {
    const auto& law = laws[li];
    RngStream rng = RngStream::substream(42, li);
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = law.sample(rng);
      sum += x;
      sum_sq += x * x;
    }
    const double mean = sum / n;
    const double var = sum_sq / n - mean * mean;
    const double se_mean = std::sqrt(law.variance() / n);
    CHECK(close(mean, law.mean(), 5.0 * se_mean));

    // SE of the sample variance from the fourth central moment.
    const double m = law.mean(), v = law.variance();
    double mu4;
    if (law.kind() == DistKind::Exponential) {
      mu4 = 9.0 * v * v;
    } else {
      const double shape = law.shape();
      const double scale = m / shape;
      mu4 = 3.0 * shape * (shape + 2.0) * scale * scale * scale * scale;
    }
    const double se_var = std::sqrt((mu4 - v * v) / n);
    CHECK(close(var, v, 5.0 * se_var));
  }
  // Exponential(1) headline check: mean within 0.005 at 1e6 draws.
  RngStream rng(99);
  const auto e1 = DistributionSpec::exponential(1.0);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += e1.sample(rng);
  CHECK(close(sum / n, 1.0, 0.005));
}

TEST_CASE("mgf closed forms") {
  CHECK(DistributionSpec::exponential(1.0).mgf(1.0) == doctest::Approx(0.5));
  CHECK(DistributionSpec::constant(1.0).mgf(1.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(DistributionSpec::gamma(1.0, 2.0).mgf(1.0) == doctest::Approx(4.0 / 9.0));
}

TEST_CASE("gamma mgf agrees with a direct integration oracle") {
  const auto g = DistributionSpec::gamma(1.0, 2.0);
  for (double theta : {0.3, 1.0, 2.7}) {
    const double oracle =
        simpson([&](double t) { return std::exp(-theta * t) * g.pdf(t); }, 0.0, 60.0, 20000);
    CHECK(g.mgf(theta) == doctest::Approx(oracle).epsilon(1e-8));
  }
}

TEST_CASE("mgf is 1 at zero and nonincreasing in theta") {
  const std::vector<DistributionSpec> laws = {
      DistributionSpec::zero(), DistributionSpec::constant(0.8),
      DistributionSpec::exponential(1.7), DistributionSpec::gamma(0.9, 3.2)};
  for (const auto& law : laws) {
    CHECK(law.mgf(0.0) == doctest::Approx(1.0));
    double prev = 1.0;
    for (double theta = 0.25; theta <= 5.0; theta += 0.25) {
      const double cur = law.mgf(theta);
      CHECK(cur <= prev + 1e-15);
      CHECK(cur > 0.0);
      CHECK(cur <= 1.0);
      prev = cur;
    }
  }
}

TEST_CASE("truncated expectation examples") {
  // E[X 1{0 < X <= 1}] for X ~ Exp(1): integral of t e^{-t} = 1 - 2/e.
  const DiffLaw exp_minus_zero{DistributionSpec::exponential(1.0), DistributionSpec::zero()};
  CHECK(trunc_expect(exp_minus_zero, Integrand::x(), open_bound(0.0), closed_bound(1.0)) ==
        doctest::Approx(1.0 - 2.0 * std::exp(-1.0)).epsilon(1e-12));

  // Zero - Zero has all mass at 0, excluded by the open bound.
  const DiffLaw zero_zero{DistributionSpec::zero(), DistributionSpec::zero()};
  CHECK(trunc_expect(zero_zero, Integrand::one(), open_bound(0.0), plus_infinity()) == 0.0);
  CHECK(trunc_expect(zero_zero, Integrand::one(), closed_bound(0.0), plus_infinity()) == 1.0);

  // P(T_D > T_L) = 1/2 for i.i.d. exponentials.
  const DiffLaw exp_exp{DistributionSpec::exponential(1.0), DistributionSpec::exponential(1.0)};
  CHECK(trunc_expect(exp_exp, Integrand::one(), open_bound(0.0), plus_infinity()) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("complementary ranges of the indicator sum to the total mass") {
  const std::vector<DiffLaw> laws = {
      {DistributionSpec::exponential(1.3), DistributionSpec::zero()},
      {DistributionSpec::exponential(0.7), DistributionSpec::exponential(2.1)},
      {DistributionSpec::constant(0.6), DistributionSpec::exponential(1.1)},
      {DistributionSpec::gamma(1.2, 2.0), DistributionSpec::exponential(1.0)},
  };
  for (const auto& law : laws) {
    const double left = trunc_expect(law, Integrand::one(), minus_infinity(), closed_bound(0.4));
    const double right = trunc_expect(law, Integrand::one(), open_bound(0.4), plus_infinity());
    CHECK(left + right == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("closed-form and quadrature paths agree on constant/exponential combos") {
  const std::vector<DistributionSpec> choices = {
      DistributionSpec::zero(), DistributionSpec::constant(0.7),
      DistributionSpec::exponential(1.3)};
  const std::vector<Integrand> gs = {
      Integrand::one(),
      Integrand::x(),
      Integrand::neg_x(),
      Integrand::x_squared(),
      Integrand::shifted_square(0.8),
      Integrand::exp_decay(0.6),
      Integrand::shifted_exp_decay(0.8, 0.6),
  };
  const std::vector<std::pair<Bound, Bound>> ranges = {
      {open_bound(-0.5), closed_bound(0.9)},
      {closed_bound(0.0), open_bound(0.7)},
      {open_bound(-1.5), open_bound(2.5)},
  };
  for (const auto& delay : choices) {
    for (const auto& latent : choices) {
      const DiffLaw law{delay, latent};
      for (const auto& g : gs) {
        for (const auto& [lo, hi] : ranges) {
          const double closed = trunc_expect(law, g, lo, hi);
          const double quad = trunc_expect_quadrature(law, g, lo, hi);
          CHECK_MESSAGE(close(closed, quad, 1e-8 * std::max(1.0, std::abs(closed))),
                        "closed=", closed, " quad=", quad);
        }
      }
    }
  }
}

TEST_CASE("quadrature path matches closed form through the gamma(shape=1) identity") {
  // Gamma with shape 1 is the exponential law, but it is routed through
  // the quadrature path.
  const DiffLaw gamma_form{DistributionSpec::gamma(1.0 / 1.3, 1.0),
                           DistributionSpec::exponential(0.9)};
  const DiffLaw exp_form{DistributionSpec::exponential(1.3), DistributionSpec::exponential(0.9)};
  for (const auto& g : {Integrand::one(), Integrand::x(), Integrand::exp_decay(0.5)}) {
    const double via_gamma = trunc_expect(gamma_form, g, open_bound(-0.8), closed_bound(1.4));
    const double via_exp = trunc_expect(exp_form, g, open_bound(-0.8), closed_bound(1.4));
    CHECK(via_gamma == doctest::Approx(via_exp).epsilon(1e-8));
  }
}

TEST_CASE("gamma difference law agrees with Monte Carlo") {
  const DiffLaw law{DistributionSpec::gamma(1.0, 2.0), DistributionSpec::exponential(1.0)};
  const double analytic = trunc_expect(law, Integrand::one(), open_bound(0.0), plus_infinity());
  RngStream rng(1234);
  const std::size_t n = 1000000;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (law.delay.sample(rng) - law.latent.sample(rng) > 0.0) ++hits;
  }
  const double mc = static_cast<double>(hits) / n;
  const double se = std::sqrt(mc * (1.0 - mc) / n);
  CHECK(close(analytic, mc, 5.0 * se));
}

TEST_CASE("distribution json literals round-trip") {
  const std::vector<DistributionSpec> laws = {
      DistributionSpec::zero(), DistributionSpec::constant(1.0),
      DistributionSpec::exponential(1.0), DistributionSpec::gamma(1.0, 2.0)};
  for (const auto& law : laws) {
    CHECK(DistributionSpec::from_json(law.to_json()) == law);
  }
  const auto parsed = DistributionSpec::from_json(nlohmann::json::parse(
      R"({"kind":"gamma","mean":1.0,"shape":2.0})"));
  CHECK(parsed.kind() == DistKind::Gamma);
  CHECK_THROWS_AS(DistributionSpec::exponential(-1.0), InvalidConfig);
  CHECK_THROWS_AS(DistributionSpec::from_json(nlohmann::json::parse(R"({"kind":"weird"})")),
                  InvalidConfig);
}
