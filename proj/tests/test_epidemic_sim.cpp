#include "tracethresh/epidemic_sim.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "tracethresh/errors.hpp"

using namespace tracethresh;

namespace {

ModelParams outbreak_config(DistributionSpec infectious, long population) {
  ModelParams p;
  p.lambda = 2.0;
  p.p = 0.5;
  p.pi_r = 0.8;
  p.pi_t = 0.8;
  p.infectious = infectious;
  p.latent = DistributionSpec::exponential(1.0);
  p.delay = DistributionSpec::exponential(1.0);
  p.population = population;
  p.initial_infectives = 1;
  return p;
}

// Independent Gillespie oracle for the Markov case (exponential latent and
// infectious periods, no tracing): rates lambda S I / N, nu E, gamma I.
long gillespie_seir(long n_pop, int m, double lambda, double nu, double gamma, RngStream& rng) {
  long s = n_pop, e = 0, i = m, r = 0;
  while (e + i > 0) {
    const double rate_inf = lambda * double(s) * double(i) / double(n_pop);
    const double rate_lat = nu * double(e);
    const double rate_rem = gamma * double(i);
    const double total = rate_inf + rate_lat + rate_rem;
    const double u = rng.uniform() * total;
    if (u < rate_inf) {
      --s;
      ++e;
    } else if (u < rate_inf + rate_lat) {
      --e;
      ++i;
    } else {
      --i;
      ++r;
    }
  }
  return r;
}

double ks_statistic(std::vector<long> a, std::vector<long> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const long hi = std::max(a.back(), b.back());
  double d = 0.0;
  std::size_t ia = 0, ib = 0;
  for (long x = 0; x <= hi; ++x) {
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(double(ia) / a.size() - double(ib) / b.size()));
  }
  return d;
}

}  // namespace

TEST_CASE("no contacts: only the seeds are removed") {
  ModelParams p = outbreak_config(DistributionSpec::exponential(1.0), 50);
  p.lambda = 0.0;
  p.initial_infectives = 3;
  RngStream rng(4);
  for (int i = 0; i < 20; ++i) CHECK(run_epidemic(p, rng) == 3);
}

TEST_CASE("a single susceptible is almost surely infected at huge contact rates") {
  ModelParams p;
  p.lambda = 1000.0;
  p.infectious = DistributionSpec::exponential(1.0);
  p.population = 1;
  p.initial_infectives = 1;
  RngStream rng(8);
  int both = 0;
  for (int i = 0; i < 300; ++i) {
    if (run_epidemic(p, rng) == 2) ++both;
  }
  CHECK(both >= 290);
}

TEST_CASE("trace arrivals on already-removed targets are counted no-ops") {
  // Long delays make most named contacts die naturally before the tracer
  // arrives, so no-op arrivals must show up.
  ModelParams p = outbreak_config(DistributionSpec::exponential(1.0), 150);
  p.delay = DistributionSpec::exponential(0.2);
  p.p = 1.0;
  long noops = 0, removals = 0;
  for (std::size_t i = 0; i < 500; ++i) {
    RngStream rng = RngStream::substream(97, i);
    const auto st = run_epidemic_stats(p, rng);
    noops += st.trace_noops;
    removals += st.final_size;
  }
  CHECK(noops > 0);
  CHECK(removals >= 500);
}

TEST_CASE("tracing reduces spread and is visible in the statistics") {
  ModelParams traced = outbreak_config(DistributionSpec::exponential(1.0), 300);
  ModelParams untraced = traced;
  untraced.p = 0.0;

  const std::size_t n = 3000;
  double mean_traced = 0.0, mean_untraced = 0.0;
  long trace_events = 0;
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r1 = RngStream::substream(31, i);
    const auto st = run_epidemic_stats(traced, r1);
    mean_traced += double(st.final_size);
    trace_events += st.traced_removals;
    RngStream r2 = RngStream::substream(31, i);
    mean_untraced += double(run_epidemic(untraced, r2));
  }
  mean_traced /= double(n);
  mean_untraced /= double(n);
  CHECK(trace_events > 0);
  CHECK(mean_traced < mean_untraced);
}

TEST_CASE("matches an independent Gillespie oracle when tracing is off") {
  // Markov configuration so the CTMC oracle is exact.
  ModelParams p;
  p.lambda = 1.8;
  p.p = 0.0;
  p.pi_r = 0.0;
  p.pi_t = 0.0;
  p.infectious = DistributionSpec::exponential(1.0);
  p.latent = DistributionSpec::exponential(1.0);
  p.population = 100;
  p.initial_infectives = 1;

  const std::size_t n = 10000;
  std::vector<long> ours(n), oracle(n);
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r1 = RngStream::substream(17, i);
    ours[i] = run_epidemic(p, r1);
    RngStream r2 = RngStream::substream(1717, i);
    oracle[i] = gillespie_seir(100, 1, 1.8, 1.0, 1.0, r2);
  }
  // Two-sample KS 1% critical value: 1.628 sqrt(2/n).
  const double critical = 1.628 * std::sqrt(2.0 / double(n));
  CHECK(ks_statistic(ours, oracle) < critical);
}

TEST_CASE("more naming never increases the mean final size beyond noise") {
  ModelParams lo_p = outbreak_config(DistributionSpec::exponential(1.0), 200);
  lo_p.p = 0.2;
  ModelParams hi_p = lo_p;
  hi_p.p = 0.9;
  const std::size_t n = 4000;
  double mean_lo = 0.0, mean_hi = 0.0, sq_lo = 0.0, sq_hi = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    RngStream r1 = RngStream::substream(23, i);
    const double a = double(run_epidemic(lo_p, r1));
    RngStream r2 = RngStream::substream(23, i);
    const double b = double(run_epidemic(hi_p, r2));
    mean_lo += a;
    sq_lo += a * a;
    mean_hi += b;
    sq_hi += b * b;
  }
  mean_lo /= n;
  mean_hi /= n;
  const double se = std::sqrt((sq_lo / n - mean_lo * mean_lo) / n +
                              (sq_hi / n - mean_hi * mean_hi) / n);
  CHECK(mean_hi <= mean_lo + 3.0 * se);
}

TEST_CASE("final size histogram is bimodal at moderate population sizes") {
  const ModelParams p = outbreak_config(DistributionSpec::exponential(1.0), 200);
  const auto hist = final_size_distribution(p, 20000, 11);
  CHECK(hist.cutoff > 1);
  CHECK(hist.cutoff < 201);
  // Branching-process extinction for this configuration is near 0.63; the
  // finite-population minor fraction sits a little above it.
  CHECK(hist.p_minor() > 0.55);
  CHECK(hist.p_minor() < 0.8);
  std::int64_t total = 0;
  for (auto c : hist.counts) total += c;
  CHECK(total == 20000);

  const ModelParams q = outbreak_config(DistributionSpec::constant(1.0), 200);
  const auto hist_const = final_size_distribution(q, 20000, 12);
  CHECK(hist_const.p_minor() > 0.3);
  CHECK(hist_const.p_minor() < 0.5);
}

TEST_CASE("subcritical spread has no minor/major separation") {
  ModelParams p = outbreak_config(DistributionSpec::exponential(1.0), 100);
  p.lambda = 0.5;
  CHECK_THROWS_AS(final_size_distribution(p, 4000, 3), DegenerateHistogram);
  const auto hist = final_size_distribution(p, 4000, 3, 50);  // explicit cutoff override
  CHECK(hist.cutoff == 50);
  CHECK(hist.p_minor() > 0.99);
}

TEST_CASE("same seed reproduces the histogram exactly") {
  const ModelParams p = outbreak_config(DistributionSpec::constant(1.0), 80);
  const auto a = final_size_distribution(p, 3000, 77);
  const auto b = final_size_distribution(p, 3000, 77);
  CHECK(a.counts == b.counts);
  CHECK(a.cutoff == b.cutoff);
}

TEST_CASE("extinction-vs-population table decreases toward the branching value") {
  const ModelParams p = outbreak_config(DistributionSpec::exponential(1.0), 0);
  const auto rows = estimate_extinction_vs_population(p, {50, 400}, 20000, 1234);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].population == 50);
  CHECK(rows[0].p_hat > rows[1].p_hat);
  CHECK(rows[1].p_hat > 0.55);
  CHECK(rows[0].se < 0.01);
}

TEST_CASE("cutoff detector finds the deepest valley") {
  // Two clear modes with a flat-bottomed valley.
  std::vector<std::int64_t> counts = {0, 900, 400, 120, 40, 10, 2, 1, 0, 0,
                                      0, 2,   30,  160, 420, 600, 300, 90, 10, 0};
  const int cut = detect_minor_major_cutoff(counts, 1, 19);
  CHECK(cut >= 7);
  CHECK(cut <= 11);
  std::vector<std::int64_t> unimodal = {0, 10, 50, 200, 400, 300, 100, 20, 5, 1};
  CHECK_THROWS_AS(detect_minor_major_cutoff(unimodal, 1, 9), DegenerateHistogram);
}
