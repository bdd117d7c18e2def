#include "tracethresh/bdp_sim.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "tracethresh/parallel.hpp"

namespace tracethresh {

namespace {

// A named individual waiting to be expanded: the gap between its birth and
// its naming, and its already-drawn tracing delay.
struct PendingNamed {
  double v;
  double delay;
};

// Birth offsets of a Poisson(rate) process over (0, active], measured from
// the parent's death: entry = active - birth time.
void birth_gaps(double rate, double active, RngStream& rng, std::vector<double>& out) {
  out.clear();
  if (!(rate > 0.0) || !(active > 0.0)) return;
  double t = rng.exponential(rate);
  while (t < active) {
    out.push_back(active - t);
    t += rng.exponential(rate);
  }
}

// Processes one parent's offspring: unnamed children are counted, named
// children queued with their delay draw (one shared draw per interview
// under mutual coupling).
void expand_offspring(const ModelParams& params, const std::vector<double>& vs, bool interviewed,
                      RngStream& rng, std::int64_t& unnamed, std::deque<PendingNamed>& queue) {
  if (!interviewed || params.p == 0.0) {
    unnamed += static_cast<std::int64_t>(vs.size());
    return;
  }
  double shared_delay = -1.0;
  for (double v : vs) {
    if (!rng.bernoulli(params.p)) {
      ++unnamed;
      continue;
    }
    double delay;
    if (params.coupling == DelayCoupling::Mutual) {
      if (shared_delay < 0.0) shared_delay = params.delay.sample(rng);
      delay = shared_delay;
    } else {
      delay = params.delay.sample(rng);
    }
    queue.push_back({v, delay});
  }
}

}  // namespace

RSample sample_r(const ModelParams& params, const BdpOptions& opt, RngStream& rng) {
  std::int64_t unnamed = 0;
  std::deque<PendingNamed> queue;
  std::vector<double> vs;

  // Root unnamed individual: full natural lifetime, natural death.
  const double root_life = params.infectious.sample(rng);
  birth_gaps(params.lambda, root_life, rng, vs);
  if (!vs.empty()) {
    const bool interviewed = rng.bernoulli(params.pi_r);
    expand_offspring(params, vs, interviewed, rng, unnamed, queue);
  }

  long processed = 0;
  while (!queue.empty()) {
    if (unnamed >= opt.inf_threshold) return {unnamed, true};
    if (++processed > opt.cluster_cap) return {unnamed, true};
    const PendingNamed item = queue.front();
    queue.pop_front();

    const double t_l = params.latent.sample(rng);
    const double t_i = params.infectious.sample(rng);
    const double w = std::max(0.0, item.v + item.delay - t_l);
    const bool traced = w < t_i;
    const double active = std::min(t_i, w);
    if (active <= 0.0) continue;  // traced while latent: no offspring

    birth_gaps(params.lambda, active, rng, vs);
    if (vs.empty()) continue;
    const bool interviewed = rng.bernoulli(traced ? params.pi_t : params.pi_r);
    expand_offspring(params, vs, interviewed, rng, unnamed, queue);
  }
  if (unnamed >= opt.inf_threshold) return {unnamed, true};
  return {unnamed, false};
}

std::size_t RSampleSet::inf_count() const {
  return static_cast<std::size_t>(std::count(values.begin(), values.end(), -1));
}

double RSampleSet::p_inf() const {
  return values.empty() ? 0.0 : static_cast<double>(inf_count()) / values.size();
}

double RSampleSet::finite_mean() const {
  std::int64_t sum = 0;
  std::size_t count = 0;
  for (auto v : values) {
    if (v >= 0) {
      sum += v;
      ++count;
    }
  }
  return count == 0 ? 0.0 : static_cast<double>(sum) / count;
}

double RSampleSet::finite_sd() const {
  const double mean = finite_mean();
  double ss = 0.0;
  std::size_t count = 0;
  for (auto v : values) {
    if (v >= 0) {
      ss += (v - mean) * (v - mean);
      ++count;
    }
  }
  return count < 2 ? 0.0 : std::sqrt(ss / (count - 1));
}

RSampleSet sample_r_many(const ModelParams& params, std::size_t n, const BdpOptions& opt,
                         std::uint64_t seed) {
  params.validate();
  RSampleSet out;
  out.inf_threshold = opt.inf_threshold;
  out.seed = seed;
  out.values.resize(n);
  parallel_for(n, [&](std::size_t i) {
    RngStream rng = RngStream::substream(seed, i);
    const RSample s = sample_r(params, opt, rng);
    out.values[i] = s.infinite ? -1 : static_cast<std::int32_t>(s.value);
  });
  return out;
}

namespace {

// Empirical pgf as a histogram polynomial; infinite draws add no mass.
struct EmpiricalPgf {
  std::vector<double> weight;  // weight[r] = count(R = r) / n
  double operator()(double s) const {
    double acc = 0.0;
    for (std::size_t r = weight.size(); r-- > 0;) acc = acc * s + weight[r];
    return acc;
  }
};

EmpiricalPgf histogram_pgf(const std::vector<std::int64_t>& counts, std::size_t n) {
  EmpiricalPgf pgf;
  pgf.weight.resize(counts.size());
  for (std::size_t r = 0; r < counts.size(); ++r) {
    pgf.weight[r] = static_cast<double>(counts[r]) / static_cast<double>(n);
  }
  return pgf;
}

double smallest_pgf_root(const EmpiricalPgf& pgf) {
  double s = 0.0;
  for (long iter = 0; iter < 10000000; ++iter) {
    const double next = pgf(s);
    if (std::abs(next - s) < 1e-10) return next;
    s = next;
  }
  return s;  // near-critical stall: the iterate is within float noise of the root
}

}  // namespace

ExtinctionEstimate estimate_extinction(const RSampleSet& samples, int initial_infectives,
                                       std::uint64_t seed) {
  const std::size_t n = samples.n();
  std::vector<std::int64_t> counts(static_cast<std::size_t>(samples.inf_threshold) + 1, 0);
  std::size_t n_inf = 0;
  for (auto v : samples.values) {
    if (v < 0) {
      ++n_inf;
    } else {
      const auto r = std::min<std::size_t>(static_cast<std::size_t>(v), counts.size() - 1);
      ++counts[r];
    }
  }

  // Trim trailing empty bins so the pgf polynomial stays as short as the
  // data allow, whatever the configured threshold.
  std::size_t top = counts.size();
  while (top > 1 && counts[top - 1] == 0) --top;
  counts.resize(top);

  ExtinctionEstimate est;
  est.n = n;
  est.p_inf = static_cast<double>(n_inf) / n;
  est.mean_r = samples.finite_mean();
  const std::size_t n_finite = n - n_inf;
  est.se_r = n_finite > 1 ? samples.finite_sd() / std::sqrt(static_cast<double>(n_finite)) : 0.0;

  est.root = smallest_pgf_root(histogram_pgf(counts, n));
  est.p_ext = std::pow(est.root, initial_infectives);

  // Bootstrap over the histogram: resample n draws per replicate and redo
  // the root search.
  constexpr int kResamples = 200;
  std::vector<double> cdf(counts.size() + 1);
  double acc = 0.0;
  for (std::size_t r = 0; r < counts.size(); ++r) {
    acc += static_cast<double>(counts[r]) / n;
    cdf[r] = acc;
  }
  cdf[counts.size()] = 1.0;  // remaining mass = infinite draws
  RngStream boot_rng = RngStream::substream(seed, 0x626f6f74);  // "boot"
  double sum = 0.0;
  double sum_sq = 0.0;
  std::vector<std::int64_t> resampled(counts.size());
  for (int b = 0; b < kResamples; ++b) {
    std::fill(resampled.begin(), resampled.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = boot_rng.uniform();
      const auto it = std::lower_bound(cdf.begin(), cdf.end() - 1, u);
      const auto bin = static_cast<std::size_t>(it - cdf.begin());
      if (bin < resampled.size()) ++resampled[bin];
    }
    const double root = smallest_pgf_root(histogram_pgf(resampled, n));
    const double p = std::pow(root, initial_infectives);
    sum += p;
    sum_sq += p * p;
  }
  const double mean_b = sum / kResamples;
  est.se = std::sqrt(std::max(0.0, sum_sq / kResamples - mean_b * mean_b));
  return est;
}

ExtinctionEstimate estimate_extinction(const ModelParams& params, std::size_t n,
                                       const BdpOptions& opt, std::uint64_t seed) {
  const RSampleSet samples = sample_r_many(params, n, opt, seed);
  return estimate_extinction(samples, params.initial_infectives, seed);
}

double table_cell_extinction(const ModelParams& params, std::size_t n, const BdpOptions& opt,
                             std::uint64_t seed) {
  return estimate_extinction(params, n, opt, seed).p_ext;
}

OffspringCounts simulate_unnamed_generation(const ModelParams& params, RngStream& rng) {
  OffspringCounts out;
  std::vector<double> vs;
  const double life = params.infectious.sample(rng);
  birth_gaps(params.lambda, life, rng, vs);
  if (vs.empty()) return out;
  if (rng.bernoulli(params.pi_r)) {
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (rng.bernoulli(params.p)) {
        ++out.named;
      } else {
        ++out.unnamed;
      }
    }
  } else {
    out.unnamed = static_cast<std::int64_t>(vs.size());
  }
  return out;
}

OffspringCounts simulate_named_generation(const ModelParams& params, double v, RngStream& rng) {
  OffspringCounts out;
  const double t_l = params.latent.sample(rng);
  const double t_i = params.infectious.sample(rng);
  const double delay = params.delay.sample(rng);
  const double w = std::max(0.0, v + delay - t_l);
  out.traced = w < t_i;
  const double active = std::min(t_i, w);
  if (active <= 0.0) return out;
  std::vector<double> vs;
  birth_gaps(params.lambda, active, rng, vs);
  if (vs.empty()) return out;
  if (rng.bernoulli(out.traced ? params.pi_t : params.pi_r)) {
    for (std::size_t i = 0; i < vs.size(); ++i) {
      if (rng.bernoulli(params.p)) {
        ++out.named;
      } else {
        ++out.unnamed;
      }
    }
  } else {
    out.unnamed = static_cast<std::int64_t>(vs.size());
  }
  return out;
}

}  // namespace tracethresh
