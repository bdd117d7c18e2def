#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tracethresh/model_params.hpp"

namespace tracethresh {

// Event-driven simulation of the finite-population epidemic with tracing.
// Per-pair contact streams are folded into one per-infective Poisson
// process of rate lambda (N+m-1)/N with a uniform target.

struct EpidemicStats {
  long final_size = 0;      // total removals at absorption
  long traced_removals = 0;
  long trace_noops = 0;     // trace arrivals that found an already-removed target
};

EpidemicStats run_epidemic_stats(const ModelParams& params, RngStream& rng);

// Final size only (includes the m initial infectives).
long run_epidemic(const ModelParams& params, RngStream& rng);

struct FinalSizeHistogram {
  std::vector<std::int64_t> counts;  // counts[k] = replicates with final size k
  std::size_t n = 0;
  long population = 0;  // N
  int initial = 0;      // m
  int cutoff = -1;      // final size <= cutoff counts as a minor outbreak

  double p_minor() const;
  double standard_error() const;  // binomial SE of p_minor
};

// n replicates on per-replicate streams. The minor/major cutoff is the
// deepest interior valley of the smoothed histogram unless overridden;
// throws DegenerateHistogram when no interior valley exists and no
// override is given.
FinalSizeHistogram final_size_distribution(const ModelParams& params, std::size_t n,
                                           std::uint64_t seed,
                                           std::optional<int> cutoff_override = std::nullopt);

struct ExtinctionVsN {
  long population;
  double p_hat;
  double se;
  int cutoff;
};

// Minor-outbreak proportion and its binomial standard error per population
// size in the grid.
std::vector<ExtinctionVsN> estimate_extinction_vs_population(
    const ModelParams& params, const std::vector<long>& populations, std::size_t n,
    std::uint64_t seed, std::optional<int> cutoff_override = std::nullopt);

// Cutoff detection on a raw histogram (moving-average smoothing, bandwidth
// 5): index of the deepest interior local minimum with strictly higher
// values somewhere on both sides. Exposed for tests and the CLI.
int detect_minor_major_cutoff(const std::vector<std::int64_t>& counts, int lo, int hi);

}  // namespace tracethresh
