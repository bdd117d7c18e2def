#pragma once

#include <cstdint>
#include <vector>

#include "tracethresh/model_params.hpp"

namespace tracethresh {

// Monte Carlo over the birth-death approximation of the early epidemic.
// One replicate simulates the naming cluster grown from a single unnamed
// individual and counts its unnamed offspring (the offspring variable of
// the embedded process over unnamed individuals).

struct BdpOptions {
  // Unnamed-offspring count at which a cluster is recorded as infinite.
  int inf_threshold = 100;
  // Guard on processed named individuals per cluster; a cluster that grows
  // this far without tripping inf_threshold is also recorded infinite.
  long cluster_cap = 1000000;
};

struct RSample {
  std::int64_t value;
  bool infinite;
};

RSample sample_r(const ModelParams& params, const BdpOptions& opt, RngStream& rng);

struct RSampleSet {
  std::vector<std::int32_t> values;  // -1 encodes an infinite draw
  int inf_threshold = 100;
  std::uint64_t seed = 0;

  std::size_t n() const { return values.size(); }
  std::size_t inf_count() const;
  double p_inf() const;
  double finite_mean() const;
  double finite_sd() const;
};

// n replicates on streams derived from (seed, replicate index); results are
// identical for any thread count.
RSampleSet sample_r_many(const ModelParams& params, std::size_t n, const BdpOptions& opt,
                         std::uint64_t seed);

struct ExtinctionEstimate {
  double p_ext;   // root of the empirical pgf, raised to the initial count
  double se;      // bootstrap standard error of p_ext
  double root;    // single-ancestor extinction probability
  double p_inf;   // empirical share of infinite draws
  double mean_r;  // mean over finite draws
  double se_r;    // standard error of that mean
  std::size_t n;
};

// Smallest root of the empirical offspring pgf in (0,1], by monotone
// fixed-point iteration from 0; infinite draws contribute zero mass below 1.
ExtinctionEstimate estimate_extinction(const ModelParams& params, std::size_t n,
                                       const BdpOptions& opt, std::uint64_t seed);
ExtinctionEstimate estimate_extinction(const RSampleSet& samples, int initial_infectives,
                                       std::uint64_t seed);

// Extinction probability for one parameter cell (Table-style sweeps).
double table_cell_extinction(const ModelParams& params, std::size_t n, const BdpOptions& opt,
                             std::uint64_t seed);

// One generation of offspring, split by whether the child was named.
// Exposed for cross-checks of the analytic mean matrix.
struct OffspringCounts {
  std::int64_t unnamed = 0;
  std::int64_t named = 0;
  bool traced = false;
};

// Immediate offspring of a fresh unnamed individual.
OffspringCounts simulate_unnamed_generation(const ModelParams& params, RngStream& rng);

// Immediate offspring of a named individual given the time v between its
// birth and its naming, drawing its own latent/infectious/delay periods.
OffspringCounts simulate_named_generation(const ModelParams& params, double v, RngStream& rng);

}  // namespace tracethresh
