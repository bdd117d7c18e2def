#pragma once

#include <nlohmann/json_fwd.hpp>

#include "tracethresh/distributions.hpp"

namespace tracethresh {

// Whether siblings named at the same interview share one delay draw.
enum class DelayCoupling { Independent, Mutual };

// Full parameter set of the tracing epidemic and its branching-process
// approximation.
struct ModelParams {
  double lambda = 0.0;  // contact rate
  double p = 0.0;       // probability an interviewee names a given infectee
  double pi_r = 0.0;    // interview probability on natural removal
  double pi_t = 0.0;    // interview probability on traced removal
  DistributionSpec infectious = DistributionSpec::exponential(1.0);
  DistributionSpec latent = DistributionSpec::zero();
  DistributionSpec delay = DistributionSpec::zero();
  long population = 1000;      // N, initial susceptibles
  int initial_infectives = 1;  // m
  DelayCoupling coupling = DelayCoupling::Independent;

  void validate() const;  // throws InvalidConfig

  ModelParams with_lambda(double value) const {
    ModelParams out = *this;
    out.lambda = value;
    return out;
  }

  // All period laws scaled by `factor` and the contact rate divided by it;
  // the process is unchanged up to the time unit.
  ModelParams time_scaled(double factor) const;

  static ModelParams from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

}  // namespace tracethresh
