#include "tracethresh/model_params.hpp"

#include <nlohmann/json.hpp>

#include "tracethresh/errors.hpp"

namespace tracethresh {

void ModelParams::validate() const {
  if (!(lambda >= 0.0)) throw InvalidConfig("lambda must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidConfig("p must be in [0,1]");
  if (!(pi_r >= 0.0 && pi_r <= 1.0)) throw InvalidConfig("pi_r must be in [0,1]");
  if (!(pi_t >= 0.0 && pi_t <= 1.0)) throw InvalidConfig("pi_t must be in [0,1]");
  if (population < 1) throw InvalidConfig("N must be >= 1");
  if (initial_infectives < 1) throw InvalidConfig("m must be >= 1");
}

ModelParams ModelParams::time_scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidConfig("time scale factor must be > 0");
  ModelParams out = *this;
  out.lambda = lambda / factor;
  out.infectious = infectious.scaled_time(factor);
  out.latent = latent.scaled_time(factor);
  out.delay = delay.scaled_time(factor);
  return out;
}

ModelParams ModelParams::from_json(const nlohmann::json& j) {
  ModelParams out;
  out.lambda = j.at("lambda").get<double>();
  out.p = j.at("p").get<double>();
  out.pi_r = j.at("pi_r").get<double>();
  out.pi_t = j.at("pi_t").get<double>();
  out.infectious = DistributionSpec::from_json(j.at("infectious"));
  out.latent = DistributionSpec::from_json(j.at("latent"));
  out.delay = DistributionSpec::from_json(j.at("delay"));
  if (j.contains("N")) out.population = j.at("N").get<long>();
  if (j.contains("m")) out.initial_infectives = j.at("m").get<int>();
  if (j.contains("delay_coupling")) {
    const std::string c = j.at("delay_coupling").get<std::string>();
    if (c == "independent") {
      out.coupling = DelayCoupling::Independent;
    } else if (c == "mutual") {
      out.coupling = DelayCoupling::Mutual;
    } else {
      throw InvalidConfig("delay_coupling must be 'independent' or 'mutual'");
    }
  }
  out.validate();
  return out;
}

nlohmann::json ModelParams::to_json() const {
  return {
      {"lambda", lambda},
      {"p", p},
      {"pi_r", pi_r},
      {"pi_t", pi_t},
      {"infectious", infectious.to_json()},
      {"latent", latent.to_json()},
      {"delay", delay.to_json()},
      {"N", population},
      {"m", initial_infectives},
      {"delay_coupling", coupling == DelayCoupling::Independent ? "independent" : "mutual"},
  };
}

}  // namespace tracethresh
