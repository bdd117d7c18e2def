#include <cmath>
#include <string>
#include <vector>

#include "experiment.hpp"
#include "tracethresh/bdp_sim.hpp"
#include "tracethresh/constant_analysis.hpp"
#include "tracethresh/epidemic_sim.hpp"
#include "tracethresh/errors.hpp"
#include "tracethresh/exponential_analysis.hpp"
#include "tracethresh/rng.hpp"

namespace tracethresh::cli {

namespace {

// Shared operating point of the finite-population experiments: lambda=2,
// p=0.5, pi_R=pi_T=0.8, unit-mean exponential latent periods and delays.
ModelParams outbreak_base(DistributionSpec infectious) {
  ModelParams p;
  p.lambda = 2.0;
  p.p = 0.5;
  p.pi_r = 0.8;
  p.pi_t = 0.8;
  p.infectious = infectious;
  p.latent = DistributionSpec::exponential(1.0);
  p.delay = DistributionSpec::exponential(1.0);
  p.initial_infectives = 1;
  return p;
}

// y*/R_U trace against the contact rate for the convergence illustration.
int preset_blowup_trace(ExperimentConfig cfg) {
  ModelParams p;
  p.p = 1.0;
  p.pi_r = 1.0;
  p.pi_t = 0.0;
  p.infectious = DistributionSpec::exponential(1.0);
  p.latent = DistributionSpec::zero();
  p.delay = DistributionSpec::exponential(0.7);
  cfg.params = p;

  const double star = lambda_star_exp(p);
  CsvWriter csv({"lambda", "y_star", "denominator", "r_u"});
  for (int i = 0; i <= 420; ++i) {
    const double lam = i * 0.005;
    const ModelParams probe = p.with_lambda(lam);
    const double y = y_star(probe);
    const double d = y_star_denominator(probe);
    const double r = lam < star ? r_u_exp(probe) : std::numeric_limits<double>::infinity();
    csv.add_row({format_number(lam), format_number(y), format_number(d), format_number(r)});
  }
  csv.write(cfg.out, cfg, {{"lambda_star", star}});
  return 0;
}

int preset_final_size(ExperimentConfig cfg, DistributionSpec infectious) {
  cfg.params = outbreak_base(infectious);
  CsvWriter csv({"N", "final_size", "count"});
  for (long n_pop : {20L, 50L, 100L, 200L}) {
    ModelParams p = cfg.params;
    p.population = n_pop;
    // Histogram only; the minor/major split is applied downstream.
    const auto hist = final_size_distribution(p, cfg.n, splitmix64(cfg.seed) + n_pop,
                                              p.initial_infectives);
    for (std::size_t k = 0; k < hist.counts.size(); ++k) {
      if (hist.counts[k] > 0) {
        csv.add_row({std::to_string(n_pop), std::to_string(k), std::to_string(hist.counts[k])});
      }
    }
  }
  csv.write(cfg.out, cfg);
  return 0;
}

int preset_extinction_vs_population(ExperimentConfig cfg) {
  CsvWriter csv({"infectious", "N", "p_hat", "se", "cutoff", "branching_estimate"});
  nlohmann::json summary;
  const std::vector<long> grid = {20, 50, 100, 200, 400, 700, 1000, 1400, 2000};
  for (const auto& [label, infectious] :
       std::vector<std::pair<std::string, DistributionSpec>>{
           {"exponential", DistributionSpec::exponential(1.0)},
           {"constant", DistributionSpec::constant(1.0)}}) {
    ModelParams p = outbreak_base(infectious);
    cfg.params = p;
    BdpOptions opt;
    opt.inf_threshold = cfg.inf_threshold;
    const double asymptote =
        estimate_extinction(p, cfg.n, opt, splitmix64(cfg.seed ^ 0x5eed)).p_ext;
    summary[label] = asymptote;
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
      p.population = grid[idx];
      try {
        const auto hist = final_size_distribution(
            p, cfg.n, splitmix64(cfg.seed) + 1000 * (label == "constant") + idx, cfg.cutoff);
        csv.add_row({label, std::to_string(grid[idx]), format_number(hist.p_minor()),
                     format_number(hist.standard_error()), std::to_string(hist.cutoff),
                     format_number(asymptote)});
      } catch (const DegenerateHistogram&) {
        csv.add_row({label, std::to_string(grid[idx]), "nan", "nan", "-1",
                     format_number(asymptote)});
      }
    }
  }
  csv.write(cfg.out, cfg, summary);
  return 0;
}

int preset_crit_vs_latent(ExperimentConfig cfg) {
  ModelParams base;
  base.p = 0.5;
  base.pi_r = 0.8;
  base.pi_t = 0.8;
  base.infectious = DistributionSpec::exponential(1.0);
  cfg.params = base;

  const std::vector<std::pair<std::string, double>> kinds = {
      {"exponential", 0}, {"gamma2", 2}, {"gamma5", 5}, {"constant", 0}};
  CsvWriter csv({"latent_kind", "latent_mean", "delay_mean", "p", "lambda_crit"});
  for (double delay_mean : {0.5, 2.0}) {
    for (double naming : {0.5, 1.0}) {
      for (const auto& [kind, shape] : kinds) {
        for (int i = 0; i <= 8; ++i) {
          const double mean = 0.25 * i;
          ModelParams p = base;
          p.p = naming;
          p.delay = DistributionSpec::exponential(1.0 / delay_mean);
          if (mean == 0.0) {
            p.latent = DistributionSpec::zero();
          } else if (kind == "exponential") {
            p.latent = DistributionSpec::exponential(1.0 / mean);
          } else if (kind == "constant") {
            p.latent = DistributionSpec::constant(mean);
          } else {
            p.latent = DistributionSpec::gamma(mean, shape);
          }
          csv.add_row({kind, format_number(mean), format_number(delay_mean),
                       format_number(naming),
                       format_number(lambda_crit(p, CritCase::ExpRU))});
        }
      }
    }
  }
  csv.write(cfg.out, cfg);
  return 0;
}

int preset_crit_vs_delay(ExperimentConfig cfg) {
  ModelParams base;
  base.p = 0.5;
  base.pi_r = 1.0;
  base.pi_t = 0.0;
  base.infectious = DistributionSpec::constant(1.0);
  cfg.params = base;

  const std::vector<std::pair<std::string, double>> kinds = {
      {"exponential", 0}, {"gamma2", 2}, {"gamma5", 5}, {"constant", 0}};
  CsvWriter csv({"delay_kind", "delay_mean", "latent_mean", "p", "lambda_crit"});
  for (double latent_mean : {0.5, 2.0}) {
    for (double naming : {0.5, 1.0}) {
      for (const auto& [kind, shape] : kinds) {
        for (int i = 0; i <= 12; ++i) {
          const double mean = 0.25 * i;
          ModelParams p = base;
          p.p = naming;
          p.latent = DistributionSpec::exponential(1.0 / latent_mean);
          if (mean == 0.0) {
            p.delay = DistributionSpec::zero();
          } else if (kind == "exponential") {
            p.delay = DistributionSpec::exponential(1.0 / mean);
          } else if (kind == "constant") {
            p.delay = DistributionSpec::constant(mean);
          } else {
            p.delay = DistributionSpec::gamma(mean, shape);
          }
          csv.add_row({kind, format_number(mean), format_number(latent_mean),
                       format_number(naming),
                       format_number(lambda_crit(p, CritCase::ConstRU))});
        }
      }
    }
  }
  csv.write(cfg.out, cfg);
  return 0;
}

int preset_crit_vs_naming(ExperimentConfig cfg) {
  ModelParams base;
  base.pi_r = 0.8;
  base.pi_t = 0.8;
  base.infectious = DistributionSpec::exponential(1.0);
  cfg.params = base;

  CsvWriter csv({"disease", "latent_mean", "delay_mean", "p", "lambda_crit"});
  for (const auto& [disease, latent_mean] :
       std::vector<std::pair<std::string, double>>{{"influenza", 0.10}, {"smallpox", 0.58}}) {
    for (double delay_mean : {0.25, 0.5, 1.0, 2.0}) {
      for (int i = 1; i <= 20; ++i) {
        const double naming = 0.05 * i;
        ModelParams p = base;
        p.latent = DistributionSpec::exponential(1.0 / latent_mean);
        p.delay = DistributionSpec::exponential(1.0 / delay_mean);
        p.p = naming;
        csv.add_row({disease, format_number(latent_mean), format_number(delay_mean),
                     format_number(naming), format_number(lambda_crit(p, CritCase::ExpRU))});
      }
    }
  }
  csv.write(cfg.out, cfg);
  return 0;
}

int preset_delay_coupling_table(ExperimentConfig cfg) {
  struct Column {
    std::string label;
    double lambda;
    DistributionSpec latent;
  };
  const std::vector<Column> columns = {
      {"lambda1.5_latent_exp1", 1.5, DistributionSpec::exponential(1.0)},
      {"lambda1.5_latent_zero", 1.5, DistributionSpec::zero()},
      {"lambda2.5_latent_zero", 2.5, DistributionSpec::zero()},
  };
  BdpOptions opt;
  opt.inf_threshold = cfg.inf_threshold;

  CsvWriter csv({"delay_mean", "column", "coupling", "p_ext", "se"});
  std::size_t cell = 0;
  for (int row = 0; row <= 10; ++row) {
    const double delay_mean = 0.5 * row;
    for (const auto& col : columns) {
      for (const auto coupling : {DelayCoupling::Independent, DelayCoupling::Mutual}) {
        ModelParams p;
        p.lambda = col.lambda;
        p.p = 1.0;
        p.pi_r = 0.8;
        p.pi_t = 0.8;
        p.infectious = DistributionSpec::exponential(1.0);
        p.latent = col.latent;
        p.delay = delay_mean > 0.0 ? DistributionSpec::exponential(1.0 / delay_mean)
                                   : DistributionSpec::zero();
        p.coupling = coupling;
        cfg.params = p;
        const auto est = estimate_extinction(p, cfg.n, opt, splitmix64(cfg.seed) + cell++);
        csv.add_row({format_number(delay_mean), col.label,
                     coupling == DelayCoupling::Independent ? "independent" : "mutual",
                     format_number(est.p_ext), format_number(est.se)});
      }
    }
  }
  csv.write(cfg.out, cfg);
  return 0;
}

}  // namespace

int run_reproduce(ExperimentConfig cfg) {
  if (!cfg.preset) throw InvalidConfig("reproduce needs --preset");
  const std::string& preset = *cfg.preset;
  if (preset == "fig3") return preset_blowup_trace(std::move(cfg));
  if (preset == "fig4") return preset_final_size(std::move(cfg), DistributionSpec::exponential(1.0));
  if (preset == "fig5") return preset_final_size(std::move(cfg), DistributionSpec::constant(1.0));
  if (preset == "fig6") return preset_extinction_vs_population(std::move(cfg));
  if (preset == "fig7a") return preset_crit_vs_latent(std::move(cfg));
  if (preset == "fig7b") return preset_crit_vs_delay(std::move(cfg));
  if (preset == "fig8") return preset_crit_vs_naming(std::move(cfg));
  if (preset == "table2") return preset_delay_coupling_table(std::move(cfg));
  throw InvalidConfig("unknown preset: " + preset);
}

}  // namespace tracethresh::cli
