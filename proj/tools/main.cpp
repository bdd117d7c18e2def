#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "experiment.hpp"
#include "tracethresh/errors.hpp"
#include "tracethresh/version.hpp"

namespace {

using tracethresh::DelayCoupling;
using tracethresh::DistributionSpec;
using tracethresh::InvalidConfig;
using tracethresh::ModelParams;
using tracethresh::cli::ExperimentConfig;

struct CommonFlags {
  std::string config_file;
  std::string out;
  std::uint64_t seed = 1;
  std::size_t n = 100000;
  int inf_threshold = 100;
  std::optional<int> cutoff;
  std::string coupling;
  std::string crit_case;
  std::string preset;
  // parameter overrides
  std::optional<double> lambda, p, pi_r, pi_t;
  std::optional<long> population;
  std::optional<int> initial;
  std::string infectious_json, latent_json, delay_json;
  // sweep
  std::string sweep_param, sweep_quantity;
  double sweep_from = 0.0, sweep_to = 0.0, sweep_step = 0.0;
};

void add_common_options(CLI::App* cmd, CommonFlags& f, bool needs_out = true) {
  cmd->add_option("--config", f.config_file, "JSON file with the model parameters");
  auto* out = cmd->add_option("--out", f.out, "output CSV path (sidecar: <out>.meta.json)");
  if (needs_out) out->required();
  cmd->add_option("--seed", f.seed, "master RNG seed");
  cmd->add_option("--n", f.n, "replicate count for simulation commands");
  cmd->add_option("--inf-threshold", f.inf_threshold,
                  "offspring count treated as infinite in cluster simulations");
  cmd->add_option("--cutoff", [&f](const std::vector<std::string>& vals) {
        f.cutoff = std::stoi(vals.at(0));
        return true;
      },
      "override the minor/major final-size cutoff");
  cmd->add_option("--coupling", f.coupling, "independent|mutual")
      ->check(CLI::IsMember({"independent", "mutual", ""}));
  cmd->add_option("--lambda", [&f](const std::vector<std::string>& v) {
        f.lambda = std::stod(v.at(0));
        return true;
      }, "contact rate override");
  cmd->add_option("--p", [&f](const std::vector<std::string>& v) {
        f.p = std::stod(v.at(0));
        return true;
      }, "naming probability override");
  cmd->add_option("--pi-r", [&f](const std::vector<std::string>& v) {
        f.pi_r = std::stod(v.at(0));
        return true;
      }, "untraced interview probability override");
  cmd->add_option("--pi-t", [&f](const std::vector<std::string>& v) {
        f.pi_t = std::stod(v.at(0));
        return true;
      }, "traced interview probability override");
  cmd->add_option("--N", [&f](const std::vector<std::string>& v) {
        f.population = std::stol(v.at(0));
        return true;
      }, "initial susceptible count override");
  cmd->add_option("--m", [&f](const std::vector<std::string>& v) {
        f.initial = std::stoi(v.at(0));
        return true;
      }, "initial infective count override");
  cmd->add_option("--infectious", f.infectious_json, "infectious-period law (JSON literal)");
  cmd->add_option("--latent", f.latent_json, "latent-period law (JSON literal)");
  cmd->add_option("--delay", f.delay_json, "tracing-delay law (JSON literal)");
}

ModelParams default_params() {
  ModelParams p;
  p.lambda = 2.0;
  p.p = 0.5;
  p.pi_r = 0.8;
  p.pi_t = 0.8;
  p.infectious = DistributionSpec::exponential(1.0);
  p.latent = DistributionSpec::exponential(1.0);
  p.delay = DistributionSpec::exponential(1.0);
  return p;
}

ExperimentConfig resolve(const std::string& command, const CommonFlags& f) {
  ExperimentConfig cfg;
  cfg.command = command;
  cfg.params = default_params();
  if (!f.config_file.empty()) {
    std::ifstream in(f.config_file);
    if (!in) throw InvalidConfig("cannot read config file: " + f.config_file);
    nlohmann::json j;
    in >> j;
    cfg.params = ModelParams::from_json(j);
  }
  if (f.lambda) cfg.params.lambda = *f.lambda;
  if (f.p) cfg.params.p = *f.p;
  if (f.pi_r) cfg.params.pi_r = *f.pi_r;
  if (f.pi_t) cfg.params.pi_t = *f.pi_t;
  if (f.population) cfg.params.population = *f.population;
  if (f.initial) cfg.params.initial_infectives = *f.initial;
  if (!f.infectious_json.empty()) {
    cfg.params.infectious = DistributionSpec::from_json(nlohmann::json::parse(f.infectious_json));
  }
  if (!f.latent_json.empty()) {
    cfg.params.latent = DistributionSpec::from_json(nlohmann::json::parse(f.latent_json));
  }
  if (!f.delay_json.empty()) {
    cfg.params.delay = DistributionSpec::from_json(nlohmann::json::parse(f.delay_json));
  }
  if (!f.coupling.empty()) {
    cfg.params.coupling =
        f.coupling == "mutual" ? DelayCoupling::Mutual : DelayCoupling::Independent;
  }
  cfg.params.validate();

  // Work in units where the infectious period has unit mean; the sidecar
  // records the rescaling factor.
  const double scale = cfg.params.infectious.mean();
  if (scale > 0.0 && std::abs(scale - 1.0) > 1e-12) {
    cfg.params = cfg.params.time_scaled(1.0 / scale);
    cfg.time_scale = scale;
  }

  cfg.n = f.n;
  cfg.seed = f.seed;
  cfg.out = f.out;
  cfg.inf_threshold = f.inf_threshold;
  cfg.cutoff = f.cutoff;
  if (!f.crit_case.empty()) cfg.crit_case = f.crit_case;
  if (!f.preset.empty()) cfg.preset = f.preset;
  if (!f.sweep_param.empty()) {
    cfg.sweep_param = f.sweep_param;
    cfg.sweep_quantity = f.sweep_quantity;
    cfg.sweep_from = f.sweep_from;
    cfg.sweep_to = f.sweep_to;
    cfg.sweep_step = f.sweep_step;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"threshold parameters and extinction probabilities for an epidemic "
               "with contact tracing delays"};
  app.set_version_flag("--version", tracethresh::kVersion);
  app.require_subcommand(1);

  CommonFlags f;
  std::string command;

  auto* analyze_const = app.add_subcommand(
      "analyze-const", "mean matrix, R0, R_U and extinction for a constant infectious period");
  add_common_options(analyze_const, f);

  auto* analyze_exp = app.add_subcommand(
      "analyze-exp", "series analytics for exponential infectious periods and delays");
  add_common_options(analyze_exp, f);

  auto* crit = app.add_subcommand("lambda-crit", "contact rate at which R_U (or R0) equals 1");
  add_common_options(crit, f);
  crit->add_option("--case", f.crit_case, "const-r0|const-ru|exp-ru")->required();

  auto* star = app.add_subcommand("lambda-star", "contact-rate threshold for finite R_U");
  add_common_options(star, f);

  auto* bdp = app.add_subcommand("sim-bdp", "sample the cluster offspring variable R");
  add_common_options(bdp, f);

  auto* epi = app.add_subcommand("sim-epidemic", "final sizes of the finite-population epidemic");
  add_common_options(epi, f);

  auto* sweep = app.add_subcommand("sweep", "evaluate an analytic quantity over a parameter grid");
  add_common_options(sweep, f);
  sweep->add_option("--param", f.sweep_param, "lambda|p|pi_r|pi_t|delay_mean|latent_mean")
      ->required();
  sweep->add_option("--quantity", f.sweep_quantity,
                    "const-r0|const-ru|const-pext|exp-ru|exp-ystar|lambda-crit-*")
      ->required();
  sweep->add_option("--from", f.sweep_from)->required();
  sweep->add_option("--to", f.sweep_to)->required();
  sweep->add_option("--step", f.sweep_step)->required();

  auto* repro = app.add_subcommand("reproduce", "rebuild one of the preconfigured figure/table datasets as CSV");
  add_common_options(repro, f);
  repro->add_option("--preset", f.preset, "fig3|fig4|fig5|fig6|fig7a|fig7b|fig8|table2")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    using namespace tracethresh::cli;
    if (app.got_subcommand(analyze_const)) return run_analyze_const(resolve("analyze-const", f));
    if (app.got_subcommand(analyze_exp)) return run_analyze_exp(resolve("analyze-exp", f));
    if (app.got_subcommand(crit)) return run_lambda_crit(resolve("lambda-crit", f));
    if (app.got_subcommand(star)) return run_lambda_star(resolve("lambda-star", f));
    if (app.got_subcommand(bdp)) return run_sim_bdp(resolve("sim-bdp", f));
    if (app.got_subcommand(epi)) return run_sim_epidemic(resolve("sim-epidemic", f));
    if (app.got_subcommand(sweep)) return run_sweep(resolve("sweep", f));
    if (app.got_subcommand(repro)) return run_reproduce(resolve("reproduce", f));
    std::cerr << "no subcommand selected\n";
    return 2;
  } catch (const InvalidConfig& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const tracethresh::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  }
}
