#include "experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "tracethresh/bdp_sim.hpp"
#include "tracethresh/constant_analysis.hpp"
#include "tracethresh/epidemic_sim.hpp"
#include "tracethresh/errors.hpp"
#include "tracethresh/exponential_analysis.hpp"
#include "tracethresh/version.hpp"

namespace tracethresh::cli {

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j{
      {"version", kVersion},
      {"command", command},
      {"params", params.to_json()},
      {"n", n},
      {"seed", seed},
      {"out", out},
      {"inf_threshold", inf_threshold},
      {"time_scale", time_scale},
  };
  if (preset) j["preset"] = *preset;
  if (cutoff) j["cutoff"] = *cutoff;
  if (crit_case) j["case"] = *crit_case;
  if (sweep_param) {
    j["sweep"] = {{"param", *sweep_param},
                  {"quantity", sweep_quantity.value_or("")},
                  {"from", sweep_from},
                  {"to", sweep_to},
                  {"step", sweep_step}};
  }
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.command = j.at("command").get<std::string>();
  cfg.params = ModelParams::from_json(j.at("params"));
  cfg.n = j.at("n").get<std::size_t>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.out = j.at("out").get<std::string>();
  cfg.inf_threshold = j.at("inf_threshold").get<int>();
  cfg.time_scale = j.at("time_scale").get<double>();
  if (j.contains("preset")) cfg.preset = j.at("preset").get<std::string>();
  if (j.contains("cutoff")) cfg.cutoff = j.at("cutoff").get<int>();
  if (j.contains("case")) cfg.crit_case = j.at("case").get<std::string>();
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    cfg.sweep_param = s.at("param").get<std::string>();
    cfg.sweep_quantity = s.at("quantity").get<std::string>();
    cfg.sweep_from = s.at("from").get<double>();
    cfg.sweep_to = s.at("to").get<double>();
    cfg.sweep_step = s.at("step").get<double>();
  }
  return cfg;
}

void CsvWriter::add_row(std::vector<std::string> cells) { rows_.push_back(std::move(cells)); }

void CsvWriter::write(const std::string& path, const ExperimentConfig& config,
                      const nlohmann::json& summary) const {
  std::ofstream csv(path);
  if (!csv) throw InvalidConfig("cannot open output path: " + path);
  auto emit = [&csv](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) csv << ',';
      csv << cells[i];
    }
    csv << '\n';
  };
  emit(header_);
  for (const auto& row : rows_) emit(row);
  csv.close();

  nlohmann::json meta = config.to_json();
  if (!summary.is_null() && !summary.empty()) meta["summary"] = summary;
  std::ofstream side(path + ".meta.json");
  if (!side) throw InvalidConfig("cannot open sidecar path: " + path + ".meta.json");
  side << meta.dump(2) << '\n';
}

DistributionSpec with_mean(const DistributionSpec& base, double mean) {
  if (mean <= 0.0) return DistributionSpec::zero();
  switch (base.kind()) {
    case DistKind::Zero:
    case DistKind::Constant: return DistributionSpec::constant(mean);
    case DistKind::Exponential: return DistributionSpec::exponential(1.0 / mean);
    case DistKind::Gamma: return DistributionSpec::gamma(mean, base.shape());
  }
  return DistributionSpec::zero();
}

int run_analyze_const(ExperimentConfig cfg) {
  const ModelParams& p = cfg.params;
  const auto fate = fate_probs(p);
  const auto m = mean_matrix(p);
  const double r_zero = r0(p);
  const double r_u = ru_const(p);
  const double star = lambda_star_const(p);
  const auto ext = extinction_const(p);

  CsvWriter csv({"lambda", "iota", "p", "pi_r", "p_n", "p_t", "m_uu", "m_un", "m_nu", "m_nn",
                 "r0", "r_u", "lambda_star", "q_u", "q_n", "p_ext"});
  csv.add_row({format_number(p.lambda), format_number(p.infectious.value()), format_number(p.p),
               format_number(p.pi_r), format_number(fate.p_n), format_number(fate.p_t),
               format_number(m.m_uu), format_number(m.m_un), format_number(m.m_nu),
               format_number(m.m_nn), format_number(r_zero), format_number(r_u),
               format_number(star), format_number(ext.q_u), format_number(ext.q_n),
               format_number(ext.p_ext)});
  csv.write(cfg.out, cfg);
  return 0;
}

int run_analyze_exp(ExperimentConfig cfg) {
  const ModelParams& p = cfg.params;
  const auto result = analyze_exp(p);
  // Tightest sufficiency bound over a small epsilon grid; infinite when
  // delays can never outlast latency.
  double bound = std::numeric_limits<double>::infinity();
  for (double eps : {0.25, 0.5, 1.0, 2.0}) {
    try {
      bound = std::min(bound, ru_infinite_sufficiency_bound(p, eps));
    } catch (const InvalidConfig&) {
      break;
    }
  }
  CsvWriter csv({"lambda", "gamma", "xi", "y_star", "denominator", "r_u", "lambda_star",
                 "finite", "ru_infinite_bound"});
  csv.add_row({format_number(p.lambda), format_number(p.infectious.rate()),
               format_number(p.delay.rate()), format_number(result.y_star),
               format_number(y_star_denominator(p)), format_number(result.r_u),
               format_number(result.lambda_star), result.finite ? "1" : "0",
               format_number(bound)});
  csv.write(cfg.out, cfg);
  return 0;
}

namespace {

CritCase parse_case(const std::string& name) {
  if (name == "const-r0") return CritCase::ConstR0;
  if (name == "const-ru") return CritCase::ConstRU;
  if (name == "exp-ru") return CritCase::ExpRU;
  throw InvalidConfig("--case must be const-r0, const-ru or exp-ru");
}

}  // namespace

int run_lambda_crit(ExperimentConfig cfg) {
  if (!cfg.crit_case) throw InvalidConfig("lambda-crit needs --case");
  const double crit = lambda_crit(cfg.params, parse_case(*cfg.crit_case));
  CsvWriter csv({"case", "lambda_crit"});
  csv.add_row({*cfg.crit_case, format_number(crit)});
  csv.write(cfg.out, cfg);
  return 0;
}

int run_lambda_star(ExperimentConfig cfg) {
  const ModelParams& p = cfg.params;
  double star;
  std::string method;
  if (p.infectious.kind() == DistKind::Constant) {
    star = lambda_star_const(p);
    method = "constant";
  } else {
    star = lambda_star_exp(p);
    method = "exponential";
  }
  CsvWriter csv({"infectious_case", "lambda_star"});
  csv.add_row({method, format_number(star)});
  csv.write(cfg.out, cfg);
  return 0;
}

int run_sim_bdp(ExperimentConfig cfg) {
  BdpOptions opt;
  opt.inf_threshold = cfg.inf_threshold;
  const RSampleSet samples = sample_r_many(cfg.params, cfg.n, opt, cfg.seed);
  const auto est = estimate_extinction(samples, cfg.params.initial_infectives, cfg.seed);

  CsvWriter csv({"replicate", "r_value", "is_inf"});
  for (std::size_t i = 0; i < samples.values.size(); ++i) {
    const auto v = samples.values[i];
    csv.add_row({std::to_string(i), std::to_string(v < 0 ? 0 : v), v < 0 ? "1" : "0"});
  }
  const nlohmann::json summary{
      {"mean", est.mean_r},      {"se", est.se_r},   {"p_inf_hat", est.p_inf},
      {"p_ext_hat", est.p_ext},  {"p_ext_se", est.se}, {"pgf_root", est.root},
  };
  csv.write(cfg.out, cfg, summary);
  return 0;
}

int run_sim_epidemic(ExperimentConfig cfg) {
  const auto hist = final_size_distribution(cfg.params, cfg.n, cfg.seed, cfg.cutoff);
  CsvWriter csv({"final_size", "count"});
  for (std::size_t k = 0; k < hist.counts.size(); ++k) {
    if (hist.counts[k] > 0) csv.add_row({std::to_string(k), std::to_string(hist.counts[k])});
  }
  const nlohmann::json summary{{"n", hist.n},
                               {"cutoff", hist.cutoff},
                               {"p_minor", hist.p_minor()},
                               {"se", hist.standard_error()}};
  csv.write(cfg.out, cfg, summary);
  return 0;
}

int run_sweep(ExperimentConfig cfg) {
  if (!cfg.sweep_param || !cfg.sweep_quantity) {
    throw InvalidConfig("sweep needs --param and --quantity");
  }
  if (!(cfg.sweep_step > 0.0) || !(cfg.sweep_to >= cfg.sweep_from)) {
    throw InvalidConfig("sweep needs from <= to and step > 0");
  }
  const std::string& axis = *cfg.sweep_param;
  const std::string& quantity = *cfg.sweep_quantity;

  auto apply = [&](double v) {
    ModelParams p = cfg.params;
    if (axis == "lambda") {
      p.lambda = v;
    } else if (axis == "p") {
      p.p = v;
    } else if (axis == "pi_r") {
      p.pi_r = v;
    } else if (axis == "pi_t") {
      p.pi_t = v;
    } else if (axis == "delay_mean") {
      p.delay = with_mean(p.delay, v);
    } else if (axis == "latent_mean") {
      p.latent = with_mean(p.latent, v);
    } else {
      throw InvalidConfig("unknown sweep parameter: " + axis);
    }
    p.validate();
    return p;
  };
  auto evaluate = [&](const ModelParams& p) -> double {
    if (quantity == "const-r0") return r0(p);
    if (quantity == "const-ru") return ru_const(p);
    if (quantity == "const-pext") return extinction_const(p).p_ext;
    if (quantity == "exp-ru") return r_u_exp(p);
    if (quantity == "exp-ystar") return y_star(p);
    if (quantity == "lambda-crit-const-r0") return lambda_crit(p, CritCase::ConstR0);
    if (quantity == "lambda-crit-const-ru") return lambda_crit(p, CritCase::ConstRU);
    if (quantity == "lambda-crit-exp-ru") return lambda_crit(p, CritCase::ExpRU);
    throw InvalidConfig("unknown sweep quantity: " + quantity);
  };

  CsvWriter csv({axis, quantity});
  const int steps = static_cast<int>(std::floor((cfg.sweep_to - cfg.sweep_from) / cfg.sweep_step +
                                                1e-9));
  for (int i = 0; i <= steps; ++i) {
    const double v = cfg.sweep_from + i * cfg.sweep_step;
    csv.add_row({format_number(v), format_number(evaluate(apply(v)))});
  }
  csv.write(cfg.out, cfg);
  return 0;
}

}  // namespace tracethresh::cli
