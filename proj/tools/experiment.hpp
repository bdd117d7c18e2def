#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tracethresh/model_params.hpp"

namespace tracethresh::cli {

// Everything a run needs, resolved from config file, preset and flags.
// Serialized next to each CSV so outputs are self-describing.
struct ExperimentConfig {
  std::string command;
  ModelParams params;
  std::optional<std::string> preset;
  std::size_t n = 100000;
  std::uint64_t seed = 1;
  std::string out;
  int inf_threshold = 100;
  std::optional<int> cutoff;
  std::optional<std::string> crit_case;
  std::optional<std::string> sweep_param;
  std::optional<std::string> sweep_quantity;
  double sweep_from = 0.0;
  double sweep_to = 0.0;
  double sweep_step = 0.0;
  double time_scale = 1.0;  // factor applied to reach a unit-mean infectious period

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

std::string format_number(double v);  // fixed CSV representation, "inf" for infinity

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}
  void add_row(std::vector<std::string> cells);
  std::vector<std::string>& header() { return header_; }
  // Writes the CSV and the JSON sidecar (<path>.meta.json).
  void write(const std::string& path, const ExperimentConfig& config,
             const nlohmann::json& summary = {}) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Command implementations; each writes CSV + sidecar and returns 0.
int run_analyze_const(ExperimentConfig cfg);
int run_analyze_exp(ExperimentConfig cfg);
int run_lambda_crit(ExperimentConfig cfg);
int run_lambda_star(ExperimentConfig cfg);
int run_sim_bdp(ExperimentConfig cfg);
int run_sim_epidemic(ExperimentConfig cfg);
int run_sweep(ExperimentConfig cfg);
int run_reproduce(ExperimentConfig cfg);

// Distribution with the same kind/shape but the given mean; Zero when the
// mean is zero.
DistributionSpec with_mean(const DistributionSpec& base, double mean);

}  // namespace tracethresh::cli
