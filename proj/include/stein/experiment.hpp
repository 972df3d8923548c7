#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "stein/base_law.hpp"
#include "stein/bound_terms.hpp"

namespace stein {

struct ZGridSpec {
  double min = -6.0;
  double max = 6.0;
  double step = 0.05;
  std::vector<double> values() const;
};

// One experiment: a model family swept over sizes against its limit law.
// Everything that influences the numbers lives here; execution details
// (worker count, output paths) deliberately do not enter the report payload
// so reruns are byte-comparable.
struct ExperimentConfig {
  std::string application;  // quadform | curieweiss | indeptest
  std::string law;          // name or JSON file; "" = application default
  std::string matrix = "tridiagonal";  // quadform: builtin name or CSV path
  std::string matrix_format = "auto";  // auto | dense | triplet
  double beta = 1.0;                   // curieweiss
  int n_obs = 0;      // indeptest: fixed observation count (0: n = p = size)
  int inner = 200;    // indeptest: inner MC replicates
  std::vector<long long> sizes;
  long long mc = 0;
  int batches = 16;
  std::uint64_t seed = 1;
  ZGridSpec z_grid;
  double alpha = 0.05;
  std::string output_dir = "out";
  std::string preset;  // non-empty when built by preset_config
};

// thm4.1 | cw-beta0.5 | cw-beta1 | thm4.4
ExperimentConfig preset_config(const std::string& name);
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const ExperimentConfig& c);
// throws std::invalid_argument naming the offending field
void validate_config(const ExperimentConfig& c);

// "rademacher" | "uniform" | "normal" | path to JSON {points: [], probs: []}
BaseLaw law_from_spec(const std::string& spec);

struct CheckOutcome {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ExperimentResult {
  nlohmann::ordered_json report;  // deterministic for fixed config
  RateSummary summary;
  ConditionReport conditions;
  std::vector<CheckOutcome> checks;  // preset thresholds; empty otherwise
  bool checks_pass = true;
  double wall_seconds = 0.0;
  // quadform only: deterministic decay of the theoretical bound functional
  std::vector<double> rhs_values;
  RateFit rhs_fit;
};

// Thrown when a size fails mid-sweep; carries the completed part so callers
// can flush partial outputs.
struct ExperimentError : std::runtime_error {
  ExperimentError(const std::string& what, ExperimentResult partial_result)
      : std::runtime_error(what), partial(std::move(partial_result)) {}
  ExperimentResult partial;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers = 0);

// report.json, per-size profile CSVs, summary.csv, manifest.json;
// returns the written paths (manifest last)
std::vector<std::string> write_outputs(const ExperimentResult& res,
                                       const ExperimentConfig& cfg,
                                       int workers = 0);

}  // namespace stein
