#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "tvcs/solvers.hpp"

namespace tvcs {

enum class ExperimentKind { regression, classification, crowd, grn };

std::string to_string(ExperimentKind kind);
/// Throws std::invalid_argument for unknown names.
ExperimentKind parse_experiment_kind(const std::string& name);

/// Methods by kind:
///   regression, classification: tvcs, rows, cols, overall
///   crowd: optimized, random
///   grn: tvcs, rows, cols, overall, unconstrained
/// Every structured method's result is projected onto the full structure before
/// it is scored. The grn "unconstrained" baseline is scored as is.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::regression;
  std::size_t trials = 30;
  std::uint64_t seed = 0;
  /// Worker threads for trials; 0 uses the available cores.
  std::size_t threads = 0;
  /// Empty selects every method of the kind.
  std::vector<std::string> methods;
  /// Variant, iteration caps and projection settings; the step size comes from `step_size`.
  SolverConfig solver;
  /// 0 selects the objective's default: 1/L for the smooth losses, `tasks` for crowd.
  double step_size = 0.0;

  // regression and classification
  std::size_t side = 10;
  std::vector<std::size_t> sample_sizes = {20, 40, 60, 80, 100};
  double noise_sd = 0.01;
  std::size_t test_samples = 1000;

  // crowd
  std::size_t workers = 20;
  std::size_t tasks = 50;
  /// Average number of workers per task; one sweep point each.
  std::vector<double> budget_ratios = {1.0, 2.0, 3.0};
  /// Per-task cap is ceil(ratio) + task_slack; per-worker cap is
  /// ceil(worker_slack * ratio * tasks / workers).
  std::size_t task_slack = 2;
  double worker_slack = 1.5;
  std::size_t crowd_samples = 64;
  double temperature = 1.0;
  std::size_t heldout_draws = 20000;

  // grn
  std::size_t genes = 30;
  std::size_t time_points = 50;
  std::size_t degree = 3;
  std::size_t trajectories = 10;
  double noise_fraction = 0.1;
  double growth_bound = 1.05;

  ExperimentConfig();
  /// Defaults tuned per kind (solver variant, iteration caps).
  static ExperimentConfig defaults(ExperimentKind kind);

  std::vector<std::string> resolved_methods() const;
  /// Sweep values: sample sizes, budget ratios, or the single noise fraction.
  std::vector<double> sweep_values() const;
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

ExperimentConfig experiment_config_from_json(const std::string& text, ExperimentKind kind);
std::string experiment_config_to_json(const ExperimentConfig& config, int indent = 2);

struct TrialRecord {
  std::size_t sweep_index = 0;
  double sweep_value = 0.0;
  std::size_t trial = 0;
  std::string method;
  std::uint64_t seed = 0;
  /// Empty on success.
  std::string error;
  std::map<std::string, double> metrics;
};

struct AggregateRow {
  double sweep_value = 0.0;
  std::string method;
  std::string metric;
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;
};

struct ExperimentResult {
  std::vector<TrialRecord> trials;
  std::vector<AggregateRow> aggregate;
  double seconds = 0.0;

  /// Mean of `metric` for `method` at each sweep point, in sweep order.
  std::vector<double> means(const std::string& method, const std::string& metric) const;
  std::vector<double> standard_errors(const std::string& method, const std::string& metric) const;
};

/// Runs every (sweep point, trial) job; a failing method is recorded in its
/// TrialRecord and the run continues. Trial seeds derive from (seed, trial),
/// so sweep points share the generated model of a trial.
ExperimentResult run_experiment(const ExperimentConfig& config);

std::string trials_to_csv(const ExperimentResult& result, const ExperimentConfig& config);
std::string aggregate_to_csv(const ExperimentResult& result);

struct ExperimentFiles {
  std::filesystem::path trials;
  std::filesystem::path aggregate;
  std::filesystem::path manifest;
};

/// Writes trials.csv, aggregate.csv and finally manifest.json into `dir`.
ExperimentFiles write_experiment_outputs(const ExperimentResult& result,
                                         const ExperimentConfig& config,
                                         const std::filesystem::path& dir,
                                         const std::string& started_at,
                                         const std::string& finished_at);

}  // namespace tvcs
