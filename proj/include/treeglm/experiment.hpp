#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treeglm/gbm.hpp"
#include "treeglm/generators.hpp"
#include "treeglm/glm.hpp"
#include "treeglm/interaction.hpp"

namespace treeglm {

/// One cell of an experiment grid. Parsed from a comma-separated spec such
/// as  "gbm,d=3,n_trees=100,lr=0.1,objective=poisson_log",  "glm",
/// "multiresp,S=3", "mixture,f=0.25", "interaction_glm,d=2,family=poisson_log".
/// GLM-family cells also accept lr=, epochs=, tol= and init_scale= overrides
/// of the fit defaults.
struct ModelSpec {
  enum class Kind { gbm, glm, multiresp, mixture, interaction_glm };

  Kind kind = Kind::glm;

  // gbm / interaction_glm
  int depth = 3;
  int n_trees = 100;
  double gbm_learning_rate = 0.1;
  Objective objective = Objective::poisson_log;
  Family family = Family::poisson_log;

  // glm family
  int submodel_count = 1;   // multiresp
  double prevalence = 0.25; // mixture f
  std::optional<double> fit_learning_rate;
  std::optional<long> fit_epochs;
  std::optional<double> fit_tolerance;
  std::optional<double> fit_init_scale;

  std::string label() const;
  static ModelSpec parse(const std::string& text);
};

struct ExperimentConfig {
  Scenario scenario = Scenario::composite;
  std::map<std::string, double> overrides;  // forwarded to the generator
  std::size_t n_train = 10000;
  std::size_t n_test = 10000;
  std::uint64_t seed = 1;
  int replications = 5;
  std::vector<ModelSpec> grid;
  int workers = 0;  // 0 = hardware concurrency
};

struct ReportRow {
  std::string label;
  double mae = 0.0;   // mean over replications
  double rmse = 0.0;
  std::vector<double> rep_mae;
  std::vector<double> rep_rmse;
  double seconds = 0.0;       // wall clock summed over replications
  std::string error;          // non-empty when every replication failed
};

struct ExperimentReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  int replications = 0;
  std::vector<ReportRow> rows;

  bool has_errors() const;
};

/// Fits every grid cell on fresh train/test draws per replication
/// (replication r uses generator seeds seed+2r and seed+2r+1) and aggregates
/// metrics by mean. Cells run on a worker pool but land in fixed slots, so
/// the report is identical regardless of scheduling. Model fits that need a
/// seed use seed + 1009*cell_index + replication. Per-cell failures are
/// recorded and the run continues.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Depth x learning-rate sweep of the GBM on one train/test pair, with one
/// row per cell plus a per-depth "best" summary row.
ExperimentReport gbm_depth_lr_sweep(const Dataset& train, const Dataset& test,
                                    std::span<const int> depths,
                                    std::span<const double> learning_rates,
                                    int n_trees, Objective objective);

enum class ReportFormat { markdown, csv };

/// Stable column order (label, MAE, RMSE, per-replication values). The best
/// row per metric is flagged in markdown. Wall-clock columns are only
/// emitted on request so that identical configs render identical text.
std::string render_report(const ExperimentReport& report, ReportFormat format,
                          bool include_timing = false);

ExperimentReport read_report_csv(std::istream& in);
ExperimentReport read_report_csv(const std::string& path);

/// Flat key=value experiment config with repeated `model=` lines; see
/// ExperimentConfig for defaults. Scenario overrides use `scenario.<key>=`.
ExperimentConfig read_experiment_config(std::istream& in);
ExperimentConfig read_experiment_config(const std::string& path);

}  // namespace treeglm
