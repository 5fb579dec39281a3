// Command-line front end: dataset generation, model fitting, experiment
// sweeps, the saturated-grid equivalence check, and the parameter-count
// tables.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "treeglm/bounds.hpp"
#include "treeglm/experiment.hpp"
#include "treeglm/mixture.hpp"
#include "treeglm/multiresp.hpp"

namespace {

using namespace treeglm;

std::map<std::string, double> parse_overrides(const std::vector<std::string>& kvs) {
  std::map<std::string, double> overrides;
  for (const auto& kv : kvs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--set expects key=value, got: " + kv);
    }
    overrides[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
  }
  return overrides;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open for writing: " + path);
  return out;
}

int run_generate(const std::string& scenario, std::size_t n, std::uint64_t seed,
                 const std::string& out_path, const std::vector<std::string>& sets) {
  ScenarioSpec spec;
  spec.scenario = scenario_from_name(scenario);
  spec.n = n;
  spec.seed = seed;
  spec.overrides = parse_overrides(sets);
  const Dataset ds = generate(spec);
  write_dataset_csv(ds, out_path);
  write_dataset_metadata(ds, out_path + ".meta");
  std::cout << "wrote " << ds.n_rows << " rows x " << ds.n_cols << " features to "
            << out_path << " (+ .meta)\n";
  return 0;
}

int run_fit(const std::string& spec_text, const std::string& data_path,
            const std::string& out_path, std::uint64_t seed) {
  const ModelSpec spec = ModelSpec::parse(spec_text);
  Dataset ds = read_dataset_csv(data_path);
  auto out = open_out(out_path);
  switch (spec.kind) {
    case ModelSpec::Kind::gbm: {
      GbmConfig config;
      config.max_depth = spec.depth;
      config.n_trees = spec.n_trees;
      config.learning_rate = spec.gbm_learning_rate;
      config.objective = spec.objective;
      write_gbm_dump(fit_gbm(ds, config), out);
      break;
    }
    case ModelSpec::Kind::glm: {
      FitConfig config;
      if (spec.fit_learning_rate) config.learning_rate = *spec.fit_learning_rate;
      if (spec.fit_epochs) config.max_epochs = *spec.fit_epochs;
      if (spec.fit_tolerance) config.tolerance = *spec.fit_tolerance;
      config.seed = seed;
      write_submodel_csv({fit_glm(ds, config)}, out);
      break;
    }
    case ModelSpec::Kind::multiresp: {
      FitConfig config;
      if (spec.fit_learning_rate) config.learning_rate = *spec.fit_learning_rate;
      if (spec.fit_epochs) config.max_epochs = *spec.fit_epochs;
      if (spec.fit_tolerance) config.tolerance = *spec.fit_tolerance;
      if (spec.fit_init_scale) config.init_scale = *spec.fit_init_scale;
      config.seed = seed;
      write_multiresp_csv(fit_multiresp(ds, spec.submodel_count, config), out);
      break;
    }
    case ModelSpec::Kind::mixture: {
      FitConfig config;
      if (spec.fit_learning_rate) config.learning_rate = *spec.fit_learning_rate;
      if (spec.fit_epochs) config.max_epochs = *spec.fit_epochs;
      if (spec.fit_tolerance) config.tolerance = *spec.fit_tolerance;
      if (spec.fit_init_scale) config.init_scale = *spec.fit_init_scale;
      config.seed = seed;
      write_mixture_csv(fit_mixture(ds, spec.prevalence, config), out);
      break;
    }
    case ModelSpec::Kind::interaction_glm: {
      write_interaction_csv(fit_interaction_glm(ds, spec.depth, spec.family), out);
      break;
    }
  }
  std::cout << "wrote " << spec.label() << " fit to " << out_path << '\n';
  return 0;
}

int run_sweep(const std::string& config_path, const std::string& out_path,
              const std::string& format) {
  const ExperimentConfig config = read_experiment_config(config_path);
  const ExperimentReport report = run_experiment(config);
  const ReportFormat fmt =
      format == "csv" ? ReportFormat::csv : ReportFormat::markdown;
  const std::string text = render_report(report, fmt);
  if (out_path.empty()) {
    std::cout << text;
  } else {
    open_out(out_path) << text;
  }
  if (report.has_errors()) {
    for (const auto& row : report.rows) {
      if (!row.error.empty()) {
        std::cerr << "cell failed: " << row.label << ": " << row.error << '\n';
      }
    }
    return 1;
  }
  return 0;
}

int run_verify(int depth, const std::string& family_text) {
  const Family family = family_from_name(family_text);
  const double diff = hypercube_equivalence_check(depth, family);
  const bool ok = diff <= 1e-4;
  std::cout << "d=" << depth << " family=" << family_name(family)
            << " max_relative_difference=" << diff << (ok ? " PASS" : " FAIL")
            << '\n';
  return ok ? 0 : 1;
}

int run_report(const std::string& in_path, const std::string& format) {
  const ExperimentReport report = read_report_csv(in_path);
  const ReportFormat fmt =
      format == "csv" ? ReportFormat::csv : ReportFormat::markdown;
  std::cout << render_report(report, fmt);
  return report.has_errors() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-vs-misspecification benchmark models and experiments"};
  app.require_subcommand(1);

  std::string scenario, out_path, data_path, model_spec, config_path, in_path;
  std::string format = "markdown";
  std::string family = "gaussian_identity";
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  int depth = 3;
  int b_max = 10;
  std::vector<std::string> sets;

  auto* generate_cmd =
      app.add_subcommand("generate", "Generate a synthetic scenario dataset");
  generate_cmd->add_option("scenario", scenario, "Scenario name")->required();
  generate_cmd->add_option("--n", n, "Rows to generate");
  generate_cmd->add_option("--seed", seed, "Generator seed");
  generate_cmd->add_option("--out", out_path, "Output CSV path")->required();
  generate_cmd->add_option("--set", sets, "Scenario override key=value");

  auto* fit_cmd = app.add_subcommand("fit", "Fit one model to a dataset CSV");
  fit_cmd->add_option("model-spec", model_spec,
                      "e.g. gbm,d=3,n_trees=100,lr=0.1,objective=poisson_log "
                      "| glm | multiresp,S=3 | mixture,f=0.25 "
                      "| interaction_glm,d=2,family=poisson_log")
      ->required();
  fit_cmd->add_option("--data", data_path, "Dataset CSV")->required();
  fit_cmd->add_option("--out", out_path, "Model output path")->required();
  fit_cmd->add_option("--seed", seed, "Fit seed (initialisation)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment config");
  sweep_cmd->add_option("--config", config_path, "key=value config file")->required();
  sweep_cmd->add_option("--out", out_path, "Write report here instead of stdout");
  sweep_cmd->add_option("--format", format, "markdown|csv");

  auto* verify_cmd = app.add_subcommand(
      "verify-equivalence",
      "Compare a converged GBM with the same-order interaction GLM on the "
      "saturated 2^4 grid");
  verify_cmd->add_option("--d", depth, "Tree depth / interaction order (1-3)");
  verify_cmd->add_option("--family", family, "gaussian_identity|poisson_log");

  auto* bounds_cmd =
      app.add_subcommand("bounds", "Print max-useful-submodel tables");
  bounds_cmd->add_option("--b-max", b_max, "Largest feature count B");

  auto* report_cmd = app.add_subcommand("report", "Re-render a report CSV");
  report_cmd->add_option("--in", in_path, "Report CSV path")->required();
  report_cmd->add_option("--format", format, "markdown|csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (generate_cmd->parsed()) return run_generate(scenario, n, seed, out_path, sets);
    if (fit_cmd->parsed()) return run_fit(model_spec, data_path, out_path, seed);
    if (sweep_cmd->parsed()) return run_sweep(config_path, out_path, format);
    if (verify_cmd->parsed()) return run_verify(depth, family);
    if (bounds_cmd->parsed()) {
      std::cout << treeglm::render_bounds_table(b_max);
      return 0;
    }
    if (report_cmd->parsed()) return run_report(in_path, format);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
