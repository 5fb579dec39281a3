#include <doctest.h>

#include <cmath>
#include <sstream>

#include "testutil.hpp"
#include "treeglm/experiment.hpp"
#include "treeglm/metrics.hpp"
#include "treeglm/rng.hpp"

using namespace treeglm;

TEST_SUITE_BEGIN("experiment");

TEST_CASE("metric values") {
  const std::vector<double> same{1.0, 2.0, 3.0};
  CHECK(mae(same, same) == 0.0);
  CHECK(rmse(same, same) == 0.0);

  const std::vector<double> zeros{0.0, 0.0};
  CHECK(mae(zeros, std::vector<double>{1.0, -1.0}) == doctest::Approx(1.0));
  CHECK(mae(std::vector<double>{1.0, 2.0, 3.0}, std::vector<double>{2.0, 4.0, 6.0}) ==
        doctest::Approx(2.0));  // (1+2+3)/3
  CHECK(rmse(zeros, std::vector<double>{3.0, -4.0}) ==
        doctest::Approx(std::sqrt(12.5)));

  CHECK_THROWS_AS(mae(std::vector<double>{}, std::vector<double>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(rmse(zeros, same), std::invalid_argument);
}

TEST_CASE("rmse dominates mae") {
  Rng rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(20), b(20);
    for (int i = 0; i < 20; ++i) {
      a[i] = 10.0 * rng.uniform();
      b[i] = 10.0 * rng.uniform();
    }
    CHECK(rmse(a, b) >= mae(a, b));
  }
}

TEST_CASE("model spec parsing and labels") {
  const auto gbm = ModelSpec::parse("gbm,d=3,n_trees=200,lr=0.05,objective=poisson_log");
  CHECK(gbm.kind == ModelSpec::Kind::gbm);
  CHECK(gbm.depth == 3);
  CHECK(gbm.n_trees == 200);
  CHECK(gbm.gbm_learning_rate == 0.05);
  CHECK(gbm.label() == "gbm d=3 trees=200 lr=0.05 poisson_log");

  const auto composite = ModelSpec::parse("multiresp,S=3,lr=0.05,epochs=1000");
  CHECK(composite.submodel_count == 3);
  CHECK(composite.fit_learning_rate == 0.05);
  CHECK(composite.fit_epochs == 1000);
  CHECK(composite.label() == "multiresp S=3");

  CHECK(ModelSpec::parse("mixture,f=0.25").label() == "mixture S=2 f=0.25");
  CHECK(ModelSpec::parse("interaction_glm,d=2,family=gaussian_identity").label() ==
        "interaction_glm d=2 gaussian_identity");
  CHECK(ModelSpec::parse("glm").label() == "glm");

  CHECK_THROWS_AS(ModelSpec::parse("forest,d=3"), std::invalid_argument);
  CHECK_THROWS_AS(ModelSpec::parse("gbm,bogus=1"), std::invalid_argument);
}

TEST_CASE("a converged GLM prices gemstones exactly") {
  ExperimentConfig config;
  config.scenario = Scenario::gemstones;
  config.n_train = 400;
  config.n_test = 400;
  config.seed = 3;
  config.replications = 1;
  config.grid = {ModelSpec::parse("glm,lr=0.002,epochs=60000,tol=0")};
  const auto report = run_experiment(config);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].error.empty());
  CHECK(report.rows[0].mae < 1e-6);
}

TEST_CASE("reports are reproducible and metrics ordered") {
  ExperimentConfig config;
  config.scenario = Scenario::composite;
  config.n_train = 400;
  config.n_test = 400;
  config.seed = 5;
  config.replications = 3;
  config.workers = 2;
  config.grid = {ModelSpec::parse("gbm,d=1,n_trees=20,lr=0.3,objective=poisson_log"),
                 ModelSpec::parse("gbm,d=2,n_trees=20,lr=0.3,objective=poisson_log"),
                 ModelSpec::parse("glm,epochs=2000")};
  const auto report = run_experiment(config);
  const auto again = run_experiment(config);
  CHECK(render_report(report, ReportFormat::markdown) ==
        render_report(again, ReportFormat::markdown));
  CHECK(render_report(report, ReportFormat::csv) ==
        render_report(again, ReportFormat::csv));

  for (const auto& row : report.rows) {
    REQUIRE(row.error.empty());
    CHECK(row.mae <= row.rmse);
    CHECK(row.mae >= 0.0);
    CHECK(row.rep_mae.size() == 3);
  }
}

TEST_CASE("per-cell failures do not stop the run") {
  ExperimentConfig config;
  config.scenario = Scenario::insufficient_learning;  // Gaussian response
  config.n_train = 200;
  config.n_test = 200;
  config.seed = 6;
  config.replications = 1;
  config.grid = {
      ModelSpec::parse("gbm,d=1,n_trees=10,objective=poisson_log"),  // invalid
      ModelSpec::parse("gbm,d=1,n_trees=10,objective=squared_error_identity")};
  const auto report = run_experiment(config);
  REQUIRE(report.rows.size() == 2);
  CHECK_FALSE(report.rows[0].error.empty());
  CHECK(report.rows[1].error.empty());
  CHECK(report.has_errors());
}

TEST_CASE("markdown render flags the best rows") {
  ExperimentReport report;
  report.scenario = "composite";
  report.seed = 1;
  report.n_train = 10;
  report.n_test = 10;
  report.replications = 1;
  ReportRow a;
  a.label = "model a";
  a.mae = 2.0;
  a.rmse = 3.0;
  a.rep_mae = {2.0};
  a.rep_rmse = {3.0};
  ReportRow b = a;
  b.label = "model b";
  b.mae = 1.0;
  b.rmse = 4.0;
  b.rep_mae = {1.0};
  b.rep_rmse = {4.0};
  report.rows = {a, b};

  const std::string text = render_report(report, ReportFormat::markdown);
  CHECK(text.find("| model a | 2.0000 | **3.0000** |") != std::string::npos);
  CHECK(text.find("| model b | **1.0000** | 4.0000 |") != std::string::npos);
}

TEST_CASE("single-row report renders one data line") {
  ExperimentReport report;
  report.scenario = "gemstones";
  report.replications = 1;
  ReportRow row;
  row.label = "glm";
  row.mae = 0.5;
  row.rmse = 0.5;
  row.rep_mae = {0.5};
  row.rep_rmse = {0.5};
  report.rows = {row};
  const std::string text = render_report(report, ReportFormat::markdown);
  int data_lines = 0;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("| glm", 0) == 0) ++data_lines;
  }
  CHECK(data_lines == 1);
}

TEST_CASE("depth-lr sweep carries per-depth best rows") {
  ScenarioSpec spec;
  spec.scenario = Scenario::insufficient_learning;
  spec.n = 300;
  spec.seed = 8;
  const Dataset train = generate(spec);
  spec.seed = 9;
  const Dataset test = generate(spec);

  const std::vector<int> depths{1, 2};
  const std::vector<double> lrs{0.1, 0.5};
  const auto report = gbm_depth_lr_sweep(train, test, depths, lrs, 10,
                                         Objective::squared_error_identity);
  REQUIRE(report.rows.size() == 6);  // 2 cells per depth + best row per depth
  CHECK(report.rows[2].label == "best d=1");
  CHECK(report.rows[5].label == "best d=2");
  CHECK(report.rows[2].mae ==
        doctest::Approx(std::min(report.rows[0].mae, report.rows[1].mae)));

  const std::string text = render_report(report, ReportFormat::markdown);
  CHECK(text.find("best d=1") != std::string::npos);
}

TEST_CASE("report csv round trips losslessly") {
  ExperimentConfig config;
  config.scenario = Scenario::composite;
  config.n_train = 150;
  config.n_test = 150;
  config.seed = 10;
  config.replications = 2;
  config.grid = {ModelSpec::parse("gbm,d=1,n_trees=15,lr=0.3,objective=poisson_log"),
                 ModelSpec::parse("glm,epochs=500")};
  const auto report = run_experiment(config);
  const std::string csv = render_report(report, ReportFormat::csv);
  std::istringstream in(csv);
  const auto parsed = read_report_csv(in);
  CHECK(render_report(parsed, ReportFormat::csv) == csv);
  CHECK(parsed.scenario == report.scenario);
  CHECK(parsed.rows.size() == report.rows.size());
  CHECK(parsed.rows[0].rep_mae == report.rows[0].rep_mae);
}

TEST_CASE("config files parse into experiment configs") {
  std::istringstream in(
      "# comment\n"
      "scenario=mixture\n"
      "scenario.p_a=0.3\n"
      "n_train=500\n"
      "n_test=600\n"
      "seed=42\n"
      "replications=2\n"
      "workers=3\n"
      "model=gbm,d=3,n_trees=50,lr=0.1,objective=poisson_log\n"
      "model=mixture,f=0.25\n");
  const auto config = read_experiment_config(in);
  CHECK(config.scenario == Scenario::mixture);
  CHECK(config.overrides.at("p_a") == 0.3);
  CHECK(config.n_train == 500);
  CHECK(config.n_test == 600);
  CHECK(config.seed == 42);
  CHECK(config.replications == 2);
  CHECK(config.workers == 3);
  REQUIRE(config.grid.size() == 2);
  CHECK(config.grid[1].kind == ModelSpec::Kind::mixture);

  std::istringstream bad("scenario=composite\n");
  CHECK_THROWS_AS(read_experiment_config(bad), std::invalid_argument);
}

TEST_SUITE_END();
