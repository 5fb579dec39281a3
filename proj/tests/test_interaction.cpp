#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "testutil.hpp"
#include "treeglm/interaction.hpp"
#include "treeglm/metrics.hpp"
#include "treeglm/rng.hpp"

using namespace treeglm;

namespace {

/// Independent column-count oracle: sum of binomial coefficients via Pascal.
std::size_t expected_columns(int b, int d) {
  std::vector<std::vector<std::size_t>> pascal(b + 1);
  for (int row = 0; row <= b; ++row) {
    pascal[row].resize(row + 1, 1);
    for (int k = 1; k < row; ++k) {
      pascal[row][k] = pascal[row - 1][k - 1] + pascal[row - 1][k];
    }
  }
  std::size_t total = 0;
  for (int k = 0; k <= d; ++k) total += pascal[b][k];
  return total;
}

Dataset prime_grid() {
  constexpr double primes[16] = {2,  3,  5,  7,  11, 13, 17, 19,
                                 23, 29, 31, 37, 41, 43, 47, 53};
  std::vector<double> features, response;
  for (int cell = 0; cell < 16; ++cell) {
    for (int j = 0; j < 4; ++j) features.push_back((cell >> (3 - j)) & 1);
    response.push_back(primes[cell]);
  }
  return testutil::make_dataset(4, std::move(features), std::move(response));
}

}  // namespace

TEST_SUITE_BEGIN("interaction");

TEST_CASE("design layout") {
  const auto design = make_interaction_design(3, 2);
  CHECK(design.n_columns() == 7);  // 1 + 3 + 3
  CHECK(design.column_label(0) == "1");
  CHECK(design.column_label(1) == "x1");
  CHECK(design.column_label(4) == "x1*x2");
  CHECK(design.column_label(6) == "x2*x3");

  CHECK(make_interaction_design(4, 4).n_columns() == 16);  // 2^4

  for (int b = 1; b <= 8; ++b) {
    for (int d = 1; d <= b; ++d) {
      CHECK(make_interaction_design(b, d).n_columns() == expected_columns(b, d));
    }
  }
  CHECK_THROWS_AS(make_interaction_design(3, 4), std::invalid_argument);
}

TEST_CASE("expansion values are subset products") {
  const auto ds = testutil::make_dataset(3, {1, 1, 1, 1, 0, 1}, {0, 0});
  const auto expanded = expand_interactions(ds, 3);
  // Row of all ones: every column is 1.
  for (int c = 0; c < 8; ++c) CHECK(expanded[c] == 1.0);
  // Row (1,0,1): columns 1, x1, x2, x3, x1x2, x1x3, x2x3, x1x2x3.
  const std::vector<double> expected{1, 1, 0, 1, 0, 1, 0, 0};
  for (int c = 0; c < 8; ++c) CHECK(expanded[8 + c] == expected[c]);
}

TEST_CASE("saturated fits interpolate cell statistics") {
  // Two rows per cell on a 2^2 grid.
  const auto ds = testutil::make_dataset(
      2, {0, 0, 0, 0, 0, 1, 0, 1, 1, 0, 1, 0, 1, 1, 1, 1},
      {1, 3, 4, 8, 2, 4, 10, 14});

  const auto gaussian = fit_interaction_glm(ds, 2, Family::gaussian_identity);
  const auto gaussian_preds = interaction_predict(ds, gaussian);
  const auto poisson = fit_interaction_glm(ds, 2, Family::poisson_log);
  const auto poisson_preds = interaction_predict(ds, poisson);
  const double cell_means[4] = {2.0, 6.0, 3.0, 12.0};
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    const int cell = static_cast<int>(2 * ds.x(i, 0) + ds.x(i, 1));
    CHECK(gaussian_preds[i] == doctest::Approx(cell_means[cell]).epsilon(1e-8));
    CHECK(poisson_preds[i] == doctest::Approx(cell_means[cell]).epsilon(1e-8));
  }
}

TEST_CASE("saturated gaussian fit reproduces the sixteen primes") {
  const Dataset grid = prime_grid();
  const auto model = fit_interaction_glm(grid, 4, Family::gaussian_identity);
  const auto preds = interaction_predict(grid, model);
  for (std::size_t i = 0; i < grid.n_rows; ++i) {
    CHECK(preds[i] == doctest::Approx(grid.response[i]).epsilon(1e-8));
  }
}

TEST_CASE("depth three beats depth one on composite data") {
  ScenarioSpec spec;
  spec.scenario = Scenario::composite;
  spec.n = 4000;
  spec.seed = 12;
  const Dataset train = generate(spec);
  spec.seed = 13;
  const Dataset test = generate(spec);

  const auto d1 = fit_interaction_glm(train, 1, Family::poisson_log);
  const auto d3 = fit_interaction_glm(train, 3, Family::poisson_log);
  const double mae_d1 = mae(interaction_predict(test, d1), test.response);
  const double mae_d3 = mae(interaction_predict(test, d3), test.response);
  CHECK(mae_d3 < mae_d1);
}

TEST_CASE("order-one poisson fit matches the gradient-ascent GLM") {
  ScenarioSpec spec;
  spec.scenario = Scenario::composite;
  spec.n = 1500;
  spec.seed = 14;
  const Dataset ds = generate(spec);

  const auto irls = fit_interaction_glm(ds, 1, Family::poisson_log);
  FitConfig config;
  config.learning_rate = 0.1;
  config.max_epochs = 60000;
  config.tolerance = 0.0;
  const auto ascent = fit_glm(ds, config);

  const auto irls_preds = interaction_predict(ds, irls);
  const auto ascent_preds = glm_predict(ds, ascent);
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    CHECK(std::fabs(irls_preds[i] - ascent_preds[i]) <=
          1e-6 * std::max(1.0, std::fabs(irls_preds[i])));
  }
}

TEST_CASE("in-sample likelihood nests across orders") {
  ScenarioSpec spec;
  spec.scenario = Scenario::composite;
  spec.n = 1200;
  spec.seed = 15;
  const Dataset ds = generate(spec);
  double prev = -std::numeric_limits<double>::infinity();
  for (int d = 1; d <= 4; ++d) {
    const auto model = fit_interaction_glm(ds, d, Family::poisson_log);
    const auto preds = interaction_predict(ds, model);
    double loglik = 0.0;
    for (std::size_t i = 0; i < ds.n_rows; ++i) {
      loglik += poisson_row_objective(ds.response[i], preds[i]);
    }
    loglik /= static_cast<double>(ds.n_rows);
    CHECK(loglik >= prev - 1e-9);
    prev = loglik;
  }
}

TEST_CASE("rank-deficient designs take the minimum-norm solution") {
  // Only two distinct rows observed on a 2^2 grid: the pair column is
  // collinear with x1 (both zero), so d=2 is rank deficient.
  const auto ds = testutil::make_dataset(2, {0, 0, 0, 1, 0, 0, 0, 1}, {1, 5, 1, 5});
  const auto model = fit_interaction_glm(ds, 2, Family::gaussian_identity);
  CHECK(model.rank_deficient);
  const auto preds = interaction_predict(ds, model);
  CHECK(preds[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(preds[1] == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("hypercube equivalence holds through depth three") {
  for (int d : {1, 2, 3}) {
    for (Family family : {Family::gaussian_identity, Family::poisson_log}) {
      CHECK(hypercube_equivalence_check(d, family) <= 1e-4);
    }
  }
  // The low-order fits are genuinely non-saturated: they miss the primes.
  const Dataset grid = prime_grid();
  const auto d1 = fit_interaction_glm(grid, 1, Family::gaussian_identity);
  const auto preds = interaction_predict(grid, d1);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.n_rows; ++i) {
    worst = std::max(worst, std::fabs(preds[i] - grid.response[i]));
  }
  CHECK(worst > 1.0);
}

TEST_CASE("coefficient csv labels subsets") {
  ScenarioSpec spec;
  spec.scenario = Scenario::composite;
  spec.n = 200;
  spec.seed = 16;
  const Dataset ds = generate(spec);
  const auto model = fit_interaction_glm(ds, 2, Family::poisson_log);
  std::ostringstream out;
  write_interaction_csv(model, out);
  const std::string text = out.str();
  CHECK(text.find("subset,coefficient") == 0);
  CHECK(text.find("\n1,") != std::string::npos);
  CHECK(text.find("\nx1,") != std::string::npos);
  CHECK(text.find("\nx1*x2,") != std::string::npos);
  CHECK(text.find("x1*x2*x3") == std::string::npos);  // d=2 stops at pairs
}

TEST_SUITE_END();
