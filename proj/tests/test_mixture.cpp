#include <doctest.h>

#include <cmath>
#include <sstream>

#include "testutil.hpp"
#include "treeglm/metrics.hpp"
#include "treeglm/mixture.hpp"
#include "treeglm/rng.hpp"

using namespace treeglm;

namespace {

Dataset constant_rate_data(double lambda, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> features, response;
  for (std::size_t i = 0; i < n; ++i) {
    features.push_back(rng.bernoulli(0.5) ? 1.0 : 0.0);
    response.push_back(static_cast<double>(rng.poisson(lambda)));
  }
  return testutil::make_dataset(1, std::move(features), std::move(response));
}

}  // namespace

TEST_SUITE_BEGIN("mixture");

TEST_CASE("row objective closed forms") {
  const std::vector<double> prevalences{0.3, 0.7};

  // Identical components collapse to the plain Poisson objective.
  const std::vector<double> equal_rates{2.5, 2.5};
  CHECK(mixture_row_objective(3.0, equal_rates, prevalences) ==
        doctest::Approx(poisson_row_objective(3.0, 2.5)).epsilon(1e-12));

  // Degenerate prevalence approaches component A.
  const std::vector<double> rates{1.0, 4.0};
  const std::vector<double> degenerate{1.0 - 1e-15, 1e-15};
  CHECK(std::fabs(mixture_row_objective(2.0, rates, degenerate) -
                  poisson_row_objective(2.0, 1.0)) < 1e-9);

  // Direct (non-log-space) evaluation of the two-component density.
  const std::vector<double> quarter{0.25, 0.75};
  const double direct =
      std::log(0.25 * 1.0 * std::exp(-1.0) + 0.75 * 16.0 * std::exp(-4.0)) -
      std::log(2.0);
  CHECK(mixture_row_objective(2.0, rates, quarter) ==
        doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("objective stays finite where the direct density overflows") {
  const std::vector<double> rates{180.0, 240.0};
  const std::vector<double> prevalences{0.5, 0.5};
  const double value = mixture_row_objective(200.0, rates, prevalences);
  CHECK(std::isfinite(value));
  // lambda^k alone is far beyond double range here.
  CHECK(200.0 * std::log(240.0) > 709.0);
}

TEST_CASE("domain errors") {
  const std::vector<double> rates{1.0, 2.0};
  CHECK_THROWS_AS(mixture_row_objective(1.0, rates, std::vector<double>{0.5, 0.6}),
                  std::domain_error);
  CHECK_THROWS_AS(mixture_row_objective(1.0, std::vector<double>{1.0, -2.0},
                                        std::vector<double>{0.5, 0.5}),
                  std::domain_error);
}

TEST_CASE("responsibilities are a unit simplex point") {
  // Log-density contrasts are kept under ~36 nats: past one ulp of 1.0 the
  // winning component rounds to exactly 1, past ~745 nats the loser rounds
  // to exactly 0, and only the closed interval plus the sum constraint can
  // survive in doubles.
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const double f = 0.01 + 0.98 * rng.uniform();
    const std::vector<double> prevalences{f, 1.0 - f};
    const std::vector<double> rates{1.0 + 4.0 * rng.uniform(),
                                    1.0 + 4.0 * rng.uniform()};
    const double k = std::floor(rng.uniform() * 11.0);
    const auto r = mixture_responsibilities(k, rates, prevalences);
    CHECK(r[0] > 0.0);
    CHECK(r[1] > 0.0);
    CHECK(r[0] < 1.0);
    CHECK(r[1] < 1.0);
    CHECK(std::fabs(r[0] + r[1] - 1.0) <= 1e-12);
  }

  // Extreme contrast: still a valid simplex point after rounding.
  const auto extreme = mixture_responsibilities(
      300.0, std::vector<double>{0.1, 60.0}, std::vector<double>{0.5, 0.5});
  CHECK(extreme[0] >= 0.0);
  CHECK(extreme[1] <= 1.0);
  CHECK(std::fabs(extreme[0] + extreme[1] - 1.0) <= 1e-12);
}

TEST_CASE("gradient closed forms") {
  const std::vector<double> x{1.0, 0.0};
  const std::vector<double> prevalences{0.4, 0.6};

  const std::vector<double> stationary_rates{3.0, 3.0};
  const auto zero = mixture_gradient(3.0, stationary_rates, prevalences, x);
  CHECK(zero.d_intercept[0] == 0.0);
  CHECK(zero.d_intercept[1] == 0.0);

  // f -> 1 reduces to the plain Poisson gradient on component A.
  const std::vector<double> rates{2.0, 5.0};
  const std::vector<double> degenerate{1.0 - 1e-14, 1e-14};
  const auto g = mixture_gradient(4.0, rates, degenerate, x);
  const auto plain = poisson_gradient(4.0, 2.0, x);
  CHECK(std::fabs(g.d_intercept[0] - plain.d_intercept) < 1e-9);
  CHECK(std::fabs(g.d_coefficients[0][0] - plain.d_coefficients[0]) < 1e-9);
}

TEST_CASE("gradient matches finite differences") {
  Rng rng(20240603);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t b = 1 + static_cast<std::size_t>(rng.uniform() * 4);
    const double f = 0.05 + 0.9 * rng.uniform();
    const std::vector<double> prevalences{f, 1.0 - f};
    MixtureModel model;
    model.prevalences = prevalences;
    model.submodels.resize(2);
    std::vector<double> x(b);
    for (auto& sub : model.submodels) {
      sub.intercept = 2.0 * rng.uniform() - 1.0;
      for (std::size_t j = 0; j < b; ++j) {
        sub.coefficients.push_back(2.0 * rng.uniform() - 1.0);
      }
    }
    for (double& v : x) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const double k = std::floor(rng.uniform() * 51.0);

    std::vector<double> rates(2);
    for (int s = 0; s < 2; ++s) rates[s] = log_link_predict(model.submodels[s], x);
    const auto analytic = mixture_gradient(k, rates, prevalences, x);

    auto objective_of = [&](const MixtureModel& m) {
      std::vector<double> r(2);
      for (int s = 0; s < 2; ++s) r[s] = log_link_predict(m.submodels[s], x);
      return mixture_row_objective(k, r, prevalences);
    };

    for (int s = 0; s < 2; ++s) {
      double fd = testutil::central_difference(
          [&](double c) {
            MixtureModel m = model;
            m.submodels[s].intercept = c;
            return objective_of(m);
          },
          model.submodels[s].intercept);
      worst = std::max(worst, testutil::rel_err(analytic.d_intercept[s], fd));
      for (std::size_t j = 0; j < b; ++j) {
        fd = testutil::central_difference(
            [&](double v) {
              MixtureModel m = model;
              m.submodels[s].coefficients[j] = v;
              return objective_of(m);
            },
            model.submodels[s].coefficients[j]);
        worst = std::max(worst, testutil::rel_err(analytic.d_coefficients[s][j], fd));
      }
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("label swap symmetry is exact") {
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const double f = 0.01 + 0.98 * rng.uniform();
    const std::vector<double> rates{0.1 + 20.0 * rng.uniform(),
                                    0.1 + 20.0 * rng.uniform()};
    const std::vector<double> swapped_rates{rates[1], rates[0]};
    const double k = std::floor(rng.uniform() * 40.0);
    CHECK(mixture_row_objective(k, rates, std::vector<double>{f, 1.0 - f}) ==
          mixture_row_objective(k, swapped_rates, std::vector<double>{1.0 - f, f}));
  }
}

TEST_CASE("shared parameters collapse to the single GLM") {
  SubmodelParams shared;
  shared.intercept = 0.4;
  shared.coefficients = {0.7, -0.2};
  MixtureModel model;
  model.submodels = {shared, shared};
  model.prevalences = {0.25, 0.75};

  Rng rng(9);
  std::vector<double> x(2);
  for (int trial = 0; trial < 50; ++trial) {
    for (double& v : x) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const double lambda = log_link_predict(shared, x);
    CHECK(mixture_mean(model, x) == doctest::Approx(lambda).epsilon(1e-15));
    const std::vector<double> rates{lambda, lambda};
    const double k = std::floor(rng.uniform() * 9.0);
    CHECK(mixture_row_objective(k, rates, model.prevalences) ==
          doctest::Approx(poisson_row_objective(k, lambda)).epsilon(1e-12));
  }
}

TEST_CASE("homogeneous data drives both components to the population rate") {
  const Dataset ds = constant_rate_data(5.0, 4000, 21);
  FitConfig config;
  config.learning_rate = 0.1;
  config.max_epochs = 20000;
  config.seed = 2;
  const auto mixture = fit_mixture(ds, 0.3, config);
  const auto glm = fit_glm(ds, config);
  const auto mix_preds = mixture_predict(ds, mixture);
  const auto glm_preds = glm_predict(ds, glm);
  double mean_y = 0.0;
  for (double y : ds.response) mean_y += y;
  mean_y /= static_cast<double>(ds.n_rows);
  for (std::size_t i = 0; i < ds.n_rows; ++i) {
    CHECK(std::fabs(mix_preds[i] - glm_preds[i]) < 0.05 * mean_y);
  }
}

TEST_CASE("prevalence sweep") {
  const Dataset ds = constant_rate_data(4.0, 800, 33);
  FitConfig config;
  config.max_epochs = 3000;
  config.seed = 40;

  SUBCASE("single-point grid equals a direct fit") {
    const std::vector<double> grid{0.25};
    const auto cells = sweep_f(ds, grid, config);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].error.empty());
    FitConfig direct = config;
    direct.seed = config.seed;  // cell 0 keeps the base seed
    const auto model = fit_mixture(ds, 0.25, direct);
    const auto preds = mixture_predict(ds, model);
    CHECK(cells[0].mae == mae(preds, ds.response));
    CHECK(cells[0].rmse == rmse(preds, ds.response));
  }

  SUBCASE("rows come back sorted with errors isolated") {
    const std::vector<double> grid{0.45, 0.05, 0.25};
    const auto cells = sweep_f(ds, grid, config);
    REQUIRE(cells.size() == 3);
    CHECK(cells[0].f == 0.05);
    CHECK(cells[1].f == 0.25);
    CHECK(cells[2].f == 0.45);
    for (const auto& cell : cells) CHECK(cell.error.empty());
  }
}

TEST_CASE("sweep objective is symmetric on label-swappable data") {
  // Two equally likely populations with rates 2 and 8: fitting f and 1-f
  // should land on mirror solutions with matching objectives.
  Rng rng(55);
  std::vector<double> features, response;
  for (int i = 0; i < 3000; ++i) {
    features.push_back(rng.bernoulli(0.5) ? 1.0 : 0.0);
    response.push_back(
        static_cast<double>(rng.poisson(rng.bernoulli(0.5) ? 2.0 : 8.0)));
  }
  const auto ds = testutil::make_dataset(1, std::move(features), std::move(response));

  FitConfig config;
  config.learning_rate = 0.1;
  config.max_epochs = 8000;
  config.seed = 60;
  const std::vector<double> grid{0.3, 0.7};
  const auto cells = sweep_f(ds, grid, config);
  REQUIRE(cells.size() == 2);
  REQUIRE(cells[0].error.empty());
  REQUIRE(cells[1].error.empty());
  const double obj_low = mixture_mean_objective(ds, cells[0].model);
  const double obj_high = mixture_mean_objective(ds, cells[1].model);
  CHECK(std::fabs(obj_low - obj_high) < 0.01 * std::fabs(obj_low));
}

TEST_CASE("mixture mean is strictly positive") {
  Rng rng(8);
  MixtureModel model;
  model.prevalences = {0.6, 0.4};
  model.submodels.resize(2);
  for (auto& sub : model.submodels) {
    sub.intercept = 4.0 * rng.uniform() - 2.0;
    sub.coefficients = {4.0 * rng.uniform() - 2.0};
  }
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> x{rng.bernoulli(0.5) ? 1.0 : 0.0};
    CHECK(mixture_mean(model, x) > 0.0);
  }
}

TEST_CASE("model csv round trip") {
  MixtureModel model;
  model.prevalences = {0.25, 0.75};
  model.submodels.resize(2);
  model.submodels[0].intercept = 1.0 / 3.0;
  model.submodels[0].coefficients = {0.1, -0.2};
  model.submodels[1].intercept = -2.0 / 7.0;
  model.submodels[1].coefficients = {1e-16, 3.5};
  std::ostringstream out;
  write_mixture_csv(model, out);
  std::istringstream in(out.str());
  const auto back = read_mixture_csv(in);
  REQUIRE(back.submodels.size() == 2);
  CHECK(back.prevalences == model.prevalences);
  for (int s = 0; s < 2; ++s) {
    CHECK(back.submodels[s].intercept == model.submodels[s].intercept);
    CHECK(back.submodels[s].coefficients == model.submodels[s].coefficients);
  }
}

TEST_SUITE_END();
