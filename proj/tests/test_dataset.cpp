#include <doctest.h>

#include <cmath>
#include <sstream>

#include "testutil.hpp"
#include "treeglm/dataset.hpp"
#include "treeglm/rng.hpp"

using namespace treeglm;

TEST_SUITE_BEGIN("dataset");

TEST_CASE("csv round trip keeps every value") {
  auto ds = testutil::make_dataset(2, {0, 1, 1, 0}, {2.5, 0.333333333333333315});
  std::ostringstream out;
  write_dataset_csv(ds, out);
  const std::string text = out.str();
  CHECK(text.rfind("x1,x2,y\n", 0) == 0);
  CHECK(text.find("0,1,2.5\n") != std::string::npos);  // integral cells stay bare

  std::istringstream in(text);
  const Dataset back = read_dataset_csv(in);
  CHECK(back.n_rows == ds.n_rows);
  CHECK(back.n_cols == ds.n_cols);
  CHECK(back.features == ds.features);
  CHECK(back.response == ds.response);
}

TEST_CASE("csv rejects malformed input") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_dataset_csv(empty), std::invalid_argument);
  std::istringstream no_response("x1,x2\n0,1\n");
  CHECK_THROWS_AS(read_dataset_csv(no_response), std::invalid_argument);
  std::istringstream ragged("x1,y\n0,1\n0\n");
  CHECK_THROWS_AS(read_dataset_csv(ragged), std::invalid_argument);
  std::istringstream words("x1,y\n0,apple\n");
  CHECK_THROWS_AS(read_dataset_csv(words), std::invalid_argument);
}

TEST_CASE("validation catches shape and value problems") {
  Dataset ds = testutil::make_dataset(1, {0, 1}, {1, 2});
  CHECK_NOTHROW(ds.validate(true));
  ds.response[0] = -1;
  CHECK_THROWS_AS(ds.validate(true), std::invalid_argument);
  ds.response[0] = std::nan("");
  CHECK_THROWS_AS(ds.validate(false), std::invalid_argument);
}

TEST_CASE("metadata sidecar lists provenance") {
  ScenarioSpec spec;
  spec.scenario = Scenario::mixture;
  spec.n = 100;
  spec.seed = 9;
  spec.overrides["p_a"] = 0.3;
  const Dataset ds = generate(spec);
  std::ostringstream out;
  write_dataset_metadata(ds, out);
  const std::string text = out.str();
  CHECK(text.find("scenario=mixture\n") != std::string::npos);
  CHECK(text.find("seed=9\n") != std::string::npos);
  CHECK(text.find("override.p_a=") != std::string::npos);
  CHECK(text.find("population_a_fraction=") != std::string::npos);
}

TEST_CASE("uniform draws live in the half-open unit interval") {
  Rng rng(123);
  double low = 1.0, high = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    low = std::min(low, u);
    high = std::max(high, u);
  }
  CHECK(low < 0.01);
  CHECK(high > 0.99);
}

TEST_CASE("poisson draws have the right first two moments") {
  Rng rng(124);
  const double lambda = 7.5;
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double k = static_cast<double>(rng.poisson(lambda));
    sum += k;
    sum_sq += k * k;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  CHECK(std::fabs(mean - lambda) < 0.05);
  CHECK(std::fabs(var - lambda) < 0.15);
  CHECK_THROWS_AS(rng.poisson(0.0), std::domain_error);
}

TEST_CASE("normal draws are standard") {
  Rng rng(125);
  const int n = 200000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  const double mean = sum / n;
  CHECK(std::fabs(mean) < 0.01);
  CHECK(std::fabs(sum_sq / n - mean * mean - 1.0) < 0.02);
}

TEST_SUITE_END();
