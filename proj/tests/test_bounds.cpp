#include <doctest.h>

#include "treeglm/bounds.hpp"

using namespace treeglm;

TEST_SUITE_BEGIN("bounds");

TEST_CASE("parameter counts") {
  CHECK(k_values_multiresp(3, 4) == 15);
  CHECK(k_values_multiresp(3, 8) == 27);
  CHECK(k_values_multiresp(1, 6) == 7);
  CHECK_THROWS_AS(k_values_multiresp(1, 0), std::invalid_argument);

  CHECK(k_values_mixture(2, 4) == 11);
  CHECK(k_values_mixture(1, 6) == 7);  // S=1 reduces to a plain GLM
  CHECK(k_values_mixture(2, 12) == 27);
  CHECK_THROWS_AS(k_values_mixture(0, 4), std::invalid_argument);
}

TEST_CASE("max useful submodel tables") {
  const std::int64_t composite_limit[11] = {0, 0, 1, 1, 3, 5, 9, 15, 28, 51, 93};
  const std::int64_t mixture_limit[11] = {0, 0, 1, 1, 2, 4, 8, 14, 25, 46, 85};
  for (int b = 1; b <= 10; ++b) {
    CHECK(max_useful_submodels_multiresp(b) == composite_limit[b]);
    CHECK(max_useful_submodels_mixture(b) == mixture_limit[b]);
  }
}

TEST_CASE("limits satisfy the strict inequality") {
  for (int b = 1; b <= 20; ++b) {
    const std::int64_t cells = std::int64_t{1} << b;
    const std::int64_t s_composite = max_useful_submodels_multiresp(b);
    if (s_composite > 0) CHECK(s_composite * (b + 1) < cells);
    CHECK((s_composite + 1) * (b + 1) >= cells);

    const std::int64_t s_mixture = max_useful_submodels_mixture(b);
    if (s_mixture > 0) CHECK(s_mixture * (b + 2) - 1 < cells);
    CHECK((s_mixture + 1) * (b + 2) - 1 >= cells);
  }
}

TEST_CASE("monotone in B and mixture never beats composite") {
  for (int b = 2; b <= 20; ++b) {
    CHECK(max_useful_submodels_multiresp(b) >= max_useful_submodels_multiresp(b - 1));
    CHECK(max_useful_submodels_mixture(b) >= max_useful_submodels_mixture(b - 1));
  }
  for (int b = 1; b <= 20; ++b) {
    CHECK(max_useful_submodels_mixture(b) <= max_useful_submodels_multiresp(b));
  }
}

TEST_CASE("rendered table") {
  const std::string table = render_bounds_table(4);
  CHECK(table.find("| 4 | 3 | 2 |") != std::string::npos);
  CHECK_THROWS_AS(render_bounds_table(0), std::invalid_argument);
}

TEST_SUITE_END();
