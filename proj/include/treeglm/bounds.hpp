#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace treeglm {

/// Degrees-of-freedom accounting for composite and mixture models over B
/// binary features. A saturated depth-B linear model needs 2^B coefficients;
/// the alternatives are "useful" while they stay strictly below that.

inline void check_bound_query(int submodel_count, int n_features) {
  if (n_features < 1) throw std::invalid_argument("bounds: B must be >= 1");
  if (submodel_count < 1) throw std::invalid_argument("bounds: S must be >= 1");
}

/// Coefficients in a composite model: S*(B+1).
inline std::int64_t k_values_multiresp(int submodel_count, int n_features) {
  check_bound_query(submodel_count, n_features);
  return static_cast<std::int64_t>(submodel_count) * (n_features + 1);
}

/// Coefficients plus prevalences in a mixture model: S*(B+2) - 1.
inline std::int64_t k_values_mixture(int submodel_count, int n_features) {
  check_bound_query(submodel_count, n_features);
  return static_cast<std::int64_t>(submodel_count) * (n_features + 2) - 1;
}

/// Largest S >= 0 with S*(B+1) < 2^B.
inline std::int64_t max_useful_submodels_multiresp(int n_features) {
  if (n_features < 1 || n_features > 62) {
    throw std::invalid_argument("bounds: B must be in [1, 62]");
  }
  const std::int64_t cells = std::int64_t{1} << n_features;
  return (cells - 1) / (n_features + 1);
}

/// Largest S >= 0 with S*(B+2) - 1 < 2^B.
inline std::int64_t max_useful_submodels_mixture(int n_features) {
  if (n_features < 1 || n_features > 61) {
    throw std::invalid_argument("bounds: B must be in [1, 61]");
  }
  const std::int64_t cells = std::int64_t{1} << n_features;
  return cells / (n_features + 2);
}

/// Markdown table of both limits for B = 1..b_max.
std::string render_bounds_table(int b_max);

}  // namespace treeglm
