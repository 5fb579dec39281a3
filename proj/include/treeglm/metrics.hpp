#pragma once

#include <span>

namespace treeglm {

/// Mean absolute error. Throws std::invalid_argument on empty or mismatched
/// inputs.
double mae(std::span<const double> predictions, std::span<const double> actuals);

/// Root mean squared error; always >= mae on the same inputs.
double rmse(std::span<const double> predictions, std::span<const double> actuals);

}  // namespace treeglm
