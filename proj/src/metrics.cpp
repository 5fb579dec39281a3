#include "treeglm/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace treeglm {

namespace {
void check_metric_inputs(std::span<const double> predictions,
                         std::span<const double> actuals) {
  if (predictions.empty() || predictions.size() != actuals.size()) {
    throw std::invalid_argument("metrics: need equal-length non-empty inputs");
  }
}
}  // namespace

double mae(std::span<const double> predictions, std::span<const double> actuals) {
  check_metric_inputs(predictions, actuals);
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    total += std::fabs(predictions[i] - actuals[i]);
  }
  return total / static_cast<double>(predictions.size());
}

double rmse(std::span<const double> predictions, std::span<const double> actuals) {
  check_metric_inputs(predictions, actuals);
  double total = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = predictions[i] - actuals[i];
    total += e * e;
  }
  return std::sqrt(total / static_cast<double>(predictions.size()));
}

}  // namespace treeglm
