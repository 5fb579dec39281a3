#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "treeglm/dataset.hpp"

namespace treeglm {

/// One log-linked linear predictor: rate = exp(intercept + coefficients . x).
struct SubmodelParams {
  double intercept = 0.0;
  std::vector<double> coefficients;
};

/// Controls for full-batch gradient ascent on the mean per-row objective.
///
/// The ascent stops once the relative change of the objective stays below
/// `tolerance` for five consecutive epochs, or at `max_epochs`. A tolerance
/// of zero forces the full epoch budget.
struct FitConfig {
  double learning_rate = 0.05;
  long max_epochs = 20000;
  double tolerance = 1e-10;
  double init_scale = 0.1;   // half-width of the uniform coefficient init
  std::uint64_t seed = 0;
};

/// exp(intercept + coefficients . x); strictly positive.
double log_link_predict(const SubmodelParams& params, std::span<const double> x);

/// Per-row Poisson log-likelihood k*ln(lambda) - lambda - ln(k!), with the
/// factorial term computed through lgamma.
double poisson_row_objective(double k, double lambda);

struct PoissonGradient {
  double d_intercept = 0.0;
  std::vector<double> d_coefficients;
};

/// d/dc = k - lambda, d/dm_n = (k - lambda) * x_n.
PoissonGradient poisson_gradient(double k, double lambda, std::span<const double> x);

/// Maximum-likelihood fit of a single Poisson GLM by full-batch gradient
/// ascent. Deterministic given (dataset, config). Throws TrainingError if the
/// objective becomes non-finite.
SubmodelParams fit_glm(const Dataset& ds, const FitConfig& config = {});

std::vector<double> glm_predict(const Dataset& ds, const SubmodelParams& params);

/// Mean per-row objective including the ln(k!) term (reporting convention;
/// the constant is dropped inside the optimiser).
double glm_mean_objective(const Dataset& ds, const SubmodelParams& params);

void write_submodel_csv(const std::vector<SubmodelParams>& submodels,
                        std::ostream& out);
std::vector<SubmodelParams> read_submodel_csv(std::istream& in);

namespace detail {
/// Exponent clamp used by all training loops; rates are kept in
/// [exp(-30), exp(30)] and clamp events are counted so fits can warn.
inline constexpr double kMaxExpArg = 30.0;
double clamped_rate(const SubmodelParams& params, std::span<const double> x,
                    long* clamp_count);
}  // namespace detail

}  // namespace treeglm
