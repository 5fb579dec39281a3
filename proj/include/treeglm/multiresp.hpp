#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "treeglm/glm.hpp"

namespace treeglm {

/// Composite-response Poisson model: S log-linked submodels whose rates sum
/// to the response rate.
struct MultirespModel {
  std::vector<SubmodelParams> submodels;

  std::size_t n_features() const {
    return submodels.empty() ? 0 : submodels.front().coefficients.size();
  }
};

/// Total rate sum_s exp(c_s + m_s . x). Addends are summed in ascending
/// order, so the result is invariant under submodel permutation.
double multiresp_predict(const MultirespModel& model, std::span<const double> x);

struct MultirespGradient {
  std::vector<double> d_intercept;                  // one per submodel
  std::vector<std::vector<double>> d_coefficients;  // [submodel][feature]
};

/// d/dc_s = ((k - lambda)/lambda) * lambda_s, and the same scaled by x_n for
/// the coefficients. `lambda` must equal the sum of `rates`.
MultirespGradient multiresp_gradient(double k, std::span<const double> rates,
                                     double lambda, std::span<const double> x);

/// Gradient-ascent fit with symmetry-broken initialisation: intercepts start
/// at ln(mean/S + eps), coefficients at seeded uniform draws in
/// [-init_scale, +init_scale]. Deterministic given (dataset, S, config).
MultirespModel fit_multiresp(const Dataset& ds, int submodel_count,
                             const FitConfig& config = {});

std::vector<double> multiresp_predict(const Dataset& ds, const MultirespModel& model);

double multiresp_mean_objective(const Dataset& ds, const MultirespModel& model);

void write_multiresp_csv(const MultirespModel& model, std::ostream& out);
MultirespModel read_multiresp_csv(std::istream& in);

}  // namespace treeglm
